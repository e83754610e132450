#include "genolang/forest.hpp"

#include "genolang/error.hpp"
#include "genolang/rng.hpp"
#include "genolang/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace genolang {

void ForestHyperparams::validate() const {
    if (n_trees < 1) fail(ErrorKind::config, "n_trees must be >= 1");
    if (max_depth < 0) fail(ErrorKind::config, "max_depth must be >= 0 (0 = unlimited)");
    if (min_samples_leaf < 1) fail(ErrorKind::config, "min_samples_leaf must be >= 1");
    if (features_per_split == FeatureSubset::fixed && fixed_features < 1)
        fail(ErrorKind::config, "features_per_split must be positive");
}

std::size_t ForestHyperparams::resolve_features(std::size_t feature_count) const {
    require(feature_count > 0, "forest needs at least one feature");
    std::size_t m = 1;
    switch (features_per_split) {
    case FeatureSubset::sqrt: m = static_cast<std::size_t>(std::sqrt(static_cast<double>(feature_count))); break;
    case FeatureSubset::log2: m = static_cast<std::size_t>(std::log2(static_cast<double>(feature_count))); break;
    case FeatureSubset::all: m = feature_count; break;
    case FeatureSubset::fixed: m = static_cast<std::size_t>(fixed_features); break;
    }
    return std::clamp<std::size_t>(m, 1, feature_count);
}

void parse_features_per_split(std::string_view s, ForestHyperparams& h) {
    if (s == "sqrt") h.features_per_split = FeatureSubset::sqrt;
    else if (s == "log2") h.features_per_split = FeatureSubset::log2;
    else if (s == "all") h.features_per_split = FeatureSubset::all;
    else {
        long long n = 0;
        if (!parse_int(s, n) || n < 1)
            fail(ErrorKind::config, "features_per_split must be sqrt, log2, all or a positive integer (got '" + std::string(s) + "')");
        h.features_per_split = FeatureSubset::fixed;
        h.fixed_features = static_cast<int>(n);
    }
}

std::string features_per_split_string(const ForestHyperparams& h) {
    switch (h.features_per_split) {
    case FeatureSubset::sqrt: return "sqrt";
    case FeatureSubset::log2: return "log2";
    case FeatureSubset::all: return "all";
    case FeatureSubset::fixed: return std::to_string(h.fixed_features);
    }
    return "sqrt";
}

BootstrapMode parse_bootstrap(std::string_view s) {
    if (s == "plain") return BootstrapMode::plain;
    if (s == "class_balanced") return BootstrapMode::class_balanced;
    fail(ErrorKind::config, "bootstrap must be plain or class_balanced (got '" + std::string(s) + "')");
}

const char* to_string(BootstrapMode b) noexcept {
    return b == BootstrapMode::plain ? "plain" : "class_balanced";
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
    const TreeNode* n = &nodes[0];
    while (!n->is_leaf()) {
        n = &nodes[static_cast<std::size_t>(x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
    }
    return *n;
}

double DecisionTree::predict_proba(std::span<const double> x) const {
    const TreeNode& leaf = leaf_for(x);
    return (static_cast<double>(leaf.count1) + 1.0) / (static_cast<double>(leaf.count0) + static_cast<double>(leaf.count1) + 2.0);
}

void ForestModel::validate() const {
    require(!trees.empty(), "forest has no trees");
    for (const auto& t : trees) {
        require(!t.nodes.empty(), "forest contains an empty tree");
        for (const auto& n : t.nodes) {
            require(n.count0 + n.count1 > 0, "tree node with no samples");
            if (n.is_leaf()) continue;
            require(static_cast<std::size_t>(n.feature) < feature_names.size(), "tree references an unknown feature");
            require(std::isfinite(n.threshold), "non-finite split threshold");
            require(n.left > 0 && n.right > 0 && static_cast<std::size_t>(n.left) < t.nodes.size() &&
                        static_cast<std::size_t>(n.right) < t.nodes.size(),
                    "tree child index out of range");
        }
    }
}

double gini_from_counts(double n0, double n1) noexcept {
    const double n = n0 + n1;
    if (n <= 0) return 0.0;
    const double p0 = n0 / n, p1 = n1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

double gini_impurity(std::span<const int> labels) {
    require(!labels.empty(), "gini_impurity of an empty multiset");
    double n1 = 0;
    for (int l : labels) {
        require(l == 0 || l == 1, "gini_impurity labels must be 0 or 1");
        n1 += l;
    }
    return gini_from_counts(static_cast<double>(labels.size()) - n1, n1);
}

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h, Rng& rng)
        : X_(X), y_(y), h_(h), rng_(rng), mtry_(h.resolve_features(X.cols())) {
        features_.resize(X.cols());
        std::iota(features_.begin(), features_.end(), 0);
    }

    DecisionTree build(std::vector<std::size_t> samples) {
        samples_ = std::move(samples);
        tree_.nodes.clear();
        grow(0, samples_.size(), 0);
        return std::move(tree_);
    }

private:
    // Returns the index of the created node.
    int grow(std::size_t begin, std::size_t end, int depth) {
        TreeNode node;
        for (std::size_t i = begin; i < end; ++i) (y_[samples_[i]] == Label::related ? node.count1 : node.count0)++;
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(node);

        const std::size_t n = end - begin;
        const bool pure = node.count0 == 0 || node.count1 == 0;
        const bool depth_capped = h_.max_depth > 0 && depth >= h_.max_depth;
        if (pure || depth_capped || n < 2 * static_cast<std::size_t>(h_.min_samples_leaf)) return id;

        const SplitChoice best = find_split(begin, end, node);
        if (best.feature < 0) return id;

        const auto f = static_cast<std::size_t>(best.feature);
        auto mid = std::stable_partition(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                         samples_.begin() + static_cast<std::ptrdiff_t>(end),
                                         [&](std::size_t s) { return X_.at(s, f) <= best.threshold; });
        const auto split = static_cast<std::size_t>(mid - samples_.begin());

        const int left = grow(begin, split, depth + 1);
        const int right = grow(split, end, depth + 1);
        TreeNode& self = tree_.nodes[static_cast<std::size_t>(id)];
        self.feature = best.feature;
        self.threshold = best.threshold;
        self.left = left;
        self.right = right;
        return id;
    }

    SplitChoice find_split(std::size_t begin, std::size_t end, const TreeNode& node) {
        // Partial Fisher-Yates draw of mtry distinct features, then ascending order.
        for (std::size_t i = 0; i < mtry_; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng_.below(features_.size() - i));
            std::swap(features_[i], features_[j]);
        }
        std::vector<std::size_t> subset(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(mtry_));
        std::sort(subset.begin(), subset.end());

        const std::size_t n = end - begin;
        const double nd = static_cast<double>(n);
        const double parent = gini_from_counts(node.count0, node.count1);
        const auto min_leaf = static_cast<std::size_t>(h_.min_samples_leaf);

        SplitChoice best;
        column_.resize(n);
        for (std::size_t f : subset) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t s = samples_[begin + i];
                column_[i] = {X_.at(s, f), y_[s] == Label::related ? 1 : 0};
            }
            std::sort(column_.begin(), column_.end());
            double l0 = 0, l1 = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                (column_[i].second ? l1 : l0) += 1.0;
                const double a = column_[i].first, b = column_[i + 1].first;
                if (!(a < b)) continue;
                const std::size_t nl = i + 1, nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                const double r0 = node.count0 - l0, r1 = node.count1 - l1;
                const double weighted = (static_cast<double>(nl) * gini_from_counts(l0, l1) +
                                         static_cast<double>(nr) * gini_from_counts(r0, r1)) / nd;
                const double decrease = parent - weighted;
                if (decrease > best.decrease) {
                    double thr = a + (b - a) / 2.0;
                    if (!(thr >= a && thr < b)) thr = a;
                    best = {static_cast<int>(f), thr, decrease};
                }
            }
        }
        return best;
    }

    const FeatureMatrix& X_;
    std::span<const Label> y_;
    const ForestHyperparams& h_;
    Rng& rng_;
    std::size_t mtry_;
    std::vector<std::size_t> features_;
    std::vector<std::size_t> samples_;
    std::vector<std::pair<double, int>> column_;
    DecisionTree tree_;
};

void check_training_inputs(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h) {
    h.validate();
    if (X.rows != y.size())
        fail(ErrorKind::dimension, "feature rows (" + std::to_string(X.rows) + ") != label count (" + std::to_string(y.size()) + ")");
    if (y.size() < 2) fail(ErrorKind::single_class, "forest training needs at least 2 samples");
    const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), Label::related));
    if (pos == 0 || pos == y.size()) fail(ErrorKind::single_class, "forest training needs both classes present");
    for (double v : X.values)
        if (!std::isfinite(v)) fail(ErrorKind::value, "non-finite value in feature matrix");
}

} // namespace

DecisionTree train_tree(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h, std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    std::vector<std::size_t> samples;
    if (h.bootstrap == BootstrapMode::plain) {
        samples.reserve(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) samples.push_back(static_cast<std::size_t>(rng.below(y.size())));
    } else {
        std::vector<std::size_t> by_class[2];
        for (std::size_t i = 0; i < y.size(); ++i) by_class[to_int(y[i])].push_back(i);
        const std::size_t n_min = std::min(by_class[0].size(), by_class[1].size());
        samples.reserve(2 * n_min);
        for (int c = 1; c >= 0; --c)
            for (std::size_t i = 0; i < n_min; ++i) samples.push_back(by_class[c][rng.below(by_class[c].size())]);
    }
    TreeBuilder builder(X, y, h, rng);
    return builder.build(std::move(samples));
}

ForestModel train_forest(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h) {
    check_training_inputs(X, y, h);
    ForestModel m;
    m.feature_names = X.feature_names;
    m.hyperparams = h;
    m.trees.resize(static_cast<std::size_t>(h.n_trees));
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < h.n_trees; ++t) {
        m.trees[static_cast<std::size_t>(t)] = train_tree(X, y, h, mix_seed(h.seed, static_cast<std::uint64_t>(t)));
    }
    return m;
}

double forest_predict_proba(const ForestModel& m, std::span<const double> x) {
    if (x.size() != m.feature_names.size())
        fail(ErrorKind::dimension, "feature row has width " + std::to_string(x.size()) + ", model expects " + std::to_string(m.feature_names.size()));
    double sum = 0.0;
    for (const auto& t : m.trees) sum += t.predict_proba(x);
    return sum / static_cast<double>(m.trees.size());
}

std::vector<double> forest_predict_proba(const ForestModel& m, const FeatureMatrix& X) {
    if (X.cols() != m.feature_names.size())
        fail(ErrorKind::dimension, "feature matrix has " + std::to_string(X.cols()) + " columns, model expects " + std::to_string(m.feature_names.size()));
    std::vector<double> out(X.rows);
    const auto n = static_cast<std::ptrdiff_t>(X.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        out[static_cast<std::size_t>(r)] = forest_predict_proba(m, X.row(static_cast<std::size_t>(r)));
    }
    return out;
}

std::vector<double> gini_importance(const ForestModel& m) {
    std::vector<double> imp(m.feature_names.size(), 0.0);
    for (const auto& t : m.trees) {
        const auto& root = t.nodes[0];
        const double n_root = static_cast<double>(root.count0) + root.count1;
        for (const auto& node : t.nodes) {
            if (node.is_leaf()) continue;
            const auto& l = t.nodes[static_cast<std::size_t>(node.left)];
            const auto& r = t.nodes[static_cast<std::size_t>(node.right)];
            const double n = static_cast<double>(node.count0) + node.count1;
            const double nl = static_cast<double>(l.count0) + l.count1;
            const double nr = static_cast<double>(r.count0) + r.count1;
            const double decrease = gini_from_counts(node.count0, node.count1) -
                                    (nl * gini_from_counts(l.count0, l.count1) + nr * gini_from_counts(r.count0, r.count1)) / n;
            imp[static_cast<std::size_t>(node.feature)] += (n / n_root) * std::max(0.0, decrease);
        }
    }
    double total = 0.0;
    for (double& v : imp) {
        v /= static_cast<double>(m.trees.size());
        total += v;
    }
    if (total > 0)
        for (double& v : imp) v /= total;
    return imp;
}

nlohmann::json forest_to_json(const ForestModel& m) {
    using nlohmann::json;
    json trees = json::array();
    for (const auto& t : m.trees) {
        json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
             c0 = json::array(), c1 = json::array();
        for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            c0.push_back(n.count0);
            c1.push_back(n.count1);
        }
        trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"count0", c0}, {"count1", c1}});
    }
    const auto& h = m.hyperparams;
    return json{{"format", "genolang-forest"},
                {"version", 1},
                {"feature_names", m.feature_names},
                {"hyperparams",
                 {{"n_trees", h.n_trees},
                  {"max_depth", h.max_depth},
                  {"min_samples_leaf", h.min_samples_leaf},
                  {"features_per_split", features_per_split_string(h)},
                  {"bootstrap", to_string(h.bootstrap)},
                  {"seed", h.seed}}},
                {"trees", trees}};
}

ForestModel forest_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "genolang-forest") fail(ErrorKind::format, "not a forest model (format tag)");
        if (j.at("version").get<int>() != 1) fail(ErrorKind::format, "unsupported forest model version");
        ForestModel m;
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const auto& h = j.at("hyperparams");
        m.hyperparams.n_trees = h.at("n_trees").get<int>();
        m.hyperparams.max_depth = h.at("max_depth").get<int>();
        m.hyperparams.min_samples_leaf = h.at("min_samples_leaf").get<int>();
        parse_features_per_split(h.at("features_per_split").get<std::string>(), m.hyperparams);
        m.hyperparams.bootstrap = parse_bootstrap(h.at("bootstrap").get<std::string>());
        m.hyperparams.seed = h.at("seed").get<std::uint64_t>();
        for (const auto& t : j.at("trees")) {
            const auto feature = t.at("feature").get<std::vector<int>>();
            const auto threshold = t.at("threshold").get<std::vector<double>>();
            const auto left = t.at("left").get<std::vector<int>>();
            const auto right = t.at("right").get<std::vector<int>>();
            const auto c0 = t.at("count0").get<std::vector<std::uint32_t>>();
            const auto c1 = t.at("count1").get<std::vector<std::uint32_t>>();
            const std::size_t n = feature.size();
            if (threshold.size() != n || left.size() != n || right.size() != n || c0.size() != n || c1.size() != n || n == 0)
                fail(ErrorKind::format, "forest model: node arrays of unequal length");
            DecisionTree tree;
            tree.nodes.resize(n);
            for (std::size_t i = 0; i < n; ++i) tree.nodes[i] = {feature[i], threshold[i], left[i], right[i], c0[i], c1[i]};
            m.trees.push_back(std::move(tree));
        }
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, std::string("forest model: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::contract) fail(ErrorKind::format, std::string("forest model: ") + e.what());
        throw;
    }
}

void save_forest(const ForestModel& m, const std::filesystem::path& path) {
    write_text_file(path, forest_to_json(m).dump() + "\n");
}

ForestModel load_forest(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, path.string() + ": " + e.what());
    }
    return forest_from_json(j);
}

} // namespace genolang
