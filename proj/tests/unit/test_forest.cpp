#include "genolang/error.hpp"
#include "genolang/forest.hpp"
#include "genolang/parallel.hpp"
#include "genolang/reference.hpp"
#include "genolang/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>

using namespace genolang;

namespace {

struct Problem {
    FeatureMatrix X;
    std::vector<Label> y;
};

// Feature 0 carries the label (optionally noisy); the rest are uniform noise.
Problem make_problem(std::uint64_t seed, std::size_t rows, std::size_t cols, double flip = 0.0, std::size_t positives = 0) {
    Rng rng(seed);
    Problem p;
    for (std::size_t c = 0; c < cols; ++c) p.X.feature_names.push_back("f" + std::to_string(c));
    p.X.rows = rows;
    if (positives == 0) positives = rows / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        const bool pos = r < positives;
        p.y.push_back(pos ? Label::related : Label::not_related);
        for (std::size_t c = 0; c < cols; ++c) {
            double v = rng.uniform();
            if (c == 0) v = (pos != (rng.uniform() < flip)) ? 1.0 + v : v;
            p.X.values.push_back(v);
        }
    }
    return p;
}

ForestHyperparams small(int trees, std::uint64_t seed = 1) {
    ForestHyperparams h;
    h.n_trees = trees;
    h.seed = seed;
    return h;
}

} // namespace

TEST_SUITE("forest") {

TEST_CASE("gini examples") {
    std::vector<int> pure{1, 1, 1}, half{0, 1}, mixed{0, 0, 1, 1, 1, 1};
    CHECK(gini_impurity(pure) == 0.0);
    CHECK(gini_impurity(half) == 0.5);
    CHECK(gini_impurity(mixed) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    std::vector<int> empty;
    try {
        gini_impurity(empty);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::contract);
    }
}

TEST_CASE("single-class training is rejected") {
    auto p = make_problem(1, 20, 3);
    std::fill(p.y.begin(), p.y.end(), Label::related);
    try {
        train_forest(p.X, p.y, small(5));
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::single_class);
    }
}

TEST_CASE("hyperparameter validation") {
    ForestHyperparams h;
    h.n_trees = 0;
    CHECK_THROWS(h.validate());
    h = {};
    h.min_samples_leaf = 0;
    CHECK_THROWS(h.validate());
    h = {};
    parse_features_per_split("7", h);
    CHECK(h.features_per_split == FeatureSubset::fixed);
    CHECK(h.resolve_features(100) == 7);
    parse_features_per_split("sqrt", h);
    CHECK(h.resolve_features(69) == 8);
    CHECK_THROWS(parse_features_per_split("many", h));
}

TEST_CASE("separable feature is chosen at the root and fits the training set") {
    auto p = make_problem(2, 200, 6);
    auto h = small(30);
    h.features_per_split = FeatureSubset::all;
    auto m = train_forest(p.X, p.y, h);
    for (const auto& t : m.trees) {
        CHECK(t.nodes[0].feature == 0);
        CHECK(t.nodes[0].threshold > 0.9);
        CHECK(t.nodes[0].threshold < 1.1);
    }
    h.features_per_split = FeatureSubset::sqrt;
    auto m2 = train_forest(p.X, p.y, h);
    auto probs = forest_predict_proba(m2, p.X);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < p.X.rows; ++r) correct += (probs[r] >= 0.5) == (p.y[r] == Label::related);
    CHECK(correct == p.X.rows);
    auto imp = gini_importance(m2);
    CHECK(std::max_element(imp.begin(), imp.end()) - imp.begin() == 0);
}

TEST_CASE("leaf probability is Laplace smoothed") {
    ForestModel m;
    m.feature_names = {"x"};
    m.hyperparams.n_trees = 1;
    DecisionTree t;
    TreeNode leaf;
    leaf.count1 = 4;
    t.nodes.push_back(leaf);
    m.trees.push_back(t);
    std::vector<double> x{0.3};
    CHECK(forest_predict_proba(m, x) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    std::vector<double> wide{0.3, 0.4};
    try {
        forest_predict_proba(m, wide);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::dimension);
    }
}

TEST_CASE("swapping class counts maps p to 1 - p") {
    auto p = make_problem(3, 120, 5, 0.2);
    auto m = train_forest(p.X, p.y, small(25));
    ForestModel swapped = m;
    for (auto& t : swapped.trees)
        for (auto& n : t.nodes) std::swap(n.count0, n.count1);
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(5);
        for (double& v : x) v = rng.uniform(0, 2);
        CHECK(forest_predict_proba(swapped, x) == doctest::Approx(1.0 - forest_predict_proba(m, x)).epsilon(1e-12));
    }
}

TEST_CASE("ensemble probability is the mean of tree probabilities") {
    auto p = make_problem(5, 150, 8, 0.15, 30);
    auto m = train_forest(p.X, p.y, small(40));
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(8);
        for (double& v : x) v = rng.uniform(0, 2);
        double sum = 0, lo = 1, hi = 0;
        for (const auto& t : m.trees) {
            // Walk the tree here rather than through leaf_for.
            std::size_t node = 0;
            while (t.nodes[node].feature >= 0) {
                const auto& n = t.nodes[node];
                node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
            }
            const auto& leaf = t.nodes[node];
            const double pt = (leaf.count1 + 1.0) / (leaf.count0 + leaf.count1 + 2.0);
            sum += pt;
            lo = std::min(lo, pt);
            hi = std::max(hi, pt);
        }
        const double ens = forest_predict_proba(m, x);
        CHECK(ens == doctest::Approx(sum / static_cast<double>(m.trees.size())).epsilon(1e-12));
        CHECK(ens >= lo - 1e-15);
        CHECK(ens <= hi + 1e-15);
    }
}

TEST_CASE("adding trees leaves earlier trees unchanged") {
    auto p = make_problem(7, 100, 4, 0.1);
    auto a = train_forest(p.X, p.y, small(10));
    auto b = train_forest(p.X, p.y, small(20));
    for (std::size_t t = 0; t < 10; ++t) CHECK(a.trees[t] == b.trees[t]);
}

TEST_CASE("split structure invariants") {
    auto p = make_problem(8, 200, 6, 0.25, 40);
    auto h = small(20);
    h.min_samples_leaf = 3;
    auto m = train_forest(p.X, p.y, h);
    for (const auto& t : m.trees) {
        // balanced bootstrap: 40 draws per class at the root
        CHECK(t.nodes[0].count0 == 40);
        CHECK(t.nodes[0].count1 == 40);
        for (const auto& n : t.nodes) {
            if (n.is_leaf()) {
                CHECK(n.count0 + n.count1 >= 3);
                continue;
            }
            const auto& l = t.nodes[static_cast<std::size_t>(n.left)];
            const auto& r = t.nodes[static_cast<std::size_t>(n.right)];
            CHECK(l.count0 + r.count0 == n.count0);
            CHECK(l.count1 + r.count1 == n.count1);
            const double parent = gini_from_counts(n.count0, n.count1);
            const double nl = l.count0 + l.count1, nr = r.count0 + r.count1;
            const double child = (nl * gini_from_counts(l.count0, l.count1) + nr * gini_from_counts(r.count0, r.count1)) / (nl + nr);
            CHECK(parent - child >= -1e-12);
        }
    }
}

TEST_CASE("depth cap") {
    auto p = make_problem(9, 200, 5, 0.3);
    auto h = small(10);
    h.max_depth = 2;
    auto m = train_forest(p.X, p.y, h);
    for (const auto& t : m.trees) {
        std::vector<int> depth(t.nodes.size(), 0);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const auto& n = t.nodes[i];
            if (n.is_leaf()) continue;
            depth[static_cast<std::size_t>(n.left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(n.right)] = depth[i] + 1;
        }
        CHECK(*std::max_element(depth.begin(), depth.end()) <= 2);
    }
}

TEST_CASE("importance properties") {
    auto p = make_problem(10, 200, 10, 0.1);
    auto m = train_forest(p.X, p.y, small(30));
    auto imp = gini_importance(m);
    REQUIRE(imp.size() == 10);
    CHECK(std::accumulate(imp.begin(), imp.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (double v : imp) CHECK(v >= 0.0);
    CHECK(std::max_element(imp.begin(), imp.end()) - imp.begin() == 0);

    // Independent recomputation from the stored node counts.
    std::vector<double> oracle(10, 0.0);
    for (const auto& t : m.trees) {
        const double root = t.nodes[0].count0 + t.nodes[0].count1;
        for (const auto& n : t.nodes) {
            if (n.is_leaf()) continue;
            const auto& l = t.nodes[static_cast<std::size_t>(n.left)];
            const auto& r = t.nodes[static_cast<std::size_t>(n.right)];
            const double nn = n.count0 + n.count1, nl = l.count0 + l.count1, nr = r.count0 + r.count1;
            auto g = [](double a, double b) {
                const double s = a + b;
                return 1.0 - (a / s) * (a / s) - (b / s) * (b / s);
            };
            const double dec = g(n.count0, n.count1) - (nl / nn) * g(l.count0, l.count1) - (nr / nn) * g(r.count0, r.count1);
            oracle[static_cast<std::size_t>(n.feature)] += (nn / root) * dec;
        }
    }
    const double total = std::accumulate(oracle.begin(), oracle.end(), 0.0);
    for (std::size_t i = 0; i < 10; ++i) CHECK(imp[i] == doctest::Approx(oracle[i] / total).epsilon(1e-9));
}

TEST_CASE("training is independent of thread count and matches the serial reference") {
    auto p = make_problem(11, 300, 12, 0.2, 60);
    auto h = small(40);
    const std::string serial = forest_to_json(reference::train_forest(p.X, p.y, h)).dump();
    const auto serial_probs = reference::forest_predict_proba(reference::train_forest(p.X, p.y, h), p.X);
    const int saved = max_threads();
    for (int threads : {1, 8}) {
        set_threads(threads);
        auto m = train_forest(p.X, p.y, h);
        CHECK(forest_to_json(m).dump() == serial);
        CHECK(forest_predict_proba(m, p.X) == serial_probs);
    }
    set_threads(saved);
}

TEST_CASE("different seeds give different forests") {
    auto p = make_problem(12, 100, 6, 0.2);
    CHECK_FALSE(train_forest(p.X, p.y, small(5, 1)) == train_forest(p.X, p.y, small(5, 2)));
}

TEST_CASE("JSON round trip") {
    auto p = make_problem(13, 100, 6, 0.2);
    auto h = small(15);
    h.features_per_split = FeatureSubset::fixed;
    h.fixed_features = 3;
    h.bootstrap = BootstrapMode::plain;
    auto m = train_forest(p.X, p.y, h);
    const auto path = std::filesystem::temp_directory_path() / "genolang_forest_rt.json";
    save_forest(m, path);
    auto back = load_forest(path);
    CHECK(back == m);
    CHECK(forest_predict_proba(back, p.X) == forest_predict_proba(m, p.X));
    std::filesystem::remove(path);
    CHECK_THROWS(forest_from_json(nlohmann::json{{"format", "something-else"}}));
}

}
