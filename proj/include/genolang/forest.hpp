#pragma once

#include "genolang/featurize.hpp"
#include "genolang/seqio.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace genolang {

enum class FeatureSubset { sqrt, log2, all, fixed };
enum class BootstrapMode { plain, class_balanced };

struct ForestHyperparams {
    int n_trees = 200;
    int max_depth = 0;          // 0 = unlimited
    int min_samples_leaf = 1;
    FeatureSubset features_per_split = FeatureSubset::sqrt;
    int fixed_features = 0;     // used when features_per_split == fixed
    BootstrapMode bootstrap = BootstrapMode::class_balanced;
    std::uint64_t seed = 42;

    void validate() const;
    std::size_t resolve_features(std::size_t feature_count) const;

    friend bool operator==(const ForestHyperparams&, const ForestHyperparams&) = default;
};

// "sqrt" | "log2" | "all" | positive integer
void parse_features_per_split(std::string_view s, ForestHyperparams& h);
std::string features_per_split_string(const ForestHyperparams& h);
BootstrapMode parse_bootstrap(std::string_view s);
const char* to_string(BootstrapMode b) noexcept;

struct TreeNode {
    int feature = -1;            // -1 marks a leaf
    double threshold = 0.0;      // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    std::uint32_t count0 = 0;    // bootstrap samples reaching the node, per class
    std::uint32_t count1 = 0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const TreeNode& leaf_for(std::span<const double> x) const;
    // Laplace-smoothed positive fraction of the reached leaf.
    double predict_proba(std::span<const double> x) const;
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::vector<std::string> feature_names;
    ForestHyperparams hyperparams;

    void validate() const;
    friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

double gini_impurity(std::span<const int> labels);
double gini_from_counts(double n0, double n1) noexcept;

// Grows one tree on a bootstrap drawn with `tree_seed`.
DecisionTree train_tree(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h, std::uint64_t tree_seed);

// Trees are trained in parallel; tree t uses mix_seed(h.seed, t).
ForestModel train_forest(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h);

double forest_predict_proba(const ForestModel& m, std::span<const double> x);
std::vector<double> forest_predict_proba(const ForestModel& m, const FeatureMatrix& X);

// Mean decrease in impurity, normalized to sum to one.
std::vector<double> gini_importance(const ForestModel& m);

nlohmann::json forest_to_json(const ForestModel& m);
ForestModel forest_from_json(const nlohmann::json& j);
void save_forest(const ForestModel& m, const std::filesystem::path& path);
ForestModel load_forest(const std::filesystem::path& path);

} // namespace genolang
