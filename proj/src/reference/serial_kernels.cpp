#include "genolang/reference.hpp"

#include "genolang/error.hpp"
#include "genolang/rng.hpp"

namespace genolang::reference {

FeatureMatrix featurize_records(std::span<const SequenceRecord> records, std::span<const KmerSpec> specs, const PhyschemTable& table) {
    FeatureMatrix m;
    m.feature_names = handcrafted_feature_names(specs);
    m.rows = records.size();
    m.values.assign(m.rows * m.cols(), 0.0);
    for (std::size_t r = 0; r < records.size(); ++r) {
        try {
            featurize_row(records[r].sequence, specs, table, m.row(r));
        } catch (const Error& e) {
            throw Error(e.kind(), "record '" + records[r].id + "': " + e.what());
        }
    }
    const auto cols = tfidf_columns(specs);
    if (!cols.empty()) tfidf_weight(m, cols);
    return m;
}

ForestModel train_forest(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h) {
    h.validate();
    ForestModel m;
    m.feature_names = X.feature_names;
    m.hyperparams = h;
    for (int t = 0; t < h.n_trees; ++t) m.trees.push_back(train_tree(X, y, h, mix_seed(h.seed, static_cast<std::uint64_t>(t))));
    return m;
}

std::vector<double> forest_predict_proba(const ForestModel& m, const FeatureMatrix& X) {
    std::vector<double> out;
    out.reserve(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out.push_back(genolang::forest_predict_proba(m, X.row(r)));
    return out;
}

double batch_gradient(const ConvNetModel& m, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                      std::span<const std::size_t> batch, std::span<double> grad) {
    require(!batch.empty(), "batch must be non-empty");
    require(inputs.size() == labels.size(), "inputs/labels length mismatch");
    require(grad.size() == m.parameters.size(), "gradient buffer has the wrong size");
    for (std::size_t b : batch) require(b < inputs.size(), "batch index out of range");
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> g(grad.size());
    double loss = 0.0;
    for (std::size_t b : batch) {
        loss += example_gradient(m, inputs[b], labels[b], g);
        for (std::size_t q = 0; q < g.size(); ++q) grad[q] += g[q];
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& v : grad) v *= inv;
    return loss * inv;
}

} // namespace genolang::reference
