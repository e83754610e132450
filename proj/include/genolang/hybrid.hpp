#pragma once

#include "genolang/convnet.hpp"
#include "genolang/featurize.hpp"
#include "genolang/forest.hpp"
#include "genolang/seqio.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace genolang {

// How the convnet and the forest are combined.
//   embed_plus_handcrafted  forest over [embedding | handcrafted features]
//   embed_only              forest over the embedding alone
//   prob_average            (p_convnet + p_forest(handcrafted)) / 2
//   handcrafted_only        forest over handcrafted features, no convnet (baseline)
//   convnet_only            standalone convnet classifier (baseline)
enum class Wiring { embed_plus_handcrafted, embed_only, prob_average, handcrafted_only, convnet_only };

Wiring parse_wiring(std::string_view s);
const char* to_string(Wiring w) noexcept;

struct HybridConfig {
    Wiring wiring = Wiring::embed_plus_handcrafted;
    std::vector<KmerSpec> kmer_specs{KmerSpec{}};
    PhyschemTable physchem;
    ConvNetArch arch;
    TrainConfig train;
    ForestHyperparams forest;
    std::uint64_t seed = 42;   // the sub-model seeds are derived from this

    bool uses_convnet() const noexcept { return wiring != Wiring::handcrafted_only; }
    bool uses_forest() const noexcept { return wiring != Wiring::convnet_only; }
    bool uses_handcrafted() const noexcept;
    void validate() const;
    friend bool operator==(const HybridConfig&, const HybridConfig&) = default;
};

struct HybridModel {
    HybridConfig config;
    std::optional<ConvNetModel> convnet;
    std::optional<ForestModel> forest;
    std::vector<std::string> feature_layout;  // forest input columns
    std::vector<double> idf;                  // fitted on training data for tfidf k-mer columns

    void validate() const;
    friend bool operator==(const HybridModel&, const HybridModel&) = default;
};

struct PredictionRow {
    std::string id;
    double probability = 0.0;
    int predicted_label = 0;  // 1 iff probability >= 0.5
    bool selected = false;    // probability > threshold
};

std::vector<std::string> embedding_names(int dim);

HybridModel train_hybrid(const LabeledDataset& d, const HybridConfig& c);

// Forest input rows for `records` per the model's wiring (empty matrix for convnet_only).
FeatureMatrix hybrid_features(const HybridModel& m, std::span<const SequenceRecord> records);

std::vector<double> predict_proba(const HybridModel& m, std::span<const SequenceRecord> records);
std::vector<PredictionRow> predict(const HybridModel& m, std::span<const SequenceRecord> records, double threshold = 0.7);
std::vector<PredictionRow> make_prediction_rows(std::span<const SequenceRecord> records, std::span<const double> probabilities, double threshold);

// CSV `id,probability,predicted_label,selected`, probability with 6 decimals.
std::string prediction_csv(std::span<const PredictionRow> rows);
std::vector<PredictionRow> parse_prediction_csv(std::string_view text, const std::string& source = "<memory>");

nlohmann::json hybrid_to_json(const HybridModel& m);
HybridModel hybrid_from_json(const nlohmann::json& j);
void save_hybrid(const HybridModel& m, const std::filesystem::path& path);
HybridModel load_hybrid(const std::filesystem::path& path);

} // namespace genolang
