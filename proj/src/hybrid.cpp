#include "genolang/hybrid.hpp"

#include "genolang/error.hpp"
#include "genolang/rng.hpp"
#include "genolang/text_io.hpp"

#include <cmath>

namespace genolang {

namespace {

constexpr std::uint64_t convnet_stream = 101;
constexpr std::uint64_t forest_stream = 202;

template <typename F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(stage) + ": " + e.what());
    }
}

std::vector<OneHotTensor> encode_all(std::span<const SequenceRecord> records, std::size_t max_len) {
    std::vector<OneHotTensor> out(records.size());
    const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = one_hot_encode(records[static_cast<std::size_t>(i)].sequence, max_len);
    }
    return out;
}

FeatureMatrix handcrafted_rows(const HybridModel& m, std::span<const SequenceRecord> records) {
    FeatureMatrix h = featurize_records_unweighted(records, m.config.kmer_specs, m.config.physchem);
    const auto cols = tfidf_columns(m.config.kmer_specs);
    if (!cols.empty()) tfidf_apply(h, cols, m.idf);
    return h;
}

// Embeddings (and convnet probabilities) for each record.
void run_convnet(const ConvNetModel& net, std::span<const SequenceRecord> records, std::vector<std::vector<double>>& embeddings,
                 std::vector<double>& probs) {
    embeddings.assign(records.size(), {});
    probs.assign(records.size(), 0.0);
    std::vector<std::string> errors(records.size());
    const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        try {
            auto res = forward(net, one_hot_encode(records[r].sequence, net.arch.max_len));
            embeddings[r] = std::move(res.embedding);
            probs[r] = res.probabilities[1];
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    }
    for (std::size_t r = 0; r < records.size(); ++r)
        if (!errors[r].empty()) fail(ErrorKind::dimension, "record '" + records[r].id + "': " + errors[r]);
}

FeatureMatrix assemble(const HybridModel& m, const std::vector<std::vector<double>>& embeddings, const FeatureMatrix* handcrafted,
                       std::size_t rows) {
    FeatureMatrix out;
    out.feature_names = m.feature_layout;
    out.rows = rows;
    out.values.assign(rows * out.cols(), 0.0);
    const bool with_embed = m.config.wiring == Wiring::embed_plus_handcrafted || m.config.wiring == Wiring::embed_only;
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = out.row(r);
        std::size_t c = 0;
        if (with_embed)
            for (double v : embeddings[r]) row[c++] = v;
        if (handcrafted)
            for (double v : handcrafted->row(r)) row[c++] = v;
        require(c == out.cols(), "assembled feature row width mismatch");
    }
    return out;
}

} // namespace

Wiring parse_wiring(std::string_view s) {
    if (s == "embed_plus_handcrafted") return Wiring::embed_plus_handcrafted;
    if (s == "embed_only") return Wiring::embed_only;
    if (s == "prob_average") return Wiring::prob_average;
    if (s == "handcrafted_only") return Wiring::handcrafted_only;
    if (s == "convnet_only") return Wiring::convnet_only;
    fail(ErrorKind::config, "unknown wiring '" + std::string(s) +
                                "' (embed_plus_handcrafted|embed_only|prob_average|handcrafted_only|convnet_only)");
}

const char* to_string(Wiring w) noexcept {
    switch (w) {
    case Wiring::embed_plus_handcrafted: return "embed_plus_handcrafted";
    case Wiring::embed_only: return "embed_only";
    case Wiring::prob_average: return "prob_average";
    case Wiring::handcrafted_only: return "handcrafted_only";
    case Wiring::convnet_only: return "convnet_only";
    }
    return "?";
}

bool HybridConfig::uses_handcrafted() const noexcept {
    return wiring == Wiring::embed_plus_handcrafted || wiring == Wiring::prob_average || wiring == Wiring::handcrafted_only;
}

void HybridConfig::validate() const {
    if (kmer_specs.empty()) fail(ErrorKind::config, "at least one k-mer size is required");
    for (const auto& k : kmer_specs) k.validate();
    physchem.validate();
    if (uses_convnet()) {
        try {
            arch.validate();
        } catch (const Error& e) {
            fail(ErrorKind::config, e.what());
        }
        train.validate();
    }
    if (uses_forest()) forest.validate();
}

void HybridModel::validate() const {
    require(convnet.has_value() == config.uses_convnet(), "model convnet presence does not match wiring");
    require(forest.has_value() == config.uses_forest(), "model forest presence does not match wiring");
    if (convnet) convnet->validate();
    if (forest) {
        forest->validate();
        require(forest->feature_names == feature_layout, "forest feature names differ from the model feature layout");
    }
    require(idf.size() == tfidf_columns(config.kmer_specs).size(), "idf vector length does not match tfidf columns");
}

std::vector<std::string> embedding_names(int dim) {
    std::vector<std::string> names;
    for (int i = 0; i < dim; ++i) names.push_back("e" + std::to_string(i));
    return names;
}

HybridModel train_hybrid(const LabeledDataset& d, const HybridConfig& c) {
    c.validate();
    require(d.records.size() == d.labels.size(), "dataset records/labels length mismatch");
    const auto positives = d.count(Label::related);
    if (positives == 0 || positives == d.size()) fail(ErrorKind::single_class, "training needs both classes present");

    HybridModel m;
    m.config = c;
    m.config.train.seed = mix_seed(c.seed, convnet_stream);
    m.config.forest.seed = mix_seed(c.seed, forest_stream);

    std::vector<std::vector<double>> embeddings;
    if (c.uses_convnet()) {
        m.convnet = in_stage("convnet training", [&] {
            const auto tensors = encode_all(d.records, c.arch.max_len);
            return train_convnet(c.arch, tensors, d.labels, m.config.train);
        });
        if (c.wiring == Wiring::embed_plus_handcrafted || c.wiring == Wiring::embed_only) {
            std::vector<double> unused;
            in_stage("embedding extraction", [&] { run_convnet(*m.convnet, d.records, embeddings, unused); });
        }
    }

    std::optional<FeatureMatrix> handcrafted;
    if (c.uses_handcrafted()) {
        handcrafted = in_stage("featurization", [&] {
            FeatureMatrix h = featurize_records_unweighted(d.records, c.kmer_specs, c.physchem);
            const auto cols = tfidf_columns(c.kmer_specs);
            if (!cols.empty()) m.idf = tfidf_weight(h, cols);
            return h;
        });
    }

    if (c.uses_forest()) {
        if (c.wiring == Wiring::embed_plus_handcrafted || c.wiring == Wiring::embed_only)
            m.feature_layout = embedding_names(c.arch.dense_embedding_dim);
        if (handcrafted)
            m.feature_layout.insert(m.feature_layout.end(), handcrafted->feature_names.begin(), handcrafted->feature_names.end());
        const FeatureMatrix X = assemble(m, embeddings, handcrafted ? &*handcrafted : nullptr, d.size());
        m.forest = in_stage("forest training", [&] {
            return train_forest(X, d.labels, m.config.forest);
        });
    }
    return m;
}

FeatureMatrix hybrid_features(const HybridModel& m, std::span<const SequenceRecord> records) {
    if (!m.forest) return {};
    std::vector<std::vector<double>> embeddings;
    std::vector<double> unused;
    if (m.config.wiring == Wiring::embed_plus_handcrafted || m.config.wiring == Wiring::embed_only)
        run_convnet(*m.convnet, records, embeddings, unused);
    std::optional<FeatureMatrix> handcrafted;
    if (m.config.uses_handcrafted()) handcrafted = handcrafted_rows(m, records);
    return assemble(m, embeddings, handcrafted ? &*handcrafted : nullptr, records.size());
}

std::vector<double> predict_proba(const HybridModel& m, std::span<const SequenceRecord> records) {
    if (records.empty()) return {};
    std::vector<std::vector<double>> embeddings;
    std::vector<double> p_cnn;
    if (m.convnet) run_convnet(*m.convnet, records, embeddings, p_cnn);
    if (m.config.wiring == Wiring::convnet_only) return p_cnn;

    std::optional<FeatureMatrix> handcrafted;
    if (m.config.uses_handcrafted()) handcrafted = handcrafted_rows(m, records);
    const FeatureMatrix X = assemble(m, embeddings, handcrafted ? &*handcrafted : nullptr, records.size());
    std::vector<double> p = forest_predict_proba(*m.forest, X);
    if (m.config.wiring == Wiring::prob_average)
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = (p_cnn[i] + p[i]) / 2.0;
    return p;
}

std::vector<PredictionRow> make_prediction_rows(std::span<const SequenceRecord> records, std::span<const double> probabilities, double threshold) {
    require(records.size() == probabilities.size(), "records/probabilities length mismatch");
    std::vector<PredictionRow> rows;
    rows.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const double p = probabilities[i];
        rows.push_back({records[i].id, p, p >= 0.5 ? 1 : 0, p > threshold});
    }
    return rows;
}

std::vector<PredictionRow> predict(const HybridModel& m, std::span<const SequenceRecord> records, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorKind::config, "threshold must lie strictly between 0 and 1");
    const auto p = predict_proba(m, records);
    return make_prediction_rows(records, p, threshold);
}

std::string prediction_csv(std::span<const PredictionRow> rows) {
    std::string out = "id,probability,predicted_label,selected\n";
    for (const auto& r : rows) {
        out += r.id;
        out += ',';
        out += format_fixed(r.probability, 6);
        out += r.predicted_label ? ",1," : ",0,";
        out += r.selected ? "1\n" : "0\n";
    }
    return out;
}

std::vector<PredictionRow> parse_prediction_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "id,probability,predicted_label,selected")
        fail(ErrorKind::schema, source + ": expected header 'id,probability,predicted_label,selected'");
    std::vector<PredictionRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto f = split_fields(lines[i], ',');
        const std::string where = source + ": line " + std::to_string(i + 1);
        PredictionRow r;
        long long label = 0, sel = 0;
        if (f.size() != 4 || !parse_double(f[1], r.probability) || !parse_int(f[2], label) || !parse_int(f[3], sel) ||
            (label != 0 && label != 1) || (sel != 0 && sel != 1) || !(r.probability >= 0.0 && r.probability <= 1.0))
            fail(ErrorKind::format, where + ": malformed prediction row");
        r.id = std::string(trim(f[0]));
        r.predicted_label = static_cast<int>(label);
        r.selected = sel == 1;
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json hybrid_to_json(const HybridModel& m) {
    using nlohmann::json;
    const auto& c = m.config;
    json specs = json::array();
    for (const auto& k : c.kmer_specs) specs.push_back({{"k", k.k}, {"normalization", to_string(k.normalization)}});
    json physchem = {{"charge_distribution", c.physchem.charge_distribution},
                     {"hydrophobicity_index", c.physchem.hydrophobicity_index},
                     {"molecular_weight", c.physchem.molecular_weight}};
    json train = {{"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size},
                  {"learning_rate", c.train.learning_rate},
                  {"momentum", c.train.momentum},
                  {"early_stop_patience", c.train.early_stop_patience},
                  {"validation_fraction", c.train.validation_fraction},
                  {"balanced_batches", c.train.balanced_batches},
                  {"seed", c.train.seed}};
    json arch = convnet_to_json(ConvNetModel{c.arch, {}, {}}).at("arch");
    json forest_h = forest_to_json(ForestModel{{}, {}, c.forest}).at("hyperparams");
    return json{{"format", "genolang-model"},
                {"version", 1},
                {"config",
                 {{"wiring", to_string(c.wiring)},
                  {"seed", c.seed},
                  {"kmer_specs", specs},
                  {"physchem", physchem},
                  {"arch", arch},
                  {"train", train},
                  {"forest", forest_h}}},
                {"feature_layout", m.feature_layout},
                {"idf", m.idf},
                {"convnet", m.convnet ? convnet_to_json(*m.convnet) : json(nullptr)},
                {"forest", m.forest ? forest_to_json(*m.forest) : json(nullptr)}};
}

HybridModel hybrid_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "genolang-model") fail(ErrorKind::format, "not a genolang model file (format tag)");
        if (j.at("version").get<int>() != 1) fail(ErrorKind::format, "unsupported model version");
        HybridModel m;
        const auto& c = j.at("config");
        m.config.wiring = parse_wiring(c.at("wiring").get<std::string>());
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.kmer_specs.clear();
        for (const auto& k : c.at("kmer_specs"))
            m.config.kmer_specs.push_back({k.at("k").get<int>(), parse_kmer_norm(k.at("normalization").get<std::string>())});
        const auto& pc = c.at("physchem");
        m.config.physchem.charge_distribution = pc.at("charge_distribution").get<std::array<double, 4>>();
        m.config.physchem.hydrophobicity_index = pc.at("hydrophobicity_index").get<std::array<double, 4>>();
        m.config.physchem.molecular_weight = pc.at("molecular_weight").get<std::array<double, 4>>();
        const auto& a = c.at("arch");
        m.config.arch.max_len = a.at("max_len").get<std::size_t>();
        m.config.arch.dense_embedding_dim = a.at("dense_embedding_dim").get<int>();
        m.config.arch.conv_layers.clear();
        for (const auto& l : a.at("conv_layers"))
            m.config.arch.conv_layers.push_back({l.at("filters").get<int>(), l.at("kernel_width").get<int>(), l.at("stride").get<int>(),
                                                 l.at("pool_width").get<int>()});
        const auto& t = c.at("train");
        m.config.train.epochs = t.at("epochs").get<int>();
        m.config.train.batch_size = t.at("batch_size").get<int>();
        m.config.train.learning_rate = t.at("learning_rate").get<double>();
        m.config.train.momentum = t.at("momentum").get<double>();
        m.config.train.early_stop_patience = t.at("early_stop_patience").get<int>();
        m.config.train.validation_fraction = t.at("validation_fraction").get<double>();
        m.config.train.balanced_batches = t.at("balanced_batches").get<bool>();
        m.config.train.seed = t.at("seed").get<std::uint64_t>();
        const auto& fh = c.at("forest");
        m.config.forest.n_trees = fh.at("n_trees").get<int>();
        m.config.forest.max_depth = fh.at("max_depth").get<int>();
        m.config.forest.min_samples_leaf = fh.at("min_samples_leaf").get<int>();
        parse_features_per_split(fh.at("features_per_split").get<std::string>(), m.config.forest);
        m.config.forest.bootstrap = parse_bootstrap(fh.at("bootstrap").get<std::string>());
        m.config.forest.seed = fh.at("seed").get<std::uint64_t>();

        m.feature_layout = j.at("feature_layout").get<std::vector<std::string>>();
        m.idf = j.at("idf").get<std::vector<double>>();
        if (!j.at("convnet").is_null()) m.convnet = convnet_from_json(j.at("convnet"));
        if (!j.at("forest").is_null()) m.forest = forest_from_json(j.at("forest"));
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, std::string("model file: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::contract || e.kind() == ErrorKind::config) fail(ErrorKind::format, std::string("model file: ") + e.what());
        throw;
    }
}

void save_hybrid(const HybridModel& m, const std::filesystem::path& path) {
    write_text_file(path, hybrid_to_json(m).dump() + "\n");
}

HybridModel load_hybrid(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, path.string() + ": " + e.what());
    }
    try {
        return hybrid_from_json(j);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

} // namespace genolang
