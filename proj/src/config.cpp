#include "genolang/config.hpp"

#include "genolang/error.hpp"
#include "genolang/text_io.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace genolang {

namespace {

const std::string positive_fraction_default = format_shortest(1.0 / 11.0);

} // namespace

const std::vector<ConfigKey>& RunConfig::keys() {
    static const std::vector<ConfigKey> k{
        // general
        {"threads", "1", "OpenMP threads; results do not depend on it"},
        {"seed", "42", "base seed for splitting and training"},
        {"out", ".", "output directory"},
        {"data", "", "labeled CSV (id,sequence,label)"},
        {"model", "", "model file (default <out>/model.json)"},
        {"input", "", "records to predict (FASTA or CSV with id,sequence)"},
        {"positives", "", "ingest: FASTA of related sequences"},
        {"negatives", "", "ingest: FASTA of unrelated sequences"},
        // seqio
        {"train_fraction", "0.8", "fraction of each class used for training"},
        {"stratified", "true", "stratify the split by class"},
        {"group_by_gene", "false", "keep records of one gene on the same side of the split"},
        // featurize
        {"kmer_sizes", "3", "comma-separated k values (1..6)"},
        {"kmer_norm", "frequency", "counts | frequency | tfidf"},
        {"physchem_table", "", "TSV of per-base property weights (default built-in table)"},
        // hybrid
        {"wiring", "embed_plus_handcrafted", "embed_plus_handcrafted | embed_only | prob_average | handcrafted_only | convnet_only"},
        {"threshold", "0.7", "selection threshold (strictly greater than)"},
        // forest
        {"n_trees", "200", "number of trees"},
        {"max_depth", "0", "maximum tree depth, 0 = unlimited"},
        {"min_samples_leaf", "1", "minimum samples per leaf"},
        {"features_per_split", "sqrt", "sqrt | log2 | all | <n>"},
        {"bootstrap", "class_balanced", "class_balanced | plain"},
        // convnet
        {"conv_layers", "32:8:1:4,64:8:1:global", "conv stages filters:width:stride:pool"},
        {"embedding_dim", "64", "dense embedding width"},
        {"max_len", "2000", "one-hot input length (5' prefix kept)"},
        {"epochs", "20", "training epochs"},
        {"batch_size", "32", "minibatch size"},
        {"learning_rate", "0.01", "SGD learning rate"},
        {"momentum", "0.9", "SGD momentum"},
        {"early_stop_patience", "0", "epochs without validation improvement before stopping, 0 = off"},
        {"validation_fraction", "0.1", "held-out slice for early stopping"},
        {"balanced_batches", "true", "resample the minority class each epoch"},
        // eval
        {"runs", "1", "evaluate: number of seeded training runs (>= 2 gives a stability report)"},
        {"top_n", "20", "importance: rows to report"},
        // coexp
        {"predictions", "", "coexp: prediction CSV (default <out>/predictions.csv)"},
        {"edges", "", "coexp: edges TSV"},
        {"annotations", "", "coexp: annotations TSV"},
        {"deg", "", "coexp: DEG TSV"},
        {"hops", "1", "coexp: neighborhood radius"},
        {"keywords", "", "coexp: ';'-separated keywords (default built-in list)"},
        {"strict_nodes", "false", "coexp: reject edges naming unannotated genes"},
        {"significant_only", "true", "coexp: count only significant DEG rows"},
        // synth
        {"task", "composition_motif", "synth: composition_motif | positional_motif"},
        {"n_records", "2000", "synth: number of records"},
        {"seq_len", "500", "synth: sequence length"},
        {"positive_fraction", positive_fraction_default.c_str(), "synth: fraction of positives"},
        {"planted_kmer", "TTT", "synth: k-mer boosted in positives"},
        {"effect_strength", "1.0", "synth: planting strength in (0, 1]"},
        {"motif", "TGCATTACGGAC", "synth: 12-base positional motif"},
        {"motif_offset", "-1", "synth: motif position, -1 = centred"},
    };
    return k;
}

bool RunConfig::is_known(std::string_view key) {
    const auto& k = keys();
    return std::any_of(k.begin(), k.end(), [&](const ConfigKey& c) { return key == c.name; });
}

RunConfig::RunConfig() {
    for (const auto& k : keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(std::string_view key, std::string_view value, std::string_view source) {
    if (!is_known(key)) fail(ErrorKind::config, std::string(source) + ": unknown configuration key '" + std::string(key) + "'");
    values_[std::string(key)] = std::string(trim(value));
}

const std::string& RunConfig::get(std::string_view key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorKind::contract, "unknown configuration key '" + std::string(key) + "'");
    return it->second;
}

long long RunConfig::get_int(std::string_view key) const {
    long long v = 0;
    if (!parse_int(get(key), v)) fail(ErrorKind::config, std::string(key) + ": expected an integer, got '" + get(key) + "'");
    return v;
}

std::uint64_t RunConfig::get_u64(std::string_view key) const {
    const std::string& s = get(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        fail(ErrorKind::config, std::string(key) + ": expected an unsigned integer, got '" + s + "'");
    return v;
}

double RunConfig::get_double(std::string_view key) const {
    double v = 0;
    if (!parse_double(get(key), v)) fail(ErrorKind::config, std::string(key) + ": expected a number, got '" + get(key) + "'");
    return v;
}

bool RunConfig::get_bool(std::string_view key) const {
    const std::string& s = get(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(ErrorKind::config, std::string(key) + ": expected true or false, got '" + s + "'");
}

std::filesystem::path RunConfig::get_path(std::string_view key) const { return std::filesystem::path(get(key)); }

std::filesystem::path RunConfig::out_path(std::string_view name) const { return get_path("out") / std::string(name); }

std::filesystem::path RunConfig::model_path() const {
    return get("model").empty() ? out_path("model.json") : get_path("model");
}

SplitSpec RunConfig::split_spec() const {
    SplitSpec s;
    s.train_fraction = get_double("train_fraction");
    s.stratified = get_bool("stratified");
    s.group_by_gene = get_bool("group_by_gene");
    s.seed = get_u64("seed");
    s.validate();
    return s;
}

namespace {

int to_int_checked(long long v, std::string_view key) {
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        fail(ErrorKind::config, std::string(key) + ": value out of range");
    return static_cast<int>(v);
}

} // namespace

HybridConfig RunConfig::hybrid_config() const {
    HybridConfig c;
    c.wiring = parse_wiring(get("wiring"));
    c.seed = get_u64("seed");

    c.kmer_specs.clear();
    const KmerNorm norm = parse_kmer_norm(get("kmer_norm"));
    for (auto part : split_fields(get("kmer_sizes"), ',')) {
        long long k = 0;
        if (!parse_int(part, k)) fail(ErrorKind::config, "kmer_sizes: bad value '" + std::string(part) + "'");
        KmerSpec spec{to_int_checked(k, "kmer_sizes"), norm};
        spec.validate();
        if (std::any_of(c.kmer_specs.begin(), c.kmer_specs.end(), [&](const KmerSpec& s) { return s.k == spec.k; }))
            fail(ErrorKind::config, "kmer_sizes: duplicate k=" + std::to_string(spec.k));
        c.kmer_specs.push_back(spec);
    }
    if (!get("physchem_table").empty()) {
        try {
            c.physchem = load_physchem_table(get_path("physchem_table"));
        } catch (const Error& e) {
            fail(ErrorKind::config, std::string("physchem_table: ") + e.what());
        }
    }

    c.arch = parse_conv_layers(get("conv_layers"), c.arch);
    c.arch.dense_embedding_dim = to_int_checked(get_int("embedding_dim"), "embedding_dim");
    const long long max_len = get_int("max_len");
    if (max_len < 1) fail(ErrorKind::config, "max_len must be positive");
    c.arch.max_len = static_cast<std::size_t>(max_len);

    c.train.epochs = to_int_checked(get_int("epochs"), "epochs");
    c.train.batch_size = to_int_checked(get_int("batch_size"), "batch_size");
    c.train.learning_rate = get_double("learning_rate");
    c.train.momentum = get_double("momentum");
    c.train.early_stop_patience = to_int_checked(get_int("early_stop_patience"), "early_stop_patience");
    c.train.validation_fraction = get_double("validation_fraction");
    c.train.balanced_batches = get_bool("balanced_batches");

    c.forest.n_trees = to_int_checked(get_int("n_trees"), "n_trees");
    c.forest.max_depth = to_int_checked(get_int("max_depth"), "max_depth");
    c.forest.min_samples_leaf = to_int_checked(get_int("min_samples_leaf"), "min_samples_leaf");
    parse_features_per_split(get("features_per_split"), c.forest);
    c.forest.bootstrap = parse_bootstrap(get("bootstrap"));
    c.validate();
    return c;
}

SynthSpec RunConfig::synth_spec() const {
    SynthSpec s;
    s.task = parse_synth_task(get("task"));
    const long long n = get_int("n_records"), len = get_int("seq_len");
    if (n < 1 || len < 1) fail(ErrorKind::config, "n_records and seq_len must be positive");
    s.n_records = static_cast<std::size_t>(n);
    s.seq_len = static_cast<std::size_t>(len);
    s.positive_fraction = get_double("positive_fraction");
    s.planted_kmer = get("planted_kmer");
    s.effect_strength = get_double("effect_strength");
    s.motif = get("motif");
    s.motif_offset = get_int("motif_offset");
    s.seed = get_u64("seed");
    try {
        s.validate();
    } catch (const Error& e) {
        fail(ErrorKind::config, e.what());
    }
    return s;
}

TriageOptions RunConfig::triage_options() const {
    TriageOptions t;
    t.threshold = get_double("threshold");
    if (!(t.threshold > 0.0 && t.threshold < 1.0)) fail(ErrorKind::config, "threshold must lie strictly between 0 and 1");
    t.hops = to_int_checked(get_int("hops"), "hops");
    if (t.hops < 0) fail(ErrorKind::config, "hops must be >= 0");
    t.significant_only = get_bool("significant_only");
    if (!get("keywords").empty()) {
        t.keywords.clear();
        for (auto k : split_fields(get("keywords"), ';'))
            if (!trim(k).empty()) t.keywords.emplace_back(trim(k));
        if (t.keywords.empty()) fail(ErrorKind::config, "keywords: list is empty");
    }
    return t;
}

void RunConfig::validate() const {
    if (get_int("threads") < 1) fail(ErrorKind::config, "threads must be >= 1");
    (void)get_u64("seed");
    (void)split_spec();
    (void)hybrid_config();
    (void)synth_spec();
    (void)triage_options();
    if (get_int("runs") < 1) fail(ErrorKind::config, "runs must be >= 1");
    if (get_int("top_n") < 1) fail(ErrorKind::config, "top_n must be >= 1");
    (void)get_bool("strict_nodes");
}

std::string RunConfig::render() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + '\n';
    return out;
}

void apply_config_text(RunConfig& cfg, std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        const std::string where = source + ": line " + std::to_string(i + 1);
        if (eq == std::string_view::npos) fail(ErrorKind::config, where + ": expected key = value");
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) fail(ErrorKind::config, where + ": empty key");
        cfg.set(key, line.substr(eq + 1), where);
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error&) {
        fail(ErrorKind::config, "cannot read config file '" + path.string() + "'");
    }
    apply_config_text(cfg, text, path.string());
}

} // namespace genolang
