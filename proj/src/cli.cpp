#include "genolang/cli.hpp"

#include "genolang/coexp.hpp"
#include "genolang/config.hpp"
#include "genolang/error.hpp"
#include "genolang/eval.hpp"
#include "genolang/featurize.hpp"
#include "genolang/hybrid.hpp"
#include "genolang/parallel.hpp"
#include "genolang/seqio.hpp"
#include "genolang/synth.hpp"
#include "genolang/text_io.hpp"

#include <ostream>
#include <vector>

namespace genolang::cli {

namespace {

const char* const usage_text =
    "usage: genolang <command> [--config FILE] [--key value ...]\n"
    "commands:\n"
    "  ingest      FASTA (positives/negatives) or labeled CSV -> <out>/data.csv\n"
    "  featurize   data -> <out>/features.csv\n"
    "  train       data -> <out>/model.json, <out>/train_log.csv\n"
    "  evaluate    model + data -> <out>/metrics.csv (runs >= 2: retrain per seed, <out>/stability.csv)\n"
    "  predict     model + input -> <out>/predictions.csv\n"
    "  importance  model -> <out>/importance.csv\n"
    "  coexp       predictions + edges + annotations + deg -> <out>/triage.txt, <out>/triage.csv\n"
    "  synth       -> <out>/data.csv, <out>/truth.csv\n"
    "Run 'genolang help' for the list of configuration keys.\n";

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::architecture:
    case ErrorKind::spec: return exit_bad_arguments;
    case ErrorKind::divergence: return exit_divergence;
    case ErrorKind::contract: return exit_internal;
    default: return exit_data_error;
    }
}

// Records inputs read and files written so the manifest can list digests.
class Session {
public:
    Session(std::string command, RunConfig cfg) : command_(std::move(command)), cfg_(std::move(cfg)) {}

    const RunConfig& cfg() const { return cfg_; }

    std::string read_input(const std::filesystem::path& path) {
        std::string text = read_text_file(path);
        inputs_.emplace_back(path.string(), sha256_hex(text));
        return text;
    }
    void note_input(const std::filesystem::path& path) { (void)read_input(path); }

    void write(std::string_view name, std::string_view contents) {
        write_text_file(cfg_.out_path(name), contents);
        outputs_.emplace_back(std::string(name), sha256_hex(contents));
    }
    void write_to(const std::filesystem::path& path, std::string_view contents) {
        write_text_file(path, contents);
        outputs_.emplace_back(path.string(), sha256_hex(contents));
    }

    void write_manifest() {
        std::string m = "# genolang manifest\n# command: " + command_ + "\n# version: " + artifact_version + "\n";
        for (const auto& [path, digest] : inputs_) m += "# input: " + path + " sha256:" + digest + '\n';
        for (const auto& [path, digest] : outputs_) m += "# output: " + path + " sha256:" + digest + '\n';
        m += cfg_.render();
        write_text_file(cfg_.out_path(command_ + ".manifest"), m);
    }

private:
    std::string command_;
    RunConfig cfg_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::pair<std::string, std::string>> outputs_;
};

std::filesystem::path required_path(const RunConfig& cfg, std::string_view key) {
    if (cfg.get(key).empty()) fail(ErrorKind::config, "missing required --" + std::string(key));
    return cfg.get_path(key);
}

LabeledDataset load_data(Session& s) {
    const auto path = required_path(s.cfg(), "data");
    return parse_labeled_csv(s.read_input(path), path.string());
}

HybridModel load_model(Session& s) {
    const auto path = s.cfg().model_path();
    s.note_input(path);
    return load_hybrid(path);
}

int cmd_synth(Session& s, std::ostream& out) {
    const SynthSpec spec = s.cfg().synth_spec();
    const SynthDataset d = generate(spec);
    s.write("data.csv", write_labeled_csv(d.data));
    s.write("truth.csv", ground_truth_csv(d.truth));
    out << "synth: " << d.data.size() << " records (" << d.data.count(Label::related) << " related, "
        << d.data.count(Label::not_related) << " not related), task " << to_string(spec.task) << '\n';
    return exit_ok;
}

int cmd_ingest(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    LabeledDataset d;
    if (!cfg.get("data").empty()) {
        d = load_data(s);
    } else {
        if (cfg.get("positives").empty() || cfg.get("negatives").empty())
            fail(ErrorKind::config, "ingest needs --data, or both --positives and --negatives");
        for (const auto& [key, label] : {std::pair{"positives", Label::related}, std::pair{"negatives", Label::not_related}}) {
            const auto path = cfg.get_path(key);
            std::vector<SequenceRecord> recs;
            try {
                recs = parse_fasta(s.read_input(path));
            } catch (const Error& e) {
                throw Error(e.kind(), path.string() + ": " + e.what());
            }
            for (auto& r : recs) d.push_back(std::move(r), label);
        }
        d.validate();
    }
    s.write("data.csv", write_labeled_csv(d));
    out << "ingest: " << d.size() << " records (" << d.count(Label::related) << " related, " << d.count(Label::not_related)
        << " not related)\n";
    return exit_ok;
}

int cmd_featurize(Session& s, std::ostream& out) {
    const HybridConfig hc = s.cfg().hybrid_config();
    const LabeledDataset d = load_data(s);
    const FeatureMatrix m = featurize_dataset(d, hc.kmer_specs, hc.physchem);
    s.write("features.csv", write_feature_csv(m, d.records));
    out << "featurize: " << m.rows << " rows x " << m.cols() << " features\n";
    return exit_ok;
}

int cmd_train(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    const HybridConfig hc = cfg.hybrid_config();
    const SplitSpec split = cfg.split_spec();
    const LabeledDataset d = load_data(s);
    const DatasetSplit parts = split_dataset(d, split);
    const HybridModel m = train_hybrid(parts.train, hc);
    s.write_to(cfg.model_path(), hybrid_to_json(m).dump() + "\n");
    if (m.convnet) s.write("train_log.csv", training_log_csv(*m.convnet));
    out << "train: wiring " << to_string(hc.wiring) << ", " << parts.train.size() << " training records ("
        << parts.train.count(Label::related) << " related), model " << cfg.model_path().string() << '\n';
    return exit_ok;
}

MetricReport score(const HybridModel& m, const LabeledDataset& test) {
    const auto probs = predict_proba(m, test.records);
    std::vector<int> pred(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) pred[i] = probs[i] >= 0.5 ? 1 : 0;
    return metrics(confusion(test.labels, pred));
}

std::string render_metric(const std::optional<double>& v) { return v ? format_fixed(*v, 4) : std::string("undefined"); }

int cmd_evaluate(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    const SplitSpec split = cfg.split_spec();
    const LabeledDataset d = load_data(s);
    const DatasetSplit parts = split_dataset(d, split);
    const int runs = static_cast<int>(cfg.get_int("runs"));

    if (runs == 1) {
        const HybridModel m = load_model(s);
        const MetricReport r = score(m, parts.test);
        std::vector<StabilityRun> rows{{1, m.config.seed, r}};
        s.write("metrics.csv", metrics_csv(rows));
        out << "evaluate: " << parts.test.size() << " held-out records; tp=" << r.counts.tp << " fp=" << r.counts.fp
            << " tn=" << r.counts.tn << " fn=" << r.counts.fn << "; precision " << render_metric(r.precision) << ", recall "
            << render_metric(r.recall) << ", f1 " << render_metric(r.f1) << '\n';
        return exit_ok;
    }

    const HybridConfig base = cfg.hybrid_config();
    const StabilityReport rep = stability(
        [&](std::uint64_t seed) {
            HybridConfig hc = base;
            hc.seed = seed;
            return score(train_hybrid(parts.train, hc), parts.test);
        },
        runs, base.seed);
    s.write("metrics.csv", metrics_csv(rep.runs));
    s.write("stability.csv", stability_csv(rep));
    out << "evaluate: " << runs << " runs on " << parts.test.size() << " held-out records\n";
    auto line = [&](const char* name, const std::optional<MetricSummary>& m) {
        out << "  " << name << ": ";
        if (!m) {
            out << "undefined in every run\n";
            return;
        }
        out << "mean " << format_fixed(m->mean, 4) << ", std " << (m->std ? format_fixed(*m->std, 4) : std::string("NA")) << ", best " << format_fixed(m->best, 4)
            << " (" << m->defined_runs << " runs defined)\n";
    };
    line("precision", rep.precision);
    line("recall", rep.recall);
    line("f1", rep.f1);
    out << "  best run: " << rep.runs[rep.best_run].run << '\n';
    return exit_ok;
}

int cmd_predict(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    const double threshold = cfg.get_double("threshold");
    if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorKind::config, "threshold must lie strictly between 0 and 1");
    const HybridModel m = load_model(s);
    const auto path = required_path(cfg, "input");
    s.note_input(path);
    const auto records = load_records(path);
    const auto rows = predict(m, records, threshold);
    s.write("predictions.csv", prediction_csv(rows));
    const auto selected = std::count_if(rows.begin(), rows.end(), [](const PredictionRow& r) { return r.selected; });
    out << "predict: " << rows.size() << " records, " << selected << " selected (probability > " << cfg.get("threshold") << ")\n";
    return exit_ok;
}

int cmd_importance(Session& s, std::ostream& out) {
    const HybridModel m = load_model(s);
    const auto rows = importance_report(m, static_cast<int>(s.cfg().get_int("top_n")));
    s.write("importance.csv", importance_csv(rows));
    out << "importance: top " << rows.size() << " features\n";
    for (const auto& r : rows) out << "  " << r.rank << ". " << r.feature << "  " << format_fixed(r.importance, 5) << "  " << r.origin << '\n';
    return exit_ok;
}

int cmd_coexp(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    const TriageOptions opt = cfg.triage_options();
    const auto pred_path = cfg.get("predictions").empty() ? cfg.out_path("predictions.csv") : cfg.get_path("predictions");
    const auto preds = parse_prediction_csv(s.read_input(pred_path), pred_path.string());
    const auto edges = required_path(cfg, "edges");
    const auto annotations = required_path(cfg, "annotations");
    const auto deg_path = required_path(cfg, "deg");
    LoadNetworkOptions lo;
    lo.strict_nodes = cfg.get_bool("strict_nodes");
    const CoexpNetwork net = parse_network(s.read_input(edges), s.read_input(annotations), lo, edges.string(), annotations.string());
    const DegTable deg = parse_deg_table(s.read_input(deg_path), deg_path.string());
    const TriageReport rep = triage(net, preds, deg, opt);
    const std::string text = triage_text(rep, net);
    s.write("triage.txt", text);
    s.write("triage.csv", triage_csv(rep));
    out << text;
    return exit_ok;
}

void print_keys(std::ostream& out) {
    out << usage_text << "\nconfiguration keys (config file 'key = value' or flag '--key value'):\n";
    for (const auto& k : RunConfig::keys()) {
        out << "  " << k.name << " (default '" << k.default_value << "'): " << k.help << '\n';
    }
}

RunConfig parse_arguments(std::span<const std::string> args) {
    RunConfig cfg;
    // Config file first so flags override it regardless of order.
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) fail(ErrorKind::config, "--config needs a path");
            apply_config_file(cfg, args[i + 1]);
        } else if (args[i].rfind("--config=", 0) == 0) {
            apply_config_file(cfg, args[i].substr(9));
        }
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) fail(ErrorKind::config, "unexpected argument '" + a + "'");
        std::string key = a.substr(2), value;
        const std::size_t eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= args.size() || args[i + 1].rfind("--", 0) == 0) fail(ErrorKind::config, "flag --" + key + " needs a value");
            value = args[++i];
        }
        std::replace(key.begin(), key.end(), '-', '_');
        if (key == "config") continue;
        cfg.set(key, value, "--" + key);
    }
    return cfg;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        err << usage_text;
        return exit_bad_arguments;
    }
    const std::string& command = args[0];
    if (command == "help" || command == "--help" || command == "-h") {
        print_keys(out);
        return exit_ok;
    }
    using Handler = int (*)(Session&, std::ostream&);
    static const std::vector<std::pair<std::string, Handler>> commands{
        {"ingest", cmd_ingest},   {"featurize", cmd_featurize},   {"train", cmd_train}, {"evaluate", cmd_evaluate},
        {"predict", cmd_predict}, {"importance", cmd_importance}, {"coexp", cmd_coexp}, {"synth", cmd_synth},
    };
    auto it = std::find_if(commands.begin(), commands.end(), [&](const auto& c) { return c.first == command; });
    if (it == commands.end()) {
        err << "genolang: unknown command '" << command << "'\n" << usage_text;
        return exit_bad_arguments;
    }

    try {
        RunConfig cfg = parse_arguments(args.subspan(1));
        cfg.validate();
        set_threads(static_cast<int>(cfg.get_int("threads")));
        Session session(command, std::move(cfg));
        const int code = it->second(session, out);
        session.write_manifest();
        return code;
    } catch (const Error& e) {
        err << "genolang " << command << ": " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "genolang " << command << ": internal error: " << e.what() << '\n';
        return exit_internal;
    }
}

} // namespace genolang::cli
