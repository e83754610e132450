#include "genolang/eval.hpp"

#include "genolang/error.hpp"
#include "genolang/rng.hpp"
#include "genolang/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace genolang {

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred) {
    require(y_true.size() == y_pred.size(), "confusion: label and prediction lengths differ");
    require(!y_true.empty(), "confusion: no samples");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        require((t == 0 || t == 1) && (p == 0 || p == 1), "confusion: values must be 0 or 1");
        if (t == 1) (p == 1 ? c.tp : c.fn)++;
        else (p == 1 ? c.fp : c.tn)++;
    }
    return c;
}

ConfusionCounts confusion(std::span<const Label> y_true, std::span<const int> y_pred) {
    std::vector<int> t(y_true.size());
    std::transform(y_true.begin(), y_true.end(), t.begin(), [](Label l) { return to_int(l); });
    return confusion(t, y_pred);
}

MetricReport metrics(const ConfusionCounts& c) {
    require(c.total() > 0, "metrics: empty confusion counts");
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    MetricReport r;
    r.counts = c;
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    r.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    return r;
}

std::optional<MetricSummary> summarize(std::span<const std::optional<double>> values) {
    std::vector<double> v;
    for (const auto& x : values)
        if (x) v.push_back(*x);
    if (v.empty()) return std::nullopt;
    MetricSummary s;
    s.defined_runs = v.size();
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    if (v.size() > 1) s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    s.best = s.max;
    return s;
}

StabilityReport aggregate_runs(std::vector<StabilityRun> runs) {
    StabilityReport r;
    r.runs = std::move(runs);
    std::vector<std::optional<double>> p, rc, f;
    for (const auto& run : r.runs) {
        p.push_back(run.report.precision);
        rc.push_back(run.report.recall);
        f.push_back(run.report.f1);
    }
    r.precision = summarize(p);
    r.recall = summarize(rc);
    r.f1 = summarize(f);
    double best = -1.0;
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const double v = r.runs[i].report.precision.value_or(-1.0);
        if (v > best) {
            best = v;
            r.best_run = i;
        }
    }
    return r;
}

StabilityReport stability(const RunProcedure& runner, int n_runs, std::uint64_t base_seed) {
    if (n_runs < 2) fail(ErrorKind::config, "stability needs at least 2 runs");
    std::vector<StabilityRun> runs;
    for (int i = 1; i <= n_runs; ++i) {
        const std::uint64_t seed = mix_seed(base_seed, static_cast<std::uint64_t>(i));
        try {
            runs.push_back({i, seed, runner(seed)});
        } catch (const Error& e) {
            throw Error(e.kind(), "stability run " + std::to_string(i) + ": " + e.what());
        }
    }
    return aggregate_runs(std::move(runs));
}

namespace {

std::string render(const std::optional<double>& v) { return v ? format_shortest(*v) : std::string("NA"); }

} // namespace

std::string metrics_csv(std::span<const StabilityRun> runs) {
    std::string out = "run,seed,tp,fp,tn,fn,precision,recall,f1\n";
    for (const auto& r : runs) {
        const auto& c = r.report.counts;
        out += std::to_string(r.run) + ',' + std::to_string(r.seed) + ',' + std::to_string(c.tp) + ',' + std::to_string(c.fp) + ',' +
               std::to_string(c.tn) + ',' + std::to_string(c.fn) + ',' + render(r.report.precision) + ',' + render(r.report.recall) +
               ',' + render(r.report.f1) + '\n';
    }
    return out;
}

std::string stability_csv(const StabilityReport& r) {
    std::string out = "metric,mean,std,min,max,best,defined_runs\n";
    auto row = [&](const char* name, const std::optional<MetricSummary>& s) {
        out += name;
        if (!s) {
            out += ",NA,NA,NA,NA,NA,0\n";
            return;
        }
        out += ',' + format_shortest(s->mean) + ',' + render(s->std) + ',' + format_shortest(s->min) + ',' + format_shortest(s->max) + ',' +
               format_shortest(s->best) + ',' + std::to_string(s->defined_runs) + '\n';
    };
    row("precision", r.precision);
    row("recall", r.recall);
    row("f1", r.f1);
    return out;
}

namespace {

std::vector<ImportanceRow> rank_features(const ForestModel& m, int top_n, const std::unordered_set<std::string>& learned) {
    require(top_n >= 1, "top_n must be >= 1");
    const auto imp = gini_importance(m);
    std::vector<std::size_t> order(imp.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (imp[a] != imp[b]) return imp[a] > imp[b];
        return m.feature_names[a] < m.feature_names[b];
    });
    const std::size_t n = std::min(order.size(), static_cast<std::size_t>(top_n));
    std::vector<ImportanceRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& name = m.feature_names[order[i]];
        rows.push_back({static_cast<int>(i + 1), name, imp[order[i]], learned.count(name) ? "learned" : "handcrafted"});
    }
    return rows;
}

} // namespace

std::vector<ImportanceRow> importance_report(const ForestModel& m, int top_n) { return rank_features(m, top_n, {}); }

std::vector<ImportanceRow> importance_report(const HybridModel& m, int top_n) {
    if (!m.forest) fail(ErrorKind::config, "model has no forest (convnet_only wiring); importance is undefined");
    std::unordered_set<std::string> learned;
    if (m.config.wiring == Wiring::embed_plus_handcrafted || m.config.wiring == Wiring::embed_only)
        for (auto& n : embedding_names(m.config.arch.dense_embedding_dim)) learned.insert(n);
    return rank_features(*m.forest, top_n, learned);
}

std::string importance_csv(std::span<const ImportanceRow> rows) {
    std::string out = "rank,feature,importance,origin\n";
    for (const auto& r : rows) out += std::to_string(r.rank) + ',' + r.feature + ',' + format_shortest(r.importance) + ',' + r.origin + '\n';
    return out;
}

} // namespace genolang
