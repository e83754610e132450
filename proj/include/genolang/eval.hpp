#pragma once

#include "genolang/forest.hpp"
#include "genolang/hybrid.hpp"
#include "genolang/seqio.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace genolang {

struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// std::nullopt is the undefined marker (a 0/0 ratio).
struct MetricReport {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    ConfusionCounts counts;
};

// Positive class is 1 (related).
ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred);
ConfusionCounts confusion(std::span<const Label> y_true, std::span<const int> y_pred);

// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = 2tp/(2tp+fp+fn).
MetricReport metrics(const ConfusionCounts& c);

struct MetricSummary {
    double mean = 0, min = 0, max = 0;
    std::optional<double> std;   // sample deviation, undefined for a single run
    double best = 0;             // max over runs
    std::size_t defined_runs = 0;
};

struct StabilityRun {
    int run = 0;
    std::uint64_t seed = 0;
    MetricReport report;
};

struct StabilityReport {
    std::vector<StabilityRun> runs;
    // Aggregates over runs where the metric is defined; nullopt when none are.
    std::optional<MetricSummary> precision, recall, f1;
    std::size_t best_run = 0;  // index of the run with highest precision
};

using RunProcedure = std::function<MetricReport(std::uint64_t seed)>;

// Summary over a list of (possibly undefined) values; sample standard deviation.
std::optional<MetricSummary> summarize(std::span<const std::optional<double>> values);

// Runs i = 1..n with seed mix_seed(base_seed, i), sequentially in run order.
StabilityReport stability(const RunProcedure& runner, int n_runs, std::uint64_t base_seed);
StabilityReport aggregate_runs(std::vector<StabilityRun> runs);

// `run,seed,tp,fp,tn,fn,precision,recall,f1`, undefined rendered as NA.
std::string metrics_csv(std::span<const StabilityRun> runs);
// `metric,mean,std,min,max,best,defined_runs`
std::string stability_csv(const StabilityReport& r);

struct ImportanceRow {
    int rank = 0;
    std::string feature;
    double importance = 0;
    std::string origin;  // handcrafted | learned
};

std::vector<ImportanceRow> importance_report(const ForestModel& m, int top_n = 20);
std::vector<ImportanceRow> importance_report(const HybridModel& m, int top_n = 20);
// `rank,feature,importance,origin`
std::string importance_csv(std::span<const ImportanceRow> rows);

} // namespace genolang
