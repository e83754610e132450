// Serial reference kernels against their OpenMP counterparts.
// Thread count for the parallel versions follows OMP_NUM_THREADS.

#include "genolang/convnet.hpp"
#include "genolang/featurize.hpp"
#include "genolang/forest.hpp"
#include "genolang/reference.hpp"
#include "genolang/synth.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

using namespace genolang;

namespace {

const SynthDataset& dataset() {
    static const SynthDataset d = [] {
        SynthSpec s;
        s.n_records = 1000;
        s.seq_len = 500;
        return generate(s);
    }();
    return d;
}

const std::vector<KmerSpec>& specs() {
    static const std::vector<KmerSpec> k{{3, KmerNorm::frequency}, {4, KmerNorm::frequency}};
    return k;
}

const FeatureMatrix& features() {
    static const FeatureMatrix m = featurize_records(dataset().data.records, specs(), PhyschemTable{});
    return m;
}

ForestHyperparams forest_params() {
    ForestHyperparams h;
    h.n_trees = 32;
    return h;
}

struct ConvSetup {
    ConvNetModel model;
    std::vector<OneHotTensor> inputs;
    std::vector<Label> labels;
    std::vector<std::size_t> batch;
};

const ConvSetup& conv_setup() {
    static const ConvSetup s = [] {
        ConvSetup c;
        ConvNetArch a;
        a.max_len = 500;
        a.conv_layers = {{16, 8, 1, 4}, {16, 8, 1, global_max_pool}};
        a.dense_embedding_dim = 16;
        c.model = init_convnet(a, 1);
        for (std::size_t i = 0; i < 64; ++i) {
            c.inputs.push_back(one_hot_encode(dataset().data.records[i].sequence, a.max_len));
            c.labels.push_back(dataset().data.labels[i]);
        }
        c.batch.resize(64);
        std::iota(c.batch.begin(), c.batch.end(), 0);
        return c;
    }();
    return s;
}

void BM_featurize_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(reference::featurize_records(dataset().data.records, specs(), PhyschemTable{}));
}
void BM_featurize_parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(featurize_records(dataset().data.records, specs(), PhyschemTable{}));
}

void BM_forest_train_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(reference::train_forest(features(), dataset().data.labels, forest_params()));
}
void BM_forest_train_parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(train_forest(features(), dataset().data.labels, forest_params()));
}

void BM_forest_predict_serial(benchmark::State& st) {
    const auto m = train_forest(features(), dataset().data.labels, forest_params());
    for (auto _ : st) benchmark::DoNotOptimize(reference::forest_predict_proba(m, features()));
}
void BM_forest_predict_parallel(benchmark::State& st) {
    const auto m = train_forest(features(), dataset().data.labels, forest_params());
    for (auto _ : st) benchmark::DoNotOptimize(forest_predict_proba(m, features()));
}

void BM_batch_gradient_serial(benchmark::State& st) {
    const auto& c = conv_setup();
    std::vector<double> g(c.model.parameters.size());
    for (auto _ : st) benchmark::DoNotOptimize(reference::batch_gradient(c.model, c.inputs, c.labels, c.batch, g));
}
void BM_batch_gradient_parallel(benchmark::State& st) {
    const auto& c = conv_setup();
    std::vector<double> g(c.model.parameters.size());
    for (auto _ : st) benchmark::DoNotOptimize(batch_gradient(c.model, c.inputs, c.labels, c.batch, g));
}

} // namespace

BENCHMARK(BM_featurize_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_featurize_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_forest_train_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_train_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_forest_predict_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_predict_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_batch_gradient_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_gradient_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
