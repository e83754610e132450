#pragma once

// Single-threaded reference versions of the OpenMP kernels. They share the
// per-item routines with the parallel versions and exist so tests and
// benchmarks can check that parallel results are bit-identical.

#include "genolang/convnet.hpp"
#include "genolang/featurize.hpp"
#include "genolang/forest.hpp"

#include <span>

namespace genolang::reference {

FeatureMatrix featurize_records(std::span<const SequenceRecord> records, std::span<const KmerSpec> specs, const PhyschemTable& table);

ForestModel train_forest(const FeatureMatrix& X, std::span<const Label> y, const ForestHyperparams& h);

std::vector<double> forest_predict_proba(const ForestModel& m, const FeatureMatrix& X);

double batch_gradient(const ConvNetModel& m, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                      std::span<const std::size_t> batch, std::span<double> grad);

} // namespace genolang::reference
