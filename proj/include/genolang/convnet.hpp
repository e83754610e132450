#pragma once

#include "genolang/featurize.hpp"
#include "genolang/seqio.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace genolang {

// One convolution stage: valid cross-correlation, ReLU, then pooling.
// pool_width 1 = no pooling, 0 = global max, w >= 2 = non-overlapping max of width w.
struct ConvLayerSpec {
    int filters = 32;
    int kernel_width = 8;
    int stride = 1;
    int pool_width = 1;

    friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

inline constexpr int global_max_pool = 0;

struct ConvNetArch {
    std::vector<ConvLayerSpec> conv_layers{{32, 8, 1, 4}, {64, 8, 1, global_max_pool}};
    int dense_embedding_dim = 64;
    std::size_t max_len = 2000;

    // Throws ErrorKind::architecture when a kernel or pool does not fit.
    void validate() const;
    std::size_t parameter_count() const;
    // Width of the flattened output of the last conv stage.
    std::size_t flat_width() const;

    friend bool operator==(const ConvNetArch&, const ConvNetArch&) = default;
};

// Conv stages as "filters:width:stride:pool" joined by ','; pool is an integer or "global".
ConvNetArch parse_conv_layers(std::string_view s, ConvNetArch base);
std::string conv_layers_string(const ConvNetArch& a);

// Flat parameter order:
//   for each conv layer: weights [filters][in_channels][kernel_width], bias [filters]
//   embedding dense: weights [embedding_dim][flat_width], bias [embedding_dim]
//   output dense:    weights [2][embedding_dim], bias [2]
struct ConvNetModel {
    ConvNetArch arch;
    std::vector<double> parameters;
    std::vector<double> training_log;   // mean training loss per epoch

    void validate() const;
    friend bool operator==(const ConvNetModel&, const ConvNetModel&) = default;
};

struct TrainConfig {
    int epochs = 20;
    int batch_size = 32;
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 42;
    int early_stop_patience = 0;        // 0 disables early stopping
    double validation_fraction = 0.1;  // held-out slice when early stopping
    // Draw minibatches so both classes are equally represented per epoch.
    bool balanced_batches = true;

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ForwardResult {
    std::array<double, 2> probabilities{};
    std::vector<double> embedding;
};

struct MomentumState {
    std::vector<double> velocity;
};

ConvNetModel init_convnet(const ConvNetArch& arch, std::uint64_t seed);

ForwardResult forward(const ConvNetModel& m, const OneHotTensor& x);
std::vector<double> embed(const ConvNetModel& m, const OneHotTensor& x);

// Cross-entropy of one example.
double example_loss(const ConvNetModel& m, const OneHotTensor& x, Label y);

// Writes d(loss)/d(parameters) for one example into `grad` (overwritten), returns the loss.
double example_gradient(const ConvNetModel& m, const OneHotTensor& x, Label y, std::span<double> grad);

// Mean loss and mean gradient over `batch` (indices into inputs). Examples are
// processed in parallel; accumulation follows batch order.
double batch_gradient(const ConvNetModel& m, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                      std::span<const std::size_t> batch, std::span<double> grad);

struct StepContext {
    int epoch = 0;
    std::size_t batch = 0;
};

// One SGD-with-momentum step: v <- momentum*v - lr*g; w <- w + v. Returns the batch loss.
double backward_and_step(ConvNetModel& m, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                         std::span<const std::size_t> batch, const TrainConfig& config, MomentumState& state,
                         StepContext ctx = {});

ConvNetModel train_convnet(const ConvNetArch& arch, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                           const TrainConfig& config);

std::vector<std::array<double, 2>> predict_convnet(const ConvNetModel& m, std::span<const OneHotTensor> inputs);

nlohmann::json convnet_to_json(const ConvNetModel& m);
ConvNetModel convnet_from_json(const nlohmann::json& j);
void save_convnet(const ConvNetModel& m, const std::filesystem::path& path);
ConvNetModel load_convnet(const std::filesystem::path& path);
// CSV `epoch,loss`.
std::string training_log_csv(const ConvNetModel& m);

} // namespace genolang
