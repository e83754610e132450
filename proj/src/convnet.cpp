#include "genolang/convnet.hpp"

#include "genolang/error.hpp"
#include "genolang/rng.hpp"
#include "genolang/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace genolang {

namespace {

struct LayerShape {
    std::size_t in_channels, in_len;
    std::size_t filters, kernel, stride;
    std::size_t conv_len;
    int pool;             // as in ConvLayerSpec::pool_width
    std::size_t out_len;  // after pooling
    std::size_t w_offset, b_offset;
};

struct Layout {
    std::vector<LayerShape> conv;
    std::size_t flat = 0;
    std::size_t embed = 0;
    std::size_t dense_w = 0, dense_b = 0, out_w = 0, out_b = 0;
    std::size_t total = 0;
};

Layout make_layout(const ConvNetArch& a) {
    if (a.conv_layers.empty()) fail(ErrorKind::architecture, "at least one conv layer is required");
    if (a.dense_embedding_dim < 1) fail(ErrorKind::architecture, "dense_embedding_dim must be positive");
    if (a.max_len < 1) fail(ErrorKind::architecture, "max_len must be positive");
    Layout l;
    std::size_t channels = OneHotTensor::channels, len = a.max_len, offset = 0;
    for (std::size_t i = 0; i < a.conv_layers.size(); ++i) {
        const auto& s = a.conv_layers[i];
        const std::string where = "conv layer " + std::to_string(i + 1) + ": ";
        if (s.filters < 1 || s.kernel_width < 1 || s.stride < 1 || s.pool_width < 0)
            fail(ErrorKind::architecture, where + "filters, kernel_width and stride must be positive");
        if (static_cast<std::size_t>(s.kernel_width) > len)
            fail(ErrorKind::architecture, where + "kernel width " + std::to_string(s.kernel_width) + " exceeds input length " + std::to_string(len));
        LayerShape sh{};
        sh.in_channels = channels;
        sh.in_len = len;
        sh.filters = static_cast<std::size_t>(s.filters);
        sh.kernel = static_cast<std::size_t>(s.kernel_width);
        sh.stride = static_cast<std::size_t>(s.stride);
        sh.conv_len = (len - sh.kernel) / sh.stride + 1;
        sh.pool = s.pool_width;
        if (s.pool_width == global_max_pool) sh.out_len = 1;
        else sh.out_len = sh.conv_len / static_cast<std::size_t>(s.pool_width);
        if (sh.out_len == 0)
            fail(ErrorKind::architecture, where + "pool width " + std::to_string(s.pool_width) + " exceeds conv output length " + std::to_string(sh.conv_len));
        sh.w_offset = offset;
        offset += sh.filters * sh.in_channels * sh.kernel;
        sh.b_offset = offset;
        offset += sh.filters;
        l.conv.push_back(sh);
        channels = sh.filters;
        len = sh.out_len;
    }
    l.flat = channels * len;
    l.embed = static_cast<std::size_t>(a.dense_embedding_dim);
    l.dense_w = offset;
    offset += l.embed * l.flat;
    l.dense_b = offset;
    offset += l.embed;
    l.out_w = offset;
    offset += 2 * l.embed;
    l.out_b = offset;
    offset += 2;
    l.total = offset;
    return l;
}

// Activations of one forward pass, kept for the backward pass.
struct Trace {
    std::vector<std::vector<double>> conv;     // pre-activation, filters x conv_len
    std::vector<std::vector<double>> pooled;   // filters x out_len (post-ReLU, post-pool)
    std::vector<std::vector<std::size_t>> argmax;  // conv position chosen per pooled cell
    std::vector<double> hidden_pre;
    std::vector<double> hidden;
    std::array<double, 2> logits{};
    std::array<double, 2> probs{};
};

// Valid cross-correlation; `in` is channel-major in_channels x in_len.
template <typename T>
void conv_forward(const LayerShape& s, const T* in, const double* params, std::vector<double>& z) {
    z.assign(s.filters * s.conv_len, 0.0);
    const double* w = params + s.w_offset;
    const double* b = params + s.b_offset;
    for (std::size_t f = 0; f < s.filters; ++f) {
        double* zf = z.data() + f * s.conv_len;
        std::fill(zf, zf + s.conv_len, b[f]);
        for (std::size_t c = 0; c < s.in_channels; ++c) {
            const T* row = in + c * s.in_len;
            for (std::size_t j = 0; j < s.kernel; ++j) {
                const double wv = w[(f * s.in_channels + c) * s.kernel + j];
                if (wv == 0.0) continue;
                if (s.stride == 1) {
                    const T* src = row + j;
                    for (std::size_t i = 0; i < s.conv_len; ++i) zf[i] += wv * static_cast<double>(src[i]);
                } else {
                    for (std::size_t i = 0; i < s.conv_len; ++i) zf[i] += wv * static_cast<double>(row[i * s.stride + j]);
                }
            }
        }
    }
}

void relu_pool_forward(const LayerShape& s, const std::vector<double>& z, std::vector<double>& out, std::vector<std::size_t>& argmax) {
    out.assign(s.filters * s.out_len, 0.0);
    argmax.assign(s.filters * s.out_len, 0);
    const std::size_t width = s.pool == global_max_pool ? s.conv_len : static_cast<std::size_t>(s.pool);
    for (std::size_t f = 0; f < s.filters; ++f) {
        const double* zf = z.data() + f * s.conv_len;
        for (std::size_t o = 0; o < s.out_len; ++o) {
            const std::size_t start = o * width;
            std::size_t best = start;
            double best_v = std::max(0.0, zf[start]);
            for (std::size_t i = start + 1; i < start + width; ++i) {
                const double v = std::max(0.0, zf[i]);
                if (v > best_v) {
                    best_v = v;
                    best = i;
                }
            }
            out[f * s.out_len + o] = best_v;
            argmax[f * s.out_len + o] = best;
        }
    }
}

void run_forward(const Layout& l, const std::vector<double>& p, const OneHotTensor& x, Trace& t) {
    const std::size_t n = l.conv.size();
    t.conv.resize(n);
    t.pooled.resize(n);
    t.argmax.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) conv_forward(l.conv[0], x.data.data(), p.data(), t.conv[0]);
        else conv_forward(l.conv[i], t.pooled[i - 1].data(), p.data(), t.conv[i]);
        relu_pool_forward(l.conv[i], t.conv[i], t.pooled[i], t.argmax[i]);
    }
    const std::vector<double>& flat = t.pooled.back();
    t.hidden_pre.assign(l.embed, 0.0);
    t.hidden.assign(l.embed, 0.0);
    for (std::size_t e = 0; e < l.embed; ++e) {
        const double* w = p.data() + l.dense_w + e * l.flat;
        double acc = p[l.dense_b + e];
        for (std::size_t k = 0; k < l.flat; ++k) acc += w[k] * flat[k];
        t.hidden_pre[e] = acc;
        t.hidden[e] = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t o = 0; o < 2; ++o) {
        const double* w = p.data() + l.out_w + o * l.embed;
        double acc = p[l.out_b + o];
        for (std::size_t e = 0; e < l.embed; ++e) acc += w[e] * t.hidden[e];
        t.logits[o] = acc;
    }
    const double mx = std::max(t.logits[0], t.logits[1]);
    const double e0 = std::exp(t.logits[0] - mx), e1 = std::exp(t.logits[1] - mx);
    t.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double cross_entropy(const Trace& t, Label y) {
    // log-softmax form stays finite for saturated logits
    const double mx = std::max(t.logits[0], t.logits[1]);
    const double lse = mx + std::log(std::exp(t.logits[0] - mx) + std::exp(t.logits[1] - mx));
    return lse - t.logits[static_cast<std::size_t>(to_int(y))];
}

void check_input(const ConvNetModel& m, const OneHotTensor& x) {
    if (x.max_len != m.arch.max_len || x.data.size() != OneHotTensor::channels * x.max_len)
        fail(ErrorKind::dimension, "input length " + std::to_string(x.max_len) + " does not match model max_len " + std::to_string(m.arch.max_len));
}

} // namespace

void ConvNetArch::validate() const { (void)make_layout(*this); }

std::size_t ConvNetArch::parameter_count() const { return make_layout(*this).total; }

std::size_t ConvNetArch::flat_width() const { return make_layout(*this).flat; }

ConvNetArch parse_conv_layers(std::string_view s, ConvNetArch base) {
    base.conv_layers.clear();
    for (std::string_view layer : split_fields(s, ',')) {
        const auto parts = split_fields(trim(layer), ':');
        if (parts.size() != 4)
            fail(ErrorKind::config, "conv layer '" + std::string(layer) + "' must be filters:width:stride:pool");
        long long v[3];
        for (int i = 0; i < 3; ++i)
            if (!parse_int(parts[static_cast<std::size_t>(i)], v[i]) || v[i] < 1)
                fail(ErrorKind::config, "conv layer '" + std::string(layer) + "': fields must be positive integers");
        long long pool = 0;
        if (trim(parts[3]) == "global") pool = global_max_pool;
        else if (!parse_int(parts[3], pool) || pool < 1)
            fail(ErrorKind::config, "conv layer '" + std::string(layer) + "': pool must be a positive integer or 'global'");
        base.conv_layers.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(pool)});
    }
    return base;
}

std::string conv_layers_string(const ConvNetArch& a) {
    std::string out;
    for (const auto& l : a.conv_layers) {
        if (!out.empty()) out += ',';
        out += std::to_string(l.filters) + ':' + std::to_string(l.kernel_width) + ':' + std::to_string(l.stride) + ':' +
               (l.pool_width == global_max_pool ? std::string("global") : std::to_string(l.pool_width));
    }
    return out;
}

void ConvNetModel::validate() const {
    const Layout l = make_layout(arch);
    require(parameters.size() == l.total, "convnet parameter count does not match architecture");
    for (double v : parameters) require(std::isfinite(v), "non-finite convnet parameter");
}

void TrainConfig::validate() const {
    if (epochs < 1) fail(ErrorKind::config, "epochs must be >= 1");
    if (batch_size < 1) fail(ErrorKind::config, "batch_size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail(ErrorKind::config, "learning_rate must be finite and >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::config, "momentum must lie in [0, 1)");
    if (early_stop_patience < 0) fail(ErrorKind::config, "early_stop_patience must be >= 0");
    if (early_stop_patience > 0 && !(validation_fraction > 0.0 && validation_fraction < 1.0))
        fail(ErrorKind::config, "validation_fraction must lie in (0, 1) when early stopping");
}

ConvNetModel init_convnet(const ConvNetArch& arch, std::uint64_t seed) {
    const Layout l = make_layout(arch);
    ConvNetModel m;
    m.arch = arch;
    m.parameters.assign(l.total, 0.0);
    Rng rng(seed);
    auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i) m.parameters[offset + i] = rng.uniform(-bound, bound);
    };
    for (const auto& s : l.conv) fill(s.w_offset, s.filters * s.in_channels * s.kernel, s.in_channels * s.kernel);
    fill(l.dense_w, l.embed * l.flat, l.flat);
    fill(l.out_w, 2 * l.embed, l.embed);
    return m;
}

ForwardResult forward(const ConvNetModel& m, const OneHotTensor& x) {
    check_input(m, x);
    const Layout l = make_layout(m.arch);
    Trace t;
    run_forward(l, m.parameters, x, t);
    return {t.probs, std::move(t.hidden)};
}

std::vector<double> embed(const ConvNetModel& m, const OneHotTensor& x) { return forward(m, x).embedding; }

double example_loss(const ConvNetModel& m, const OneHotTensor& x, Label y) {
    check_input(m, x);
    const Layout l = make_layout(m.arch);
    Trace t;
    run_forward(l, m.parameters, x, t);
    return cross_entropy(t, y);
}

double example_gradient(const ConvNetModel& m, const OneHotTensor& x, Label y, std::span<double> grad) {
    check_input(m, x);
    const Layout l = make_layout(m.arch);
    require(grad.size() == l.total, "gradient buffer has the wrong size");
    const std::vector<double>& p = m.parameters;
    Trace t;
    run_forward(l, p, x, t);
    std::fill(grad.begin(), grad.end(), 0.0);

    // softmax + cross-entropy
    std::array<double, 2> dlogit = t.probs;
    dlogit[static_cast<std::size_t>(to_int(y))] -= 1.0;

    std::vector<double> dhidden(l.embed, 0.0);
    for (std::size_t o = 0; o < 2; ++o) {
        grad[l.out_b + o] = dlogit[o];
        for (std::size_t e = 0; e < l.embed; ++e) {
            grad[l.out_w + o * l.embed + e] = dlogit[o] * t.hidden[e];
            dhidden[e] += dlogit[o] * p[l.out_w + o * l.embed + e];
        }
    }

    const std::vector<double>& flat = t.pooled.back();
    std::vector<double> dflat(l.flat, 0.0);
    for (std::size_t e = 0; e < l.embed; ++e) {
        const double dpre = t.hidden_pre[e] > 0.0 ? dhidden[e] : 0.0;
        if (dpre == 0.0) continue;
        grad[l.dense_b + e] = dpre;
        const double* w = p.data() + l.dense_w + e * l.flat;
        double* gw = grad.data() + l.dense_w + e * l.flat;
        for (std::size_t k = 0; k < l.flat; ++k) {
            gw[k] = dpre * flat[k];
            dflat[k] += dpre * w[k];
        }
    }

    std::vector<double> dout = std::move(dflat);  // gradient w.r.t. the current stage's pooled output
    std::vector<double> dz;
    std::vector<double> din;
    for (std::size_t li = l.conv.size(); li-- > 0;) {
        const LayerShape& s = l.conv[li];
        // route through max pooling and ReLU
        dz.assign(s.filters * s.conv_len, 0.0);
        for (std::size_t f = 0; f < s.filters; ++f)
            for (std::size_t o = 0; o < s.out_len; ++o) {
                const std::size_t pos = t.argmax[li][f * s.out_len + o];
                if (t.conv[li][f * s.conv_len + pos] > 0.0) dz[f * s.conv_len + pos] += dout[f * s.out_len + o];
            }

        const bool need_input_grad = li > 0;
        if (need_input_grad) din.assign(s.in_channels * s.in_len, 0.0);
        const double* w = p.data() + s.w_offset;
        for (std::size_t f = 0; f < s.filters; ++f) {
            const double* dzf = dz.data() + f * s.conv_len;
            double bsum = 0.0;
            for (std::size_t i = 0; i < s.conv_len; ++i) bsum += dzf[i];
            grad[s.b_offset + f] = bsum;
            for (std::size_t c = 0; c < s.in_channels; ++c) {
                for (std::size_t j = 0; j < s.kernel; ++j) {
                    const std::size_t widx = (f * s.in_channels + c) * s.kernel + j;
                    double acc = 0.0;
                    if (li == 0) {
                        const std::uint8_t* row = x.data.data() + c * s.in_len;
                        for (std::size_t i = 0; i < s.conv_len; ++i) acc += dzf[i] * static_cast<double>(row[i * s.stride + j]);
                    } else {
                        const double* row = t.pooled[li - 1].data() + c * s.in_len;
                        for (std::size_t i = 0; i < s.conv_len; ++i) acc += dzf[i] * row[i * s.stride + j];
                        const double wv = w[widx];
                        double* drow = din.data() + c * s.in_len;
                        for (std::size_t i = 0; i < s.conv_len; ++i) drow[i * s.stride + j] += dzf[i] * wv;
                    }
                    grad[s.w_offset + widx] = acc;
                }
            }
        }
        if (need_input_grad) dout.swap(din);
    }
    return cross_entropy(t, y);
}

double batch_gradient(const ConvNetModel& m, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                      std::span<const std::size_t> batch, std::span<double> grad) {
    require(!batch.empty(), "batch must be non-empty");
    require(inputs.size() == labels.size(), "inputs/labels length mismatch");
    const std::size_t P = m.parameters.size();
    require(grad.size() == P, "gradient buffer has the wrong size");
    const std::size_t B = batch.size();
    for (std::size_t b : batch) require(b < inputs.size(), "batch index out of range");

    std::vector<double> per_example(B * P);
    std::vector<double> losses(B);
    std::vector<std::string> errors(B);
    const auto n = static_cast<std::ptrdiff_t>(B);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            losses[k] = example_gradient(m, inputs[batch[k]], labels[batch[k]], std::span<double>(per_example.data() + k * P, P));
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    for (std::size_t k = 0; k < B; ++k)
        if (!errors[k].empty()) fail(ErrorKind::dimension, errors[k]);

    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t k = 0; k < B; ++k) {
        const double* g = per_example.data() + k * P;
        for (std::size_t q = 0; q < P; ++q) grad[q] += g[q];
        loss += losses[k];
    }
    const double inv = 1.0 / static_cast<double>(B);
    for (double& g : grad) g *= inv;
    return loss * inv;
}

double backward_and_step(ConvNetModel& m, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                         std::span<const std::size_t> batch, const TrainConfig& config, MomentumState& state,
                         StepContext ctx) {
    const std::size_t P = m.parameters.size();
    std::vector<double> grad(P);
    const double loss = batch_gradient(m, inputs, labels, batch, grad);
    bool finite = std::isfinite(loss);
    for (std::size_t q = 0; finite && q < P; ++q) finite = std::isfinite(grad[q]);
    if (!finite)
        fail(ErrorKind::divergence, "non-finite loss or gradient at epoch " + std::to_string(ctx.epoch) + ", batch " + std::to_string(ctx.batch));
    if (state.velocity.size() != P) state.velocity.assign(P, 0.0);
    if (config.learning_rate == 0.0) return loss;
    for (std::size_t q = 0; q < P; ++q) {
        state.velocity[q] = config.momentum * state.velocity[q] - config.learning_rate * grad[q];
        m.parameters[q] += state.velocity[q];
    }
    return loss;
}

namespace {

double mean_loss(const ConvNetModel& m, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                 std::span<const std::size_t> idx) {
    std::vector<double> losses(idx.size());
    const auto n = static_cast<std::ptrdiff_t>(idx.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        losses[k] = example_loss(m, inputs[idx[k]], labels[idx[k]]);
    }
    double s = 0.0;
    for (double v : losses) s += v;
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

// Epoch order: shuffled, or with the minority class resampled to match the majority.
std::vector<std::size_t> epoch_order(std::span<const std::size_t> train, std::span<const Label> labels, bool balanced, Rng& rng) {
    std::vector<std::size_t> order(train.begin(), train.end());
    if (balanced) {
        std::vector<std::size_t> cls[2];
        for (std::size_t i : train) cls[to_int(labels[i])].push_back(i);
        const int minority = cls[0].size() < cls[1].size() ? 0 : 1;
        const std::size_t deficit = cls[1 - minority].size() - cls[minority].size();
        for (std::size_t d = 0; d < deficit; ++d) order.push_back(cls[minority][rng.below(cls[minority].size())]);
    }
    rng.shuffle(order);
    return order;
}

} // namespace

ConvNetModel train_convnet(const ConvNetArch& arch, std::span<const OneHotTensor> inputs, std::span<const Label> labels,
                           const TrainConfig& config) {
    config.validate();
    arch.validate();
    require(inputs.size() == labels.size(), "inputs/labels length mismatch");
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::related));
    if (positives == 0 || positives == labels.size()) fail(ErrorKind::single_class, "convnet training needs both classes present");
    for (const auto& x : inputs)
        if (x.max_len != arch.max_len) fail(ErrorKind::dimension, "input tensor length does not match arch max_len");

    ConvNetModel m = init_convnet(arch, mix_seed(config.seed, 0));
    std::vector<std::size_t> train_idx(inputs.size()), val_idx;
    for (std::size_t i = 0; i < inputs.size(); ++i) train_idx[i] = i;

    if (config.early_stop_patience > 0) {
        Rng split_rng(mix_seed(config.seed, 1));
        split_rng.shuffle(train_idx);
        auto n_val = static_cast<std::size_t>(std::ceil(config.validation_fraction * static_cast<double>(inputs.size())));
        n_val = std::min(n_val, inputs.size() - 2);
        val_idx.assign(train_idx.begin(), train_idx.begin() + static_cast<std::ptrdiff_t>(n_val));
        train_idx.erase(train_idx.begin(), train_idx.begin() + static_cast<std::ptrdiff_t>(n_val));
        std::sort(train_idx.begin(), train_idx.end());
        std::sort(val_idx.begin(), val_idx.end());
        bool has[2] = {false, false};
        for (std::size_t i : train_idx) has[to_int(labels[i])] = true;
        if (!has[0] || !has[1]) fail(ErrorKind::single_class, "held-out slice leaves a single class for training");
    }

    Rng shuffle_rng(mix_seed(config.seed, 2));
    MomentumState state;
    const auto bs = static_cast<std::size_t>(config.batch_size);
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_params;
    int since_best = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto order = epoch_order(train_idx, labels, config.balanced_batches, shuffle_rng);
        double epoch_loss = 0.0;
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < order.size(); start += bs, ++batch_no) {
            const std::size_t end = std::min(order.size(), start + bs);
            std::span<const std::size_t> batch(order.data() + start, end - start);
            const double loss = backward_and_step(m, inputs, labels, batch, config, state, {epoch, batch_no + 1});
            epoch_loss += loss * static_cast<double>(batch.size());
        }
        m.training_log.push_back(epoch_loss / static_cast<double>(order.size()));

        if (config.early_stop_patience > 0) {
            const double val = mean_loss(m, inputs, labels, val_idx);
            if (val < best_val) {
                best_val = val;
                best_params = m.parameters;
                since_best = 0;
            } else if (++since_best >= config.early_stop_patience) {
                break;
            }
        }
    }
    if (!best_params.empty()) m.parameters = std::move(best_params);
    return m;
}

std::vector<std::array<double, 2>> predict_convnet(const ConvNetModel& m, std::span<const OneHotTensor> inputs) {
    std::vector<std::array<double, 2>> out(inputs.size());
    const auto n = static_cast<std::ptrdiff_t>(inputs.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = forward(m, inputs[static_cast<std::size_t>(i)]).probabilities;
    }
    return out;
}

nlohmann::json convnet_to_json(const ConvNetModel& m) {
    using nlohmann::json;
    json layers = json::array();
    for (const auto& l : m.arch.conv_layers)
        layers.push_back({{"filters", l.filters}, {"kernel_width", l.kernel_width}, {"stride", l.stride}, {"pool_width", l.pool_width}});
    return json{{"format", "genolang-convnet"},
                {"version", 1},
                {"arch", {{"max_len", m.arch.max_len}, {"dense_embedding_dim", m.arch.dense_embedding_dim}, {"conv_layers", layers}}},
                {"parameters", m.parameters},
                {"training_log", m.training_log}};
}

ConvNetModel convnet_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "genolang-convnet") fail(ErrorKind::format, "not a convnet model (format tag)");
        if (j.at("version").get<int>() != 1) fail(ErrorKind::format, "unsupported convnet model version");
        ConvNetModel m;
        const auto& a = j.at("arch");
        m.arch.max_len = a.at("max_len").get<std::size_t>();
        m.arch.dense_embedding_dim = a.at("dense_embedding_dim").get<int>();
        m.arch.conv_layers.clear();
        for (const auto& l : a.at("conv_layers"))
            m.arch.conv_layers.push_back({l.at("filters").get<int>(), l.at("kernel_width").get<int>(), l.at("stride").get<int>(),
                                          l.at("pool_width").get<int>()});
        m.parameters = j.at("parameters").get<std::vector<double>>();
        m.training_log = j.at("training_log").get<std::vector<double>>();
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, std::string("convnet model: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::contract || e.kind() == ErrorKind::architecture)
            fail(ErrorKind::format, std::string("convnet model: ") + e.what());
        throw;
    }
}

void save_convnet(const ConvNetModel& m, const std::filesystem::path& path) {
    write_text_file(path, convnet_to_json(m).dump() + "\n");
}

ConvNetModel load_convnet(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, path.string() + ": " + e.what());
    }
    return convnet_from_json(j);
}

std::string training_log_csv(const ConvNetModel& m) {
    std::string out = "epoch,loss\n";
    for (std::size_t i = 0; i < m.training_log.size(); ++i) out += std::to_string(i + 1) + ',' + format_shortest(m.training_log[i]) + '\n';
    return out;
}

} // namespace genolang
