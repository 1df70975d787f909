#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rppg/nn/ops.hpp"
#include "rppg/tensor.hpp"

namespace rppg::nn {

/// Architecture description: pairs of 3x3 conv layers, each pair followed by
/// 2x2 average pooling and dropout, then two fully-connected layers ending
/// in a single regression output.
struct NetworkConfig {
    std::vector<std::size_t> conv_channels; // even length; one entry per conv
    std::size_t kernel_size = 3;            // fixed
    double dropout_rate = 0.25;
    std::size_t fc_hidden = 128;
    std::size_t input_side = 64;
    std::size_t input_channels = 3;

    std::size_t num_stages() const { return conv_channels.size() / 2; }

    std::size_t flatten_size() const {
        const std::size_t side = input_side >> num_stages();
        return side * side * conv_channels.back();
    }

    void validate() const {
        if (conv_channels.empty() || conv_channels.size() % 2 != 0)
            throw std::invalid_argument(
                "NetworkConfig: conv_channels must be a nonempty even-length list");
        if (kernel_size != 3)
            throw std::invalid_argument("NetworkConfig: kernel_size must be 3");
        if (dropout_rate < 0.0 || dropout_rate >= 1.0)
            throw std::invalid_argument("NetworkConfig: dropout_rate in [0,1)");
        const std::size_t stages = num_stages();
        if (input_side % (1u << stages) != 0 || (input_side >> stages) < 1)
            throw std::invalid_argument(
                "NetworkConfig: input_side must be divisible by 2^" +
                std::to_string(stages));
        if (input_channels < 1)
            throw std::invalid_argument("NetworkConfig: input_channels >= 1");
    }

    /// The full-size architecture: ten conv layers, five pooling stages.
    static NetworkConfig paper_preset(std::size_t channels = 3) {
        NetworkConfig c;
        c.conv_channels = {16, 16, 32, 32, 64, 64, 64, 64, 128, 128};
        c.input_channels = channels;
        return c;
    }

    /// Reduced widths for CI and desk-scale experiments; same depth.
    static NetworkConfig tiny_preset(std::size_t channels = 3) {
        NetworkConfig c;
        c.conv_channels = {8, 8, 16, 16, 16, 16, 24, 24, 24, 24};
        c.input_channels = channels;
        return c;
    }
};

/// A named parameter tensor; order in Network::params defines the
/// checkpoint serialization order.
struct Param {
    std::string name;
    Tensor value;
};

struct ForwardCache {
    std::vector<std::vector<double>> cols; // im2col matrix per conv layer
    std::vector<std::vector<std::size_t>> conv_in_shape; // per conv layer
    std::vector<Tensor> tanh_out;  // activated output of each conv layer
    std::vector<Tensor> drop_mask; // one per stage
    Tensor flat_in;                // flattened input to fc0
    Tensor fc_hidden_act;          // tanh(fc0 output)
    double output = 0.0;
    bool valid = false;
    // Scratch buffers kept across samples so repeated passes through the
    // same architecture reuse their allocations.
    std::vector<Tensor> conv_pre;  // pre-activation conv outputs
    std::vector<Tensor> stage_out; // dropout output per stage
    std::vector<Tensor> pool_out;  // pooled output per stage
    mutable std::vector<double> dcol_scratch;   // reused by backward
    mutable std::vector<Tensor> conv_grad;      // d(input) per conv layer
    mutable std::vector<Tensor> pool_grad;      // upsampled grad per stage
    mutable Tensor fc1_gw, fc1_gb, fc0_gw, fc0_gb, g_hidden, g_flat;
};

class Network {
public:
    explicit Network(NetworkConfig config) : cfg_(std::move(config)) {
        cfg_.validate();
        build_params();
    }

    const NetworkConfig& config() const { return cfg_; }
    std::vector<Param>& params() { return params_; }
    const std::vector<Param>& params() const { return params_; }

    /// Glorot-style uniform init suited to tanh; biases zero.
    void init_weights(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const std::size_t convs = cfg_.conv_channels.size();
        for (std::size_t i = 0; i < params_.size(); ++i) {
            Param& p = params_[i];
            if (p.name.ends_with("_b")) {
                p.value.fill(0.0);
                continue;
            }
            double fan_in, fan_out;
            if (i / 2 < convs) { // conv weight
                fan_in = 9.0 * static_cast<double>(p.value.dim(2));
                fan_out = 9.0 * static_cast<double>(p.value.dim(3));
            } else { // dense weight
                fan_in = static_cast<double>(p.value.dim(0));
                fan_out = static_cast<double>(p.value.dim(1));
            }
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            std::uniform_real_distribution<double> u(-bound, bound);
            for (std::size_t k = 0; k < p.value.size(); ++k) p.value[k] = u(rng);
        }
    }

    /// One scalar per input difference frame.
    double forward(const Tensor& input, bool training, std::mt19937_64& rng,
                   ForwardCache& cache) const {
        require_shape(input, {cfg_.input_side, cfg_.input_side,
                              cfg_.input_channels}, "network_forward");
        const std::size_t stages = cfg_.num_stages();
        const std::size_t convs = cfg_.conv_channels.size();
        cache.cols.resize(convs);
        cache.conv_in_shape.resize(convs);
        cache.tanh_out.resize(convs);
        cache.conv_pre.resize(convs);
        cache.drop_mask.resize(stages);
        cache.stage_out.resize(stages);
        cache.pool_out.resize(stages);

        const Tensor* x = &input;
        std::size_t layer = 0;
        for (std::size_t s = 0; s < stages; ++s) {
            for (int half = 0; half < 2; ++half, ++layer) {
                cache.conv_in_shape[layer] = x->shape();
                conv2d_forward_into(*x, params_[2 * layer].value,
                                    params_[2 * layer + 1].value,
                                    cache.cols[layer], cache.conv_pre[layer]);
                tanh_activation_into(cache.conv_pre[layer],
                                     cache.tanh_out[layer]);
                x = &cache.tanh_out[layer];
            }
            avgpool2x2_into(*x, cache.pool_out[s]);
            dropout_into(cache.pool_out[s], cfg_.dropout_rate, rng, training,
                         cache.stage_out[s], cache.drop_mask[s]);
            x = &cache.stage_out[s];
        }

        detail::ensure_shape(cache.flat_in, {x->size()});
        std::copy(x->data(), x->data() + x->size(), cache.flat_in.data());
        const std::size_t fw = fc0_index();
        Tensor h = dense_forward(cache.flat_in, params_[fw].value,
                                 params_[fw + 1].value);
        cache.fc_hidden_act = tanh_activation(h);
        Tensor out = dense_forward(cache.fc_hidden_act, params_[fw + 2].value,
                                   params_[fw + 3].value);
        cache.output = out[0];
        cache.valid = true;
        return cache.output;
    }

    double forward(const Tensor& input) const {
        std::mt19937_64 rng(0);
        ForwardCache cache;
        return forward(input, false, rng, cache);
    }

    /// Gradients of a scalar loss w.r.t. every parameter, given dL/doutput
    /// and the cache of the matching forward pass. Dropout masks are held
    /// fixed. Accumulates into `grads` (shapes must match params).
    void backward(const ForwardCache& cache, double grad_output,
                  std::vector<Tensor>& grads) const {
        if (!cache.valid)
            throw std::logic_error("network_backward: no recorded forward pass");
        if (grads.size() != params_.size())
            throw std::invalid_argument("network_backward: gradient list size");

        const std::size_t fw = fc0_index();
        Tensor g({1}, {grad_output});

        dense_backward(cache.fc_hidden_act, params_[fw + 2].value, g,
                       cache.g_hidden, cache.fc1_gw, cache.fc1_gb);
        accumulate(grads[fw + 2], cache.fc1_gw);
        accumulate(grads[fw + 3], cache.fc1_gb);
        Tensor& g_hidden = cache.g_hidden;
        for (std::size_t i = 0; i < g_hidden.size(); ++i) {
            const double a = cache.fc_hidden_act[i];
            g_hidden[i] *= 1.0 - a * a;
        }

        dense_backward(cache.flat_in, params_[fw].value, g_hidden,
                       cache.g_flat, cache.fc0_gw, cache.fc0_gb);
        accumulate(grads[fw], cache.fc0_gw);
        accumulate(grads[fw + 1], cache.fc0_gb);

        const std::size_t stages = cfg_.num_stages();
        const std::size_t convs = cfg_.conv_channels.size();
        cache.conv_grad.resize(convs);
        cache.pool_grad.resize(stages);
        std::size_t side = cfg_.input_side >> stages;
        Tensor g_top({side, side, cfg_.conv_channels.back()},
                     std::vector<double>(cache.g_flat.data(),
                                         cache.g_flat.data() +
                                             cache.g_flat.size()));
        Tensor* gx = &g_top;
        std::size_t layer = convs;
        for (std::size_t s = stages; s-- > 0;) {
            const Tensor& mask = cache.drop_mask[s];
            for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] *= mask[i];
            avgpool2x2_backward_into(*gx, 2 * gx->dim(0), 2 * gx->dim(1),
                                     cache.pool_grad[s]);
            gx = &cache.pool_grad[s];
            for (int half = 0; half < 2; ++half) {
                --layer;
                const Tensor& act = cache.tanh_out[layer];
                for (std::size_t i = 0; i < gx->size(); ++i) {
                    const double a = act[i];
                    (*gx)[i] *= 1.0 - a * a;
                }
                Tensor& g_in = cache.conv_grad[layer];
                detail::ensure_shape(g_in, cache.conv_in_shape[layer]);
                conv2d_backward_acc(cache.cols[layer],
                                    params_[2 * layer].value, *gx, g_in,
                                    grads[2 * layer], grads[2 * layer + 1],
                                    cache.dcol_scratch);
                gx = &g_in;
            }
        }
    }

    std::vector<Tensor> zero_grads() const {
        std::vector<Tensor> g;
        g.reserve(params_.size());
        for (const Param& p : params_) g.emplace_back(p.value.shape());
        return g;
    }

private:
    std::size_t fc0_index() const { return 2 * cfg_.conv_channels.size(); }

    static void accumulate(Tensor& dst, const Tensor& src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }

    void build_params() {
        std::size_t cin = cfg_.input_channels;
        for (std::size_t i = 0; i < cfg_.conv_channels.size(); ++i) {
            const std::size_t cout = cfg_.conv_channels[i];
            params_.push_back({"conv" + std::to_string(i) + "_w",
                               Tensor({3, 3, cin, cout})});
            params_.push_back(
                {"conv" + std::to_string(i) + "_b", Tensor({cout})});
            cin = cout;
        }
        const std::size_t flat = cfg_.flatten_size();
        params_.push_back({"fc0_w", Tensor({flat, cfg_.fc_hidden})});
        params_.push_back({"fc0_b", Tensor({cfg_.fc_hidden})});
        params_.push_back({"fc1_w", Tensor({cfg_.fc_hidden, 1})});
        params_.push_back({"fc1_b", Tensor({1})});
    }

    NetworkConfig cfg_;
    std::vector<Param> params_;
};

} // namespace rppg::nn
