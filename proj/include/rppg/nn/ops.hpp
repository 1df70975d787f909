#pragma once

#include <cblas.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>

#include "rppg/tensor.hpp"

namespace rppg::nn {

namespace detail {

// Unrolls 3x3 neighborhoods (zero-padded) of an HxWxC image into a
// (H*W) x (9*C) matrix so convolution becomes one GEMM.
inline void im2col3x3(const Tensor& in, std::vector<double>& col) {
    const std::size_t h = in.dim(0), w = in.dim(1), c = in.dim(2);
    // Every entry is written below (zeros explicitly at the padding taps),
    // so the buffer is resized without a full clear.
    col.resize(h * w * 9 * c);
    const double* src = in.data();
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double* row = col.data() + (y * w + x) * 9 * c;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = static_cast<int>(y) + dy;
                double* dst = row + (dy + 1) * 3 * c;
                if (yy < 0 || yy >= static_cast<int>(h)) {
                    std::fill(dst, dst + 3 * c, 0.0);
                    continue;
                }
                const double* srow = src + static_cast<std::size_t>(yy) * w * c;
                if (x >= 1 && x + 1 < w) {
                    // Interior: the three dx taps are contiguous in both the
                    // source image and the column row.
                    std::memcpy(dst, srow + (x - 1) * c,
                                3 * c * sizeof(double));
                    continue;
                }
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = static_cast<int>(x) + dx;
                    double* d = dst + (dx + 1) * c;
                    if (xx < 0 || xx >= static_cast<int>(w)) {
                        std::fill(d, d + c, 0.0);
                        continue;
                    }
                    std::memcpy(d, srow + static_cast<std::size_t>(xx) * c,
                                c * sizeof(double));
                }
            }
        }
    }
}

// Scatter-add of the column matrix back onto the padded image grid,
// the adjoint of im2col3x3.
inline void col2im3x3(const std::vector<double>& col, Tensor& out) {
    const std::size_t h = out.dim(0), w = out.dim(1), c = out.dim(2);
    out.fill(0.0);
    double* dst = out.data();
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double* row = col.data() + (y * w + x) * 9 * c;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = static_cast<int>(y) + dy;
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = static_cast<int>(x) + dx;
                    if (yy < 0 || xx < 0 || yy >= static_cast<int>(h) ||
                        xx >= static_cast<int>(w))
                        continue;
                    const double* s = row + ((dy + 1) * 3 + (dx + 1)) * c;
                    double* px = dst + (yy * w + xx) * c;
                    for (std::size_t ci = 0; ci < c; ++ci) px[ci] += s[ci];
                }
            }
        }
    }
}

// Reuses `t` when it already has the wanted shape; contents are then
// unspecified and must be fully overwritten by the caller.
inline void ensure_shape(Tensor& t, const std::vector<std::size_t>& shape) {
    if (t.shape() != shape) t = Tensor(shape);
}

} // namespace detail

/// 3x3 convolution, stride 1, zero padding 1 ("same" output size).
/// weights shape: 3 x 3 x Cin x Cout, bias shape: Cout. The caller-provided
/// `col` buffer receives the im2col matrix so backward can reuse it.
inline void conv2d_forward_into(const Tensor& input, const Tensor& weights,
                                const Tensor& bias, std::vector<double>& col,
                                Tensor& out) {
    if (input.rank() != 3)
        throw std::invalid_argument("conv2d: input must be HxWxC, got " +
                                    input.shape_str());
    const std::size_t h = input.dim(0), w = input.dim(1), cin = input.dim(2);
    if (h < 3 || w < 3)
        throw std::invalid_argument("conv2d: spatial dims must be >= 3");
    if (weights.rank() != 4 || weights.dim(0) != 3 || weights.dim(1) != 3)
        throw std::invalid_argument("conv2d: weights must be 3x3xCinxCout, got " +
                                    weights.shape_str());
    if (weights.dim(2) != cin)
        throw std::invalid_argument("conv2d: weight input channels " +
                                    std::to_string(weights.dim(2)) +
                                    " != input channels " + std::to_string(cin));
    const std::size_t cout = weights.dim(3);
    if (bias.size() != cout)
        throw std::invalid_argument("conv2d: bias length != output channels");

    detail::im2col3x3(input, col);

    detail::ensure_shape(out, {h, w, cout});
    double* o = out.data();
    for (std::size_t i = 0; i < h * w; ++i)
        for (std::size_t k = 0; k < cout; ++k) o[i * cout + k] = bias[k];

    // (H*W x 9Cin) * (9Cin x Cout) += into out
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans,
                static_cast<int>(h * w), static_cast<int>(cout),
                static_cast<int>(9 * cin), 1.0, col.data(),
                static_cast<int>(9 * cin), weights.data(),
                static_cast<int>(cout), 1.0, o, static_cast<int>(cout));
}

inline Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                             const Tensor& bias, std::vector<double>& col) {
    Tensor out;
    conv2d_forward_into(input, weights, bias, col, out);
    return out;
}

inline Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                             const Tensor& bias) {
    std::vector<double> col;
    return conv2d_forward(input, weights, bias, col);
}

/// Gradients of conv2d_forward, accumulated (+=) into grad_w / grad_b;
/// grad_in is overwritten. `col` is the im2col matrix of the forward input
/// and `dcol` a reusable scratch buffer.
inline void conv2d_backward_acc(const std::vector<double>& col,
                                const Tensor& weights, const Tensor& grad_out,
                                Tensor& grad_in, Tensor& grad_w,
                                Tensor& grad_b, std::vector<double>& dcol) {
    const std::size_t h = grad_in.dim(0), w = grad_in.dim(1),
                      cin = grad_in.dim(2);
    const std::size_t cout = weights.dim(3);
    require_shape(grad_out, {h, w, cout}, "conv2d_backward");

    // dW += col^T * gOut
    cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans,
                static_cast<int>(9 * cin), static_cast<int>(cout),
                static_cast<int>(h * w), 1.0, col.data(),
                static_cast<int>(9 * cin), grad_out.data(),
                static_cast<int>(cout), 1.0, grad_w.data(),
                static_cast<int>(cout));
    for (std::size_t i = 0; i < h * w; ++i)
        for (std::size_t k = 0; k < cout; ++k)
            grad_b[k] += grad_out[i * cout + k];

    // dCol = gOut * W^T, then scatter back to the input grid.
    dcol.resize(h * w * 9 * cin);
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans,
                static_cast<int>(h * w), static_cast<int>(9 * cin),
                static_cast<int>(cout), 1.0, grad_out.data(),
                static_cast<int>(cout), weights.data(),
                static_cast<int>(cout), 0.0, dcol.data(),
                static_cast<int>(9 * cin));
    detail::col2im3x3(dcol, grad_in);
}

/// Standalone conv2d gradients (zero-initialized outputs).
inline void conv2d_backward(const Tensor& input, const Tensor& weights,
                            const Tensor& grad_out, Tensor& grad_in,
                            Tensor& grad_w, Tensor& grad_b) {
    const std::size_t h = input.dim(0), w = input.dim(1), cin = input.dim(2);
    const std::size_t cout = weights.dim(3);
    std::vector<double> col, dcol;
    detail::im2col3x3(input, col);
    grad_w = Tensor({3, 3, cin, cout});
    grad_b = Tensor({cout});
    grad_in = Tensor({h, w, cin});
    conv2d_backward_acc(col, weights, grad_out, grad_in, grad_w, grad_b, dcol);
}

/// 2x2 average pooling; spatial dims must be even.
inline void avgpool2x2_into(const Tensor& input, Tensor& out) {
    if (input.rank() != 3)
        throw std::invalid_argument("avgpool2x2: input must be HxWxC");
    const std::size_t h = input.dim(0), w = input.dim(1), c = input.dim(2);
    if (h % 2 || w % 2)
        throw std::invalid_argument("avgpool2x2: odd spatial dimension in " +
                                    input.shape_str());
    detail::ensure_shape(out, {h / 2, w / 2, c});
    for (std::size_t y = 0; y < h / 2; ++y)
        for (std::size_t x = 0; x < w / 2; ++x)
            for (std::size_t ci = 0; ci < c; ++ci)
                out.at3(y, x, ci) =
                    0.25 * (input.at3(2 * y, 2 * x, ci) +
                            input.at3(2 * y, 2 * x + 1, ci) +
                            input.at3(2 * y + 1, 2 * x, ci) +
                            input.at3(2 * y + 1, 2 * x + 1, ci));
}

inline Tensor avgpool2x2(const Tensor& input) {
    Tensor out;
    avgpool2x2_into(input, out);
    return out;
}

inline void avgpool2x2_backward_into(const Tensor& grad_out, std::size_t h,
                                     std::size_t w, Tensor& grad_in) {
    const std::size_t c = grad_out.dim(2);
    detail::ensure_shape(grad_in, {h, w, c});
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t ci = 0; ci < c; ++ci)
                grad_in.at3(y, x, ci) = 0.25 * grad_out.at3(y / 2, x / 2, ci);
}

inline Tensor avgpool2x2_backward(const Tensor& grad_out, std::size_t h,
                                  std::size_t w) {
    Tensor grad_in;
    avgpool2x2_backward_into(grad_out, h, w, grad_in);
    return grad_in;
}

inline void tanh_activation_into(const Tensor& input, Tensor& out) {
    detail::ensure_shape(out, input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) out[i] = std::tanh(input[i]);
}

inline Tensor tanh_activation(const Tensor& input) {
    Tensor out;
    tanh_activation_into(input, out);
    return out;
}

/// Backward through tanh given the *activated* output values.
inline Tensor tanh_backward(const Tensor& activated, const Tensor& grad_out) {
    Tensor grad_in(activated.shape());
    for (std::size_t i = 0; i < activated.size(); ++i)
        grad_in[i] = grad_out[i] * (1.0 - activated[i] * activated[i]);
    return grad_in;
}

/// Inverted dropout: zeros each element with probability `rate` and scales
/// survivors by 1/(1-rate). Inference mode is the identity. The returned
/// mask already carries the survivor scale.
inline void dropout_into(const Tensor& input, double rate,
                         std::mt19937_64& rng, bool training, Tensor& out,
                         Tensor& mask) {
    if (rate < 0.0 || rate >= 1.0)
        throw std::invalid_argument("dropout: rate must be in [0,1)");
    detail::ensure_shape(mask, input.shape());
    if (!training || rate == 0.0) {
        mask.fill(1.0);
        out = input;
        return;
    }
    const double keep = 1.0 - rate;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    detail::ensure_shape(out, input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double m = u(rng) < rate ? 0.0 : 1.0 / keep;
        mask[i] = m;
        out[i] = input[i] * m;
    }
}

inline std::pair<Tensor, Tensor> dropout(const Tensor& input, double rate,
                                         std::mt19937_64& rng, bool training) {
    std::pair<Tensor, Tensor> result;
    dropout_into(input, rate, rng, training, result.first, result.second);
    return result;
}

/// Affine map: out = input * weights + bias (input flat N, weights NxM).
inline Tensor dense_forward(const Tensor& input, const Tensor& weights,
                            const Tensor& bias) {
    const std::size_t n = input.size();
    if (weights.rank() != 2 || weights.dim(0) != n)
        throw std::invalid_argument("dense: weights " + weights.shape_str() +
                                    " incompatible with input length " +
                                    std::to_string(n));
    const std::size_t m = weights.dim(1);
    if (bias.size() != m)
        throw std::invalid_argument("dense: bias length != output width");
    Tensor out({m});
    for (std::size_t j = 0; j < m; ++j) out[j] = bias[j];
    cblas_dgemv(CblasRowMajor, CblasTrans, static_cast<int>(n),
                static_cast<int>(m), 1.0, weights.data(), static_cast<int>(m),
                input.data(), 1, 1.0, out.data(), 1);
    return out;
}

inline void dense_backward(const Tensor& input, const Tensor& weights,
                           const Tensor& grad_out, Tensor& grad_in,
                           Tensor& grad_w, Tensor& grad_b) {
    const std::size_t n = input.size(), m = grad_out.size();
    detail::ensure_shape(grad_w, {n, m});
    grad_b = grad_out;
    detail::ensure_shape(grad_in, {n});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            grad_w[i * m + j] = input[i] * grad_out[j];
    cblas_dgemv(CblasRowMajor, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(m), 1.0, weights.data(), static_cast<int>(m),
                grad_out.data(), 1, 0.0, grad_in.data(), 1);
}

/// L = 0.5 * ||pred - label||^2, gradient w.r.t. pred = pred - label.
inline std::pair<double, Tensor> euclidean_loss(const Tensor& pred,
                                                const Tensor& label) {
    if (!pred.same_shape(label))
        throw std::invalid_argument("euclidean_loss: shape mismatch " +
                                    pred.shape_str() + " vs " +
                                    label.shape_str());
    Tensor grad(pred.shape());
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - label[i];
        grad[i] = d;
        loss += 0.5 * d * d;
    }
    return {loss, grad};
}

} // namespace rppg::nn
