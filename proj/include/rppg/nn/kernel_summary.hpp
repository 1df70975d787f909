#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "rppg/nn/network.hpp"

namespace rppg::nn {

/// Per-kernel sums of the first conv layer's 3x3 weights for each input
/// channel (K kernels x C channels), plus the dominant direction of that
/// scatter: how the network combines its input channels.
struct KernelSummary {
    std::size_t kernels = 0;
    std::size_t channels = 0;
    std::vector<double> channel_sums;        // K x C, row-major
    std::vector<double> principal_direction; // unit C-vector

    double sum(std::size_t k, std::size_t c) const {
        return channel_sums[k * channels + c];
    }
};

inline KernelSummary first_layer_channel_sums(const Network& net) {
    const Tensor& w = net.params().front().value; // conv0_w: 3x3xCinxCout
    const std::size_t cin = w.dim(2), cout = w.dim(3);

    KernelSummary s;
    s.kernels = cout;
    s.channels = cin;
    s.channel_sums.assign(cout * cin, 0.0);
    for (std::size_t tap = 0; tap < 9; ++tap)
        for (std::size_t c = 0; c < cin; ++c)
            for (std::size_t k = 0; k < cout; ++k)
                s.channel_sums[k * cin + c] += w[(tap * cin + c) * cout + k];

    // Dominant right-singular direction via power iteration on M^T M.
    std::vector<double> mtm(cin * cin, 0.0);
    for (std::size_t k = 0; k < cout; ++k)
        for (std::size_t a = 0; a < cin; ++a)
            for (std::size_t b = 0; b < cin; ++b)
                mtm[a * cin + b] += s.sum(k, a) * s.sum(k, b);

    std::vector<double> v(cin, 1.0 / std::sqrt(static_cast<double>(cin)));
    std::vector<double> next(cin);
    for (int iter = 0; iter < 256; ++iter) {
        double norm = 0.0;
        for (std::size_t a = 0; a < cin; ++a) {
            double acc = 0.0;
            for (std::size_t b = 0; b < cin; ++b) acc += mtm[a * cin + b] * v[b];
            next[a] = acc;
            norm += acc * acc;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) break; // degenerate scatter; keep the seed vector
        for (std::size_t a = 0; a < cin; ++a) next[a] /= norm;
        v = next;
    }
    // Sign convention: the largest-magnitude component is positive.
    std::size_t imax = 0;
    for (std::size_t a = 1; a < cin; ++a)
        if (std::abs(v[a]) > std::abs(v[imax])) imax = a;
    if (v[imax] < 0.0)
        for (double& x : v) x = -x;
    s.principal_direction = std::move(v);
    return s;
}

} // namespace rppg::nn
