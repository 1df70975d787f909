#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rppg/nn/network.hpp"
#include "rppg/tensor.hpp"

namespace rppg::nn {

/// Per-parameter accumulators for the Adadelta update
/// (running averages of squared gradients and squared updates).
struct AdadeltaState {
    double rho = 0.95;
    double epsilon = 1e-6;
    std::vector<Tensor> eg2;
    std::vector<Tensor> edx2;

    static AdadeltaState for_network(const Network& net, double rho = 0.95,
                                     double epsilon = 1e-6) {
        AdadeltaState s;
        s.rho = rho;
        s.epsilon = epsilon;
        for (const Param& p : net.params()) {
            s.eg2.emplace_back(p.value.shape());
            s.edx2.emplace_back(p.value.shape());
        }
        return s;
    }
};

/// One Adadelta update over all parameters:
///   eg2  <- rho*eg2 + (1-rho)*g^2
///   dx   <- -sqrt(edx2+eps)/sqrt(eg2+eps) * g
///   edx2 <- rho*edx2 + (1-rho)*dx^2
///   p    <- p + dx
inline void adadelta_step(std::vector<Param>& params,
                          const std::vector<Tensor>& grads,
                          AdadeltaState& state) {
    if (grads.size() != params.size() || state.eg2.size() != params.size())
        throw std::invalid_argument("adadelta_step: parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params[i].value;
        const Tensor& g = grads[i];
        Tensor& eg2 = state.eg2[i];
        Tensor& edx2 = state.edx2[i];
        if (!p.same_shape(g))
            throw std::invalid_argument("adadelta_step: shape mismatch on " +
                                        params[i].name);
        for (std::size_t k = 0; k < p.size(); ++k) {
            eg2[k] = state.rho * eg2[k] + (1.0 - state.rho) * g[k] * g[k];
            const double dx = -std::sqrt(edx2[k] + state.epsilon) /
                              std::sqrt(eg2[k] + state.epsilon) * g[k];
            edx2[k] = state.rho * edx2[k] + (1.0 - state.rho) * dx * dx;
            p[k] += dx;
        }
    }
}

} // namespace rppg::nn
