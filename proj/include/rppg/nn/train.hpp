#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rppg/nn/adadelta.hpp"
#include "rppg/nn/checkpoint.hpp"
#include "rppg/nn/network.hpp"

namespace rppg::nn {

/// One training sample: a normalized difference frame and its scalar label.
struct Sample {
    Tensor input;
    double label = 0.0;
};

struct TrainOptions {
    std::size_t epochs = 8;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    double rho = 0.95;
    double epsilon = 1e-6;
    // Early stop when mean epoch loss improves by less than min_delta for
    // `patience` consecutive epochs. patience == 0 disables it.
    std::size_t patience = 0;
    double min_delta = 1e-4;
};

struct TrainReport {
    std::vector<double> epoch_loss; // mean per-sample loss
    std::size_t epochs_run = 0;
};

/// Mini-batch training loop: gradients averaged over each batch, one
/// Adadelta update per batch. Deterministic given options.seed.
inline std::pair<Checkpoint, TrainReport> train(Network& net,
                                                const std::vector<Sample>& dataset,
                                                const TrainOptions& opt) {
    if (dataset.empty())
        throw std::invalid_argument("train: empty dataset");
    if (opt.batch_size < 1)
        throw std::invalid_argument("train: batch_size must be >= 1");

    std::mt19937_64 shuffle_rng(opt.seed);
    std::mt19937_64 dropout_rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
    AdadeltaState state = AdadeltaState::for_network(net, opt.rho, opt.epsilon);

    TrainReport report;
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    ForwardCache cache; // reused so its buffers are allocated once

    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;

        for (std::size_t start = 0; start < order.size();
             start += opt.batch_size) {
            const std::size_t end =
                std::min(order.size(), start + opt.batch_size);
            std::vector<Tensor> grads = net.zero_grads();
            double batch_loss = 0.0;
            for (std::size_t b = start; b < end; ++b) {
                const Sample& s = dataset[order[b]];
                const double pred =
                    net.forward(s.input, true, dropout_rng, cache);
                const double diff = pred - s.label;
                batch_loss += 0.5 * diff * diff;
                net.backward(cache, diff, grads);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (Tensor& g : grads)
                for (std::size_t k = 0; k < g.size(); ++k) g[k] *= inv;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error(
                    "train: non-finite loss at epoch " + std::to_string(epoch) +
                    ", batch offset " + std::to_string(start));
            adadelta_step(net.params(), grads, state);
            epoch_loss += batch_loss;
        }

        epoch_loss /= static_cast<double>(dataset.size());
        report.epoch_loss.push_back(epoch_loss);
        report.epochs_run = epoch + 1;

        if (opt.patience > 0) {
            if (epoch_loss < best_loss - opt.min_delta) {
                best_loss = epoch_loss;
                stall = 0;
            } else if (++stall >= opt.patience) {
                break;
            }
        }
    }
    return {Checkpoint::from_network(net, opt.seed), report};
}

} // namespace rppg::nn
