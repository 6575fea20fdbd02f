#pragma once

#include "thetafit/autodiff.hpp"
#include "thetafit/neuralnet.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace thetafit {

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t epochs = 1;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;
    bool shuffle = true;

    /// Throws ConfigError unless 1 <= batch_size <= n_terms, epochs >= 1 and
    /// learning_rate > 0.
    void validate(std::size_t n_terms) const;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
};

struct FitResult {
    Weights weights;
    std::vector<double> loss_history;  // per-epoch mean loss per term
    std::size_t epochs_run = 0;
    double wall_seconds = 0.0;
};

/// One bias-corrected Adam update, in place. A fresh state is resized lazily.
void adam_step(AdamState& state, std::vector<double>& weights, std::span<const double> grads,
               const TrainConfig& cfg);

/// Builds the differentiable loss of one index subset. `weights` are the
/// current weights as tape leaves, in layout order.
using LossBuilder =
    std::function<Expr(Tape& tape, std::span<const Expr> weights, std::span<const std::size_t> batch)>;

/// Called after each epoch with the mean loss and current weights (used for
/// checkpointing and progress reporting).
using EpochCallback = std::function<void(std::size_t epoch, double mean_loss, const Weights&)>;

/// Minibatch Adam over the summed loss: per epoch, shuffle the term indices
/// (seeded), partition into batches, and for each batch rebuild the tape,
/// evaluate the subset loss, sweep gradients and update. The final partial
/// batch is included. Identical inputs give bit-identical results.
///
/// DomainErrors raised by the loss abort training as TrainingError with
/// epoch/batch context.
FitResult fit(const TrainConfig& cfg, const LossBuilder& build_loss, std::size_t n_terms,
              Weights initial, const EpochCallback& on_epoch = {});

}  // namespace thetafit
