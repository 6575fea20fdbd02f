#include "thetafit/train.hpp"

#include "thetafit/errors.hpp"
#include "thetafit/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace thetafit {

void TrainConfig::validate(std::size_t n_terms) const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (batch_size > n_terms) {
        throw ConfigError("batch_size " + std::to_string(batch_size) + " exceeds the " +
                          std::to_string(n_terms) + " available terms");
    }
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
}

void adam_step(AdamState& state, std::vector<double>& weights, std::span<const double> grads,
               const TrainConfig& cfg) {
    if (state.m.empty()) {
        state.m.assign(weights.size(), 0.0);
        state.v.assign(weights.size(), 0.0);
    }
    if (weights.size() != grads.size() || weights.size() != state.m.size()) {
        throw DataError("adam_step: weight/gradient/state length mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        weights[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

FitResult fit(const TrainConfig& cfg, const LossBuilder& build_loss, std::size_t n_terms,
              Weights initial, const EpochCallback& on_epoch) {
    cfg.validate(n_terms);
    const auto started = std::chrono::steady_clock::now();

    FitResult result;
    result.weights = std::move(initial);
    const std::size_t n_weights = result.weights.values.size();

    AdamState adam;
    Tape tape;
    std::vector<std::size_t> order(n_terms);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Expr> weight_nodes(n_weights);
    std::vector<double> grads(n_weights);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            Rng rng(cfg.seed, epoch);
            shuffle(order, rng);
        }
        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < n_terms; begin += cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(begin + cfg.batch_size, n_terms);
            const std::span<const std::size_t> batch(order.data() + begin, end - begin);

            tape.clear();
            for (std::size_t i = 0; i < n_weights; ++i) {
                weight_nodes[i] = make_leaf(tape, result.weights.values[i]);
            }
            Expr loss;
            try {
                loss = build_loss(tape, weight_nodes, batch);
            } catch (const DomainError& err) {
                throw TrainingError(err.what(), epoch, batch_index);
            }
            epoch_loss += loss.value();

            const GradientVector grad = tape.backward(loss.ref());
            for (std::size_t i = 0; i < n_weights; ++i) {
                grads[i] = grad.at(weight_nodes[i].ref());
            }
            adam_step(adam, result.weights.values, grads, cfg);
        }
        const double mean_loss = epoch_loss / static_cast<double>(n_terms);
        result.loss_history.push_back(mean_loss);
        result.epochs_run = epoch + 1;
        if (on_epoch) on_epoch(epoch + 1, mean_loss, result.weights);
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace thetafit
