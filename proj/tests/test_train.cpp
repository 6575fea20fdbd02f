#include "thetafit/train.hpp"

#include "thetafit/likelihood.hpp"
#include "thetafit/rng.hpp"
#include "thetafit/simulate.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace thetafit;
using testutil::rel_gap;

namespace {

// y = 2 t - 1 plus frozen noise; squared-error loss per term.
struct LinearProblem {
    std::vector<double> t;
    std::vector<double> y;

    explicit LinearProblem(std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        for (std::size_t k = 0; k < n; ++k) {
            const double tk = static_cast<double>(k) / static_cast<double>(n);
            t.push_back(tk);
            y.push_back(2.0 * tk - 1.0 + 0.05 * rng.normal());
        }
    }

    LossBuilder builder() const {
        return [this](Tape& tape, std::span<const Expr> w, std::span<const std::size_t> batch) {
            Expr acc = cst(tape, 0.0);
            for (std::size_t k : batch) {
                acc = acc + square(w[0] * t[k] + w[1] - y[k]);
            }
            return acc;
        };
    }
};

}  // namespace

TEST_SUITE_BEGIN("train");

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(10), ConfigError);
    cfg.epochs = 1;
    cfg.batch_size = 11;
    CHECK_THROWS_AS(cfg.validate(10), ConfigError);
    cfg.batch_size = 10;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(10), ConfigError);
    cfg.learning_rate = 1e-3;
    CHECK_NOTHROW(cfg.validate(10));
}

TEST_CASE("adam leaves weights alone on a zero gradient") {
    TrainConfig cfg;
    AdamState state;
    std::vector<double> w{1.0, -2.0, 0.3};
    const std::vector<double> g(3, 0.0);
    adam_step(state, w, g, cfg);
    CHECK(w == std::vector<double>{1.0, -2.0, 0.3});
    CHECK(state.step == 1);
}

TEST_CASE("first adam step reproduces the hand-computed update") {
    // g = 0.5, lr = 1e-3: bias correction cancels, step = -lr * g/(|g| + eps')
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    AdamState state;
    std::vector<double> w{2.0};
    const std::vector<double> g{0.5};
    adam_step(state, w, g, cfg);

    const double m_hat = 0.1 * 0.5 / (1.0 - 0.9);
    const double v_hat = 0.001 * 0.25 / (1.0 - 0.999);
    const double expected = 2.0 - 1e-3 * m_hat / (std::sqrt(v_hat) + 1e-8);
    CHECK(w[0] == doctest::Approx(expected).epsilon(1e-15));
    CHECK(w[0] - 2.0 == doctest::Approx(-1e-3).epsilon(1e-6));
}

TEST_CASE("adam drives a convex quadratic to its minimum") {
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 2000;
    cfg.batch_size = 1;
    cfg.shuffle = false;

    const LossBuilder builder = [](Tape& tape, std::span<const Expr> w,
                                   std::span<const std::size_t>) {
        return square(w[0] - 3.0);
    };
    const FitResult result = fit(cfg, builder, 1, Weights{{0.0}});
    CHECK(std::fabs(result.weights.values[0] - 3.0) < 0.01);
    CHECK(result.epochs_run == 2000);
    CHECK(result.loss_history.size() == 2000);
}

TEST_CASE("training is bit-for-bit deterministic") {
    const LinearProblem problem(64, 5);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 16;
    cfg.seed = 11;

    const Weights init{{0.1, -0.1}};
    const FitResult a = fit(cfg, problem.builder(), problem.t.size(), init);
    const FitResult b = fit(cfg, problem.builder(), problem.t.size(), init);
    CHECK(a.weights.values == b.weights.values);
    CHECK(a.loss_history == b.loss_history);

    // full-batch, no shuffling: still identical
    cfg.shuffle = false;
    cfg.batch_size = problem.t.size();
    const FitResult c = fit(cfg, problem.builder(), problem.t.size(), init);
    const FitResult d = fit(cfg, problem.builder(), problem.t.size(), init);
    CHECK(c.weights.values == d.weights.values);
}

TEST_CASE("epoch losses settle monotonically on a convex surrogate") {
    int monotone_runs = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
        const LinearProblem problem(128, 100 + run);
        TrainConfig cfg;
        cfg.epochs = 40;
        cfg.batch_size = 32;
        cfg.seed = run;
        const FitResult result = fit(cfg, problem.builder(), problem.t.size(), Weights{{0.0, 0.0}});

        bool monotone = true;
        for (std::size_t e = 5; e + 1 < result.loss_history.size(); ++e) {
            if (result.loss_history[e + 1] > result.loss_history[e] * (1.0 + 1e-9)) {
                monotone = false;
                break;
            }
        }
        monotone_runs += monotone ? 1 : 0;
    }
    CHECK(monotone_runs >= 19);  // >= 95% of 20
}

TEST_CASE("subset gradients are sums of per-term gradients") {
    const LinearProblem problem(32, 9);
    const LossBuilder builder = problem.builder();
    const std::vector<double> w0{0.7, -0.2};
    const std::vector<std::size_t> subset{3, 8, 19, 30};

    const auto gradient_of = [&](std::span<const std::size_t> terms) {
        Tape tape;
        std::vector<Expr> nodes;
        for (double v : w0) nodes.push_back(make_leaf(tape, v));
        const Expr loss = builder(tape, nodes, terms);
        const GradientVector grad = tape.backward(loss.ref());
        return std::vector<double>{grad.at(nodes[0].ref()), grad.at(nodes[1].ref())};
    };

    const std::vector<double> full = gradient_of(subset);
    std::vector<double> summed(2, 0.0);
    for (std::size_t term : subset) {
        const std::vector<std::size_t> single{term};
        const std::vector<double> g = gradient_of(single);
        summed[0] += g[0];
        summed[1] += g[1];
    }
    CHECK(rel_gap(full[0], summed[0], 1e-9) < 1e-12);
    CHECK(rel_gap(full[1], summed[1], 1e-9) < 1e-12);
}

TEST_CASE("domain errors abort training with epoch and batch context") {
    // theta = w0 directly as the diffusion; driving w0 through zero trips the
    // ln in the quasi-likelihood
    SdeModelSpec model;
    model.name = "direct";
    model.theta_dim = 1;
    model.heads = {HeadKind::abs_square};
    model.drift = [](double, double, std::span<const double>) { return 0.0; };
    model.diffusion = [](double, double, std::span<const double> th) { return th[0]; };
    model.drift_expr = [](double, double, std::span<const Expr> th) {
        return cst(th[0].tape(), 0.0);
    };
    model.diffusion_expr = [](double, double, std::span<const Expr> th) { return th[0]; };
    model.true_theta = [](double) { return std::vector<double>{1.0}; };

    Trajectory traj;
    traj.step = 0.1;
    traj.times = {0.0, 0.1, 0.2};
    traj.values = {0.0, 0.1, 0.15};

    const LossBuilder builder = [&](Tape& tape, std::span<const Expr> w,
                                    std::span<const std::size_t> batch) {
        const ThetaNodeFn theta = [&](Tape&, double) { return std::vector<Expr>{w[0]}; };
        return sde_quasi_nll(tape, model, theta, traj, batch);
    };

    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 2;
    CHECK_THROWS_AS(fit(cfg, builder, traj.transitions(), Weights{{0.0}}), TrainingError);
}

TEST_CASE("epoch callback sees every epoch in order") {
    const LinearProblem problem(16, 2);
    TrainConfig cfg;
    cfg.epochs = 7;
    cfg.batch_size = 8;
    std::vector<std::size_t> seen;
    fit(cfg, problem.builder(), problem.t.size(), Weights{{0.0, 0.0}},
        [&](std::size_t epoch, double, const Weights&) { seen.push_back(epoch); });
    CHECK(seen == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7});
}

TEST_SUITE_END();
