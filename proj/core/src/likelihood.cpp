#include "thetafit/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace thetafit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

}  // namespace

ThetaNodeFn fixed_theta_nodes(std::function<std::vector<double>(double)> theta) {
    return [theta = std::move(theta)](Tape& tape, double t) {
        const std::vector<double> values = theta(t);
        std::vector<Expr> nodes;
        nodes.reserve(values.size());
        for (double v : values) nodes.push_back(make_leaf(tape, v));
        return nodes;
    };
}

Expr regression_nll_2d(Tape& tape, const ThetaNodeFn& theta_at, const RegressionDataset& data,
                       std::span<const std::size_t> terms) {
    if (data.size() == 0) throw DataError("regression_nll_2d: empty dataset");
    std::vector<std::size_t> all;
    if (terms.empty()) {
        all = all_indices(data.size());
        terms = all;
    }

    const Expr half = cst(tape, 0.5);
    Expr total = cst(tape, 0.0);
    for (std::size_t k : terms) {
        const double t = data.times[k];
        const std::vector<Expr> theta = theta_at(tape, t);

        const Expr s1_sq = square(theta[2]);
        const Expr s2_sq = square(theta[3]);
        const Expr rho = theta[4];
        const Expr one_minus_rho_sq = 1.0 - square(rho);

        // 0.5 * ln((2 pi)^2 s1^2 s2^2 (1-rho^2)) == ln(2 pi |s1| |s2| sqrt(1-rho^2))
        const Expr log_term =
            half * ln(cst(tape, kTwoPi * kTwoPi) * s1_sq * s2_sq * one_minus_rho_sq);

        const Expr d1 = cst(tape, data.observations[k][0]) - theta[0];
        const Expr d2 = cst(tape, data.observations[k][1]) - theta[1];
        const Expr cross = rho * d1 * d2 / (abs(theta[2]) * abs(theta[3]));
        const Expr quad = square(d1) / s1_sq + square(d2) / s2_sq - 2.0 * cross;

        total = total + log_term + quad / (2.0 * one_minus_rho_sq);
    }
    return total;
}

Expr sde_quasi_nll(Tape& tape, const SdeModelSpec& model, const ThetaNodeFn& theta_at,
                   const Trajectory& traj, std::span<const std::size_t> terms) {
    if (traj.transitions() == 0) throw DataError("sde_quasi_nll: trajectory has no transitions");
    std::vector<std::size_t> all;
    if (terms.empty()) {
        all = all_indices(traj.transitions());
        terms = all;
    }

    const double h = traj.step;
    const Expr half = cst(tape, 0.5);
    const Expr two_pi_h = cst(tape, kTwoPi * h);
    Expr total = cst(tape, 0.0);
    for (std::size_t k : terms) {
        const double t = traj.times[k];
        const double x = traj.values[k];
        const double dx = traj.values[k + 1] - x;

        const std::vector<Expr> theta = theta_at(tape, t);
        const Expr a = model.drift_expr(t, x, theta);
        const Expr b_sq = square(model.diffusion_expr(t, x, theta));

        Expr log_term;
        try {
            log_term = ln(two_pi_h * b_sq);
        } catch (const DomainError&) {
            throw DomainError("singular diffusion in quasi-likelihood term " + std::to_string(k),
                              b_sq.value());
        }
        const Expr residual = cst(tape, dx) - a * h;
        total = total + half * (log_term + square(residual) / (b_sq * h));
    }
    return total;
}

Quadrature gauss_legendre(int n) {
    if (n < 1) throw ConfigError("quadrature order must be positive");
    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    // Newton iteration on P_n with the Chebyshev-angle initial guess;
    // symmetric nodes are filled in pairs.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[static_cast<std::size_t>(i)] = -x;
        q.weights[static_cast<std::size_t>(i)] = w;
        q.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        q.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return q;
}

double ou_exact_nll(double theta1, const std::function<double(double)>& theta2,
                    const Trajectory& traj) {
    if (!(theta1 > 0.0)) {
        throw DomainError("ou_exact_nll requires a positive mean-reversion rate", theta1);
    }
    if (traj.transitions() == 0) throw DataError("ou_exact_nll: trajectory has no transitions");

    static const Quadrature quad = gauss_legendre(64);
    const double h = traj.step;
    const double decay = std::exp(-theta1 * h);

    double total = 0.0;
    for (std::size_t k = 0; k < traj.transitions(); ++k) {
        const double t0 = traj.times[k];
        const double t1 = traj.times[k + 1];
        double variance = 0.0;
        for (std::size_t j = 0; j < quad.nodes.size(); ++j) {
            const double u = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * quad.nodes[j];
            const double s = theta2(u);
            variance += quad.weights[j] * s * s * std::exp(-2.0 * theta1 * (t1 - u));
        }
        variance *= 0.5 * (t1 - t0);
        if (!(variance > 0.0)) {
            throw DomainError("non-positive transition variance in term " + std::to_string(k),
                              variance);
        }
        const double residual = traj.values[k + 1] - decay * traj.values[k];
        total += 0.5 * std::log(kTwoPi * variance) + residual * residual / (2.0 * variance);
    }
    return total;
}

}  // namespace thetafit
