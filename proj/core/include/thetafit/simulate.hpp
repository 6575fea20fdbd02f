#pragma once

#include "thetafit/models.hpp"
#include "thetafit/neuralnet.hpp"
#include "thetafit/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace thetafit {

/// Uniformly spaced scalar observations x_k at t_k = t_0 + k*h.
struct Trajectory {
    double step = 0.0;
    std::vector<double> times;
    std::vector<double> values;

    std::size_t transitions() const noexcept {
        return values.empty() ? 0 : values.size() - 1;
    }
};

/// Two-dimensional regression observations on the case's time grid.
struct RegressionDataset {
    std::vector<double> times;
    std::vector<std::array<double, 2>> observations;

    std::size_t size() const noexcept { return observations.size(); }
};

/// Time-dependent parameter provider; fills `out` with the theta components
/// at time t. The span-out shape keeps the per-step simulation loop free of
/// allocations.
using ThetaFn = std::function<void(double t, std::span<double> out)>;

/// The model's generating parameter function.
ThetaFn true_theta_fn(const SdeModelSpec& model);

/// A fitted network as parameter provider (reported components: abs/tanh
/// heads applied).
ThetaFn mlp_theta_fn(MlpSpec spec, Weights weights);

/// Table lookup on a uniform grid t_0 + k*step (nearest index). `table` is
/// row-major: n_points rows of theta_dim components. Precomputing a fitted
/// network onto the simulation grid this way makes large ensembles cheap.
ThetaFn grid_theta_fn(std::vector<double> table, int theta_dim, double t0, double step);

/// Euler-Maruyama recursion x_{k+1} = x_k + a h + b sqrt(h) Z_k from x0 over
/// n steps of size horizon/n. Throws SimulationError (with the step index)
/// if the state leaves [-1e12, 1e12].
Trajectory euler_path(const SdeModelSpec& model, const ThetaFn& theta, double x0, double horizon,
                      std::size_t n, Rng& rng, double t0 = 0.0);

/// N independent trajectories; trajectory i draws from stream i of `seed`,
/// so the result is independent of scheduling and identical across reruns.
/// Generation runs on multiple threads.
std::vector<Trajectory> ensemble(const SdeModelSpec& model, const ThetaFn& theta, double x0,
                                 double horizon, std::size_t n, std::size_t n_paths,
                                 std::uint64_t seed);

/// Terminal values x(T) of each trajectory.
std::vector<double> endpoints(std::span<const Trajectory> paths);

/// Every stride-th observation (always keeping the first); the step widens
/// accordingly.
Trajectory subsample(const Trajectory& traj, std::size_t stride);

/// Draws X(t_k) = mu(t_k) + eps(t_k) with correlated Gaussian noise from the
/// case's covariance via its 2x2 Cholesky factor. Throws DataError if a
/// covariance matrix has a negative variance or |rho| > 1; zero variances
/// degenerate gracefully to noiseless components.
RegressionDataset regression_sample(const RegressionCaseSpec& spec, Rng& rng);

}  // namespace thetafit
