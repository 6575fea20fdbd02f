#pragma once

#include "thetafit/models.hpp"
#include "thetafit/rng.hpp"
#include "thetafit/simulate.hpp"

#include <cstddef>
#include <vector>

namespace thetafit {

/// Standard normal CDF (erfc-based).
double normal_cdf(double x) noexcept;

/// Inverse standard normal CDF via the Acklam rational approximation
/// (absolute error below 1.2e-9). Throws DomainError outside (0, 1).
double normal_quantile(double p);

/// Monte Carlo forecast: a single simulated carrier path drives one-step
/// Gaussian prediction intervals
///
///   center_k = x~_{k-1} + a(t_{k-1}, x~_{k-1}, theta) h
///   scale_k  = sqrt(h) |b(t_{k-1}, x~_{k-1}, theta)|
///   interval = [center_k - q scale_k, center_k + q scale_k],
///
/// with q = Phi^{-1}((1+alpha)/2). `predictions` duplicates `centers`; both
/// are kept because they play different roles downstream (point forecast vs
/// interval center). Scales are one-step conditional -- they do NOT widen
/// with the forecast horizon.
struct Forecast {
    double alpha = 0.95;
    double step = 0.0;
    std::vector<double> times;        // t_1..t_N of the forecast grid
    std::vector<double> carrier;      // x~_0..x~_N
    std::vector<double> predictions;  // x-bar_k
    std::vector<double> centers;
    std::vector<double> scales;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Runs the forecast recursion from x_start at time t_start for n_steps of
/// size h. `carrier_paths` > 1 averages centers and scales over that many
/// independent carrier paths (variance-reduced variant; the single-path
/// recursion is the reference behavior).
Forecast mc_forecast(const SdeModelSpec& model, const ThetaFn& theta_hat, double x_start,
                     std::size_t n_steps, double h, double alpha, Rng& rng, double t_start = 0.0,
                     std::size_t carrier_paths = 1);

}  // namespace thetafit
