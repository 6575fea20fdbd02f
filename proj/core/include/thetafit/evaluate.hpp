#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace thetafit {

/// Mean squared residual. Lengths must match and be nonzero.
double mse(std::span<const double> y, std::span<const double> y_hat);

/// Coefficient of determination 1 - SSres/SStot. Throws DataError when y has
/// zero variance.
double r2(std::span<const double> y, std::span<const double> y_hat);

struct KsResult {
    double d = 0.0;
    double p = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test. D is the sup distance between the
/// empirical CDFs; the p-value uses the asymptotic Kolmogorov series
///   2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),  lambda = D sqrt(nm/(n+m)),
/// truncated once terms drop below 1e-12 and clamped to [0, 1]. The
/// asymptotic series is accurate for the sample sizes used here (hundreds);
/// below ~50 observations per sample it is only indicative.
KsResult ks_two_sample(std::vector<double> sample1, std::vector<double> sample2);

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;  // 1/(N-1) normalization
};

Moments empirical_moments(std::span<const double> samples);

/// Quantile-quantile pairs (sorted s1_i, sorted s2_i); equal lengths required.
std::vector<std::array<double, 2>> qq_points(std::vector<double> s1, std::vector<double> s2);

/// Empirical ingredients of the mean-square parameter-sensitivity bound:
///   L = sqrt(mean_i |X_i(T) - Xhat_i(T)|^2)   (endpoints paired by index,
///       trajectories coupled through a common noise sequence)
///   R = 2 max_grid |sigma_hat - sigma|
///   C = L / R, undefined when R = 0.
struct TheoremConstants {
    double l_emp = 0.0;
    double r_emp = 0.0;
    std::optional<double> c_emp;
};

TheoremConstants theorem_constants(std::span<const double> endpoints_true,
                                   std::span<const double> endpoints_fit,
                                   std::span<const double> sigma_true_grid,
                                   std::span<const double> sigma_fit_grid);

/// Monte Carlo standard error of the L estimate above (delta method).
double l_emp_standard_error(std::span<const double> endpoints_true,
                            std::span<const double> endpoints_fit);

/// Grid norms of a parameter gap: sup over the grid, and L2 over [t_0, t_end]
/// by the trapezoid rule (spacing h).
double sup_gap(std::span<const double> a, std::span<const double> b);
double l2_gap_trapezoid(std::span<const double> a, std::span<const double> b, double h);

/// One row of fit diagnostics, as written by the evaluate command.
struct EvalReport {
    std::vector<double> mse_theta;  // per component, on the model grid
    std::vector<double> r2_theta;
    double ks_d = 0.0;
    double ks_p = 1.0;
    Moments moments_true;
    Moments moments_fit;
    TheoremConstants constants;
};

}  // namespace thetafit
