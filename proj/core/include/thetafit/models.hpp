#pragma once

#include "thetafit/autodiff.hpp"
#include "thetafit/neuralnet.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace thetafit {

/// Scalar SDE  dX = a(t, X, theta(t)) dt + b(t, X, theta(t)) dW  together
/// with the reference grid, the generating parameter function and the head
/// conventions its components need. The coefficient callbacks exist in two
/// flavors: plain doubles for simulation and Expr for differentiable losses.
struct SdeModelSpec {
    std::string name;
    int theta_dim = 1;
    std::vector<HeadKind> heads;

    double x0 = 0.0;
    double horizon = 1.0;  // T
    double step = 0.01;    // h; horizon/step must be integral

    /// Parameters the calibration treats as known rather than learned.
    std::map<std::string, double> known_constants;

    std::function<double(double t, double x, std::span<const double> theta)> drift;
    std::function<double(double t, double x, std::span<const double> theta)> diffusion;
    std::function<Expr(double t, double x, std::span<const Expr> theta)> drift_expr;
    std::function<Expr(double t, double x, std::span<const Expr> theta)> diffusion_expr;

    std::function<std::vector<double>(double t)> true_theta;

    /// horizon / step as an integer; ConfigError if it is not one.
    std::size_t grid_steps() const;
};

/// Built-in calibration problems:
///   ex1      dX = kappa (mu - X) dt + sigma(t) dW          (Ornstein-Uhlenbeck)
///   ex2      dX = (mu - kappa sign(X)) dt + sigma(t) dW    (threshold diffusion)
///   ex3      dX = kappa cos(X) dt + ((sin(X)+1.5) sigma(t) + 2) dW
///   ex4_log  dX = (mu(t) - sigma(t)^2/2) dt + sigma(t) dW  (log Black-Scholes)
SdeModelSpec builtin_sde(std::string_view name);  // ConfigError on unknown name
std::vector<std::string> builtin_sde_names();

/// Symmetric 2x2 covariance.
struct Cov2 {
    double var1 = 0.0;
    double cov = 0.0;
    double var2 = 0.0;
};

/// Two-dimensional Gaussian regression problem X(t_k) = mu(t_k) + eps(t_k),
/// eps ~ N(0, Sigma(t_k)), observed on t_k = k * 2*pi/n for k = 0..n-1.
struct RegressionCaseSpec {
    std::string name;
    std::size_t n = 3000;
    std::function<double(double)> mu1;
    std::function<double(double)> mu2;
    std::function<Cov2(double)> covariance;

    double time_at(std::size_t k) const;

    /// Heads for the five components [mu1, mu2, sigma1, sigma2, rho].
    static std::vector<HeadKind> heads();
};

/// Built-in cases share mu1 = 0.5 + sin t, mu2 = cos t, base sigma1 = 0.1,
/// sigma2 = 0.15, rho = 0.5:
///   case1  constant covariance
///   case2  variances scaled by |mu_i(t)|^2, correlation constant
///   case3  variances scaled by |mu_i(t)|, correlation time-dependent
RegressionCaseSpec builtin_regression(std::string_view name);
std::vector<std::string> builtin_regression_names();

}  // namespace thetafit
