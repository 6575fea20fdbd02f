#pragma once

#include "thetafit/autodiff.hpp"
#include "thetafit/models.hpp"
#include "thetafit/simulate.hpp"

#include <functional>
#include <span>
#include <vector>

namespace thetafit {

/// Differentiable parameter provider: theta components as nodes of `tape`
/// at time t. During training this is the network forward pass (heads
/// applied); for evaluating a loss at fixed parameters use
/// fixed_theta_nodes.
using ThetaNodeFn = std::function<std::vector<Expr>(Tape& tape, double t)>;

/// Wraps a plain parameter function as tape constants.
ThetaNodeFn fixed_theta_nodes(std::function<std::vector<double>(double)> theta);

/// Negative log-likelihood of the 2-d heteroscedastic Gaussian regression:
/// per observation, with theta(t) = [mu1, mu2, sigma1, sigma2, rho],
///
///   ln(2 pi |s1| |s2| sqrt(1-rho^2))
///     + [ ((x1-mu1)/s1)^2 + ((x2-mu2)/s2)^2
///         - 2 rho (x1-mu1)(x2-mu2)/(s1 s2) ] / (2 (1-rho^2))
///
/// The sigma components enter through their squares (and |.| in the cross
/// term), so the value is invariant to their sign. A degenerate covariance
/// (sigma = 0 or |rho| >= 1) surfaces as a DomainError from the log.
///
/// `terms` selects observation indices; empty means all. Summation order is
/// the order of `terms`.
Expr regression_nll_2d(Tape& tape, const ThetaNodeFn& theta_at, const RegressionDataset& data,
                       std::span<const std::size_t> terms = {});

/// Negative log-quasi-likelihood of a scalar SDE under the Euler transition
/// density: per transition k,
///
///   0.5 * [ ln(2 pi h b^2) + (dx_k - a h)^2 / (h b^2) ]
///
/// with a, b evaluated at (t_k, x_k, theta(t_k)). b enters only as b^2, so
/// the loss is exactly invariant under a sign flip of the diffusion output;
/// b^2 = 0 surfaces as a DomainError naming the offending value.
Expr sde_quasi_nll(Tape& tape, const SdeModelSpec& model, const ThetaNodeFn& theta_at,
                   const Trajectory& traj, std::span<const std::size_t> terms = {});

/// Exact negative log-likelihood of dX = -theta1 X dt + theta2(t) dW, whose
/// transition is Gaussian with mean e^{-theta1 h} x_k and variance
///
///   v_k = int_{t_k}^{t_{k+1}} theta2(u)^2 e^{-2 theta1 (t_{k+1}-u)} du,
///
/// computed with 64-point Gauss-Legendre quadrature per step. Serves as an
/// independent check of the quasi-likelihood; not differentiable.
double ou_exact_nll(double theta1, const std::function<double(double)>& theta2,
                    const Trajectory& traj);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

}  // namespace thetafit
