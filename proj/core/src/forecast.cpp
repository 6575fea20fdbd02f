#include "thetafit/forecast.hpp"

#include "thetafit/errors.hpp"

#include <cmath>
#include <numbers>

namespace thetafit {

double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw DomainError("normal_quantile requires p in (0, 1)", p);
    }

    // Acklam's rational approximation, three regions.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

Forecast mc_forecast(const SdeModelSpec& model, const ThetaFn& theta_hat, double x_start,
                     std::size_t n_steps, double h, double alpha, Rng& rng, double t_start,
                     std::size_t carrier_paths) {
    if (n_steps == 0) throw ConfigError("forecast needs at least one step");
    if (!(h > 0.0)) throw ConfigError("forecast step must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (carrier_paths == 0) throw ConfigError("carrier_paths must be positive");

    const double q = normal_quantile(0.5 * (1.0 + alpha));
    const double sqrt_h = std::sqrt(h);

    Forecast out;
    out.alpha = alpha;
    out.step = h;
    out.times.assign(n_steps, 0.0);
    out.centers.assign(n_steps, 0.0);
    out.scales.assign(n_steps, 0.0);

    std::vector<double> theta(static_cast<std::size_t>(model.theta_dim));
    for (std::size_t path = 0; path < carrier_paths; ++path) {
        double x = x_start;
        std::vector<double> carrier{x};
        for (std::size_t k = 1; k <= n_steps; ++k) {
            const double t_prev = t_start + static_cast<double>(k - 1) * h;
            theta_hat(t_prev, theta);
            const double a = model.drift(t_prev, x, theta);
            const double b = model.diffusion(t_prev, x, theta);

            out.centers[k - 1] += x + a * h;
            out.scales[k - 1] += sqrt_h * std::fabs(b);

            x = x + a * h + b * sqrt_h * rng.normal();
            if (!std::isfinite(x) || std::fabs(x) > 1e12) {
                throw SimulationError("state overflow in forecast carrier path", k - 1);
            }
            carrier.push_back(x);
        }
        if (path == 0) out.carrier = std::move(carrier);
    }

    const double inv_paths = 1.0 / static_cast<double>(carrier_paths);
    out.predictions.resize(n_steps);
    out.lower.resize(n_steps);
    out.upper.resize(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        out.times[k] = t_start + static_cast<double>(k + 1) * h;
        out.centers[k] *= inv_paths;
        out.scales[k] *= inv_paths;
        out.predictions[k] = out.centers[k];
        out.lower[k] = out.centers[k] - q * out.scales[k];
        out.upper[k] = out.centers[k] + q * out.scales[k];
    }
    return out;
}

}  // namespace thetafit
