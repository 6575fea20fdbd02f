#include "thetafit/models.hpp"

#include <cmath>
#include <numbers>

namespace thetafit {

namespace {

double sign_of(double x) noexcept {
    // sign(0) := 0, the symmetric convention
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

double sigma_ramp_sine(double t) noexcept { return 2.0 * t + 0.4 + 1.5 * std::sin(4.0 * t); }

SdeModelSpec make_ex1() {
    const double kappa = 2.0;
    const double mu = 0.5;
    SdeModelSpec m;
    m.name = "ex1";
    m.theta_dim = 1;
    m.heads = {HeadKind::abs_square};
    m.x0 = 1.0;
    m.horizon = 2.0;
    m.step = 0.0002;
    m.known_constants = {{"kappa", kappa}, {"mu", mu}};
    m.drift = [=](double, double x, std::span<const double>) { return kappa * (mu - x); };
    m.diffusion = [](double, double, std::span<const double> th) { return th[0]; };
    m.drift_expr = [=](double, double x, std::span<const Expr> th) {
        return cst(th[0].tape(), kappa * (mu - x));
    };
    m.diffusion_expr = [](double, double, std::span<const Expr> th) { return th[0]; };
    m.true_theta = [](double t) { return std::vector<double>{sigma_ramp_sine(t)}; };
    return m;
}

SdeModelSpec make_ex2() {
    const double kappa = 2.0;
    const double mu = 0.5;
    SdeModelSpec m = make_ex1();
    m.name = "ex2";
    m.drift = [=](double, double x, std::span<const double>) { return mu - kappa * sign_of(x); };
    m.drift_expr = [=](double, double x, std::span<const Expr> th) {
        return cst(th[0].tape(), mu - kappa * sign_of(x));
    };
    return m;
}

SdeModelSpec make_ex3() {
    const double kappa = 0.4;
    SdeModelSpec m;
    m.name = "ex3";
    m.theta_dim = 1;
    m.heads = {HeadKind::abs_square};
    m.x0 = 1.2;
    m.horizon = 3.8;
    m.step = 0.00038;
    m.known_constants = {{"kappa", kappa}};
    m.drift = [=](double, double x, std::span<const double>) { return kappa * std::cos(x); };
    m.diffusion = [](double, double x, std::span<const double> th) {
        return (std::sin(x) + 1.5) * th[0] + 2.0;
    };
    m.drift_expr = [=](double, double x, std::span<const Expr> th) {
        return cst(th[0].tape(), kappa * std::cos(x));
    };
    m.diffusion_expr = [](double, double x, std::span<const Expr> th) {
        return (std::sin(x) + 1.5) * th[0] + 2.0;
    };
    m.true_theta = [](double t) {
        return std::vector<double>{2.0 * std::sin(2.0 * std::numbers::pi * t) + t};
    };
    return m;
}

SdeModelSpec make_ex4_log() {
    SdeModelSpec m;
    m.name = "ex4_log";
    m.theta_dim = 2;  // theta = [mu(t), sigma(t)]
    m.heads = {HeadKind::identity, HeadKind::abs_square};
    m.x0 = 1.2;
    m.horizon = 1.2;
    m.step = 0.000015;
    m.drift = [](double, double, std::span<const double> th) {
        return th[0] - 0.5 * th[1] * th[1];
    };
    m.diffusion = [](double, double, std::span<const double> th) { return th[1]; };
    m.drift_expr = [](double, double, std::span<const Expr> th) {
        return th[0] - 0.5 * square(th[1]);
    };
    m.diffusion_expr = [](double, double, std::span<const Expr> th) { return th[1]; };
    m.true_theta = [](double t) {
        const double pi = std::numbers::pi;
        const double mu = 7.5 * t * t * std::sin(3.5 * t * pi);
        const double sigma = (3.0 + 3.0 * t * t - 3.0 * t * std::sin(3.0 * t * pi)) / 40.0;
        return std::vector<double>{mu, sigma};
    };
    return m;
}

}  // namespace

std::size_t SdeModelSpec::grid_steps() const {
    const double ratio = horizon / step;
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    if (n == 0 || std::fabs(ratio - static_cast<double>(n)) > 1e-6) {
        throw ConfigError("horizon/step is not a positive integer for model '" + name + "'");
    }
    return n;
}

SdeModelSpec builtin_sde(std::string_view name) {
    if (name == "ex1") return make_ex1();
    if (name == "ex2") return make_ex2();
    if (name == "ex3") return make_ex3();
    if (name == "ex4_log") return make_ex4_log();
    throw ConfigError("unknown SDE model '" + std::string(name) +
                      "' (built-ins: ex1, ex2, ex3, ex4_log)");
}

std::vector<std::string> builtin_sde_names() { return {"ex1", "ex2", "ex3", "ex4_log"}; }

double RegressionCaseSpec::time_at(std::size_t k) const {
    return static_cast<double>(k) * (2.0 * std::numbers::pi / static_cast<double>(n));
}

std::vector<HeadKind> RegressionCaseSpec::heads() {
    return {HeadKind::identity, HeadKind::identity, HeadKind::abs_square, HeadKind::abs_square,
            HeadKind::tanh_correlation};
}

RegressionCaseSpec builtin_regression(std::string_view name) {
    const double s1 = 0.1;
    const double s2 = 0.15;
    const double rho = 0.5;

    RegressionCaseSpec c;
    c.n = 3000;
    c.mu1 = [](double t) { return 0.5 + std::sin(t); };
    c.mu2 = [](double t) { return std::cos(t); };

    if (name == "case1") {
        c.name = "case1";
        c.covariance = [=](double) { return Cov2{s1 * s1, rho * s1 * s2, s2 * s2}; };
    } else if (name == "case2") {
        c.name = "case2";
        c.covariance = [=, mu1 = c.mu1, mu2 = c.mu2](double t) {
            const double a1 = std::fabs(mu1(t));
            const double a2 = std::fabs(mu2(t));
            return Cov2{s1 * s1 * a1 * a1, rho * s1 * s2 * a1 * a2, s2 * s2 * a2 * a2};
        };
    } else if (name == "case3") {
        c.name = "case3";
        c.covariance = [=, mu1 = c.mu1, mu2 = c.mu2](double t) {
            const double a1 = std::fabs(mu1(t));
            const double a2 = std::fabs(mu2(t));
            return Cov2{s1 * s1 * a1, rho * s1 * s2 * a1 * a2, s2 * s2 * a2};
        };
    } else {
        throw ConfigError("unknown regression case '" + std::string(name) +
                          "' (built-ins: case1, case2, case3)");
    }
    return c;
}

std::vector<std::string> builtin_regression_names() { return {"case1", "case2", "case3"}; }

}  // namespace thetafit
