#include "thetafit/likelihood.hpp"

#include "thetafit/rng.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace thetafit;
using testutil::rel_gap;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SdeModelSpec theta_is_diffusion_model() {
    // a = 0, b = theta0: the simplest calibration target
    SdeModelSpec m;
    m.name = "flat";
    m.theta_dim = 1;
    m.heads = {HeadKind::abs_square};
    m.drift = [](double, double, std::span<const double>) { return 0.0; };
    m.diffusion = [](double, double, std::span<const double> th) { return th[0]; };
    m.drift_expr = [](double, double, std::span<const Expr> th) { return cst(th[0].tape(), 0.0); };
    m.diffusion_expr = [](double, double, std::span<const Expr> th) { return th[0]; };
    m.true_theta = [](double) { return std::vector<double>{1.0}; };
    return m;
}

ThetaNodeFn constant_theta(std::vector<double> values) {
    return fixed_theta_nodes([values = std::move(values)](double) { return values; });
}

Trajectory make_trajectory(double h, std::vector<double> values) {
    Trajectory traj;
    traj.step = h;
    traj.values = std::move(values);
    traj.times.resize(traj.values.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        traj.times[k] = static_cast<double>(k) * h;
    }
    return traj;
}

RegressionDataset single_observation(double t, double x1, double x2) {
    RegressionDataset data;
    data.times = {t};
    data.observations = {{x1, x2}};
    return data;
}

double quasi_nll_value(const SdeModelSpec& model, const std::vector<double>& theta,
                       const Trajectory& traj) {
    Tape tape;
    return sde_quasi_nll(tape, model, constant_theta(theta), traj).value();
}

}  // namespace

TEST_SUITE_BEGIN("likelihood");

TEST_CASE("regression term with rho = 0 splits into two 1-d Gaussian terms") {
    Tape tape;
    const double mu1 = 0.3;
    const double mu2 = -1.1;
    const double s1 = 0.7;
    const double s2 = 1.4;
    const double x1 = 0.55;
    const double x2 = -0.9;
    const Expr loss = regression_nll_2d(tape, constant_theta({mu1, mu2, s1, s2, 0.0}),
                                        single_observation(0.0, x1, x2));
    const auto nll_1d = [](double x, double mu, double s) {
        return 0.5 * std::log(kTwoPi * s * s) + 0.5 * (x - mu) * (x - mu) / (s * s);
    };
    CHECK(loss.value() ==
          doctest::Approx(nll_1d(x1, mu1, s1) + nll_1d(x2, mu2, s2)).epsilon(1e-12));
}

TEST_CASE("regression term at the mean with unit variances is ln(2 pi)") {
    Tape tape;
    const Expr loss = regression_nll_2d(tape, constant_theta({0.25, -0.5, 1.0, 1.0, 0.0}),
                                        single_observation(0.0, 0.25, -0.5));
    CHECK(loss.value() == doctest::Approx(std::log(kTwoPi)).epsilon(1e-12));
    CHECK(loss.value() == doctest::Approx(1.837877).epsilon(1e-6));
}

TEST_CASE("regression term matches the bivariate normal density") {
    // mu = (0,0), sigma = (1,2), rho = 0.5, x = (1,1); the oracle evaluates
    // the density from the explicit covariance inverse
    Tape tape;
    const Expr loss = regression_nll_2d(tape, constant_theta({0.0, 0.0, 1.0, 2.0, 0.5}),
                                        single_observation(0.0, 1.0, 1.0));

    const double det = 1.0 * 4.0 - 1.0 * 1.0;  // cov = [[1,1],[1,4]]
    const double inv11 = 4.0 / det;
    const double inv12 = -1.0 / det;
    const double inv22 = 1.0 / det;
    const double quad = inv11 * 1.0 + 2.0 * inv12 * 1.0 + inv22 * 1.0;
    const double expected = 0.5 * std::log(kTwoPi * kTwoPi * det) + 0.5 * quad;
    CHECK(loss.value() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("regression loss rejects a degenerate covariance") {
    Tape tape;
    CHECK_THROWS_AS(regression_nll_2d(tape, constant_theta({0.0, 0.0, 0.0, 1.0, 0.0}),
                                      single_observation(0.0, 1.0, 1.0)),
                    DomainError);
}

TEST_CASE("quasi-likelihood term with a vanishing residual") {
    const SdeModelSpec model = theta_is_diffusion_model();
    const Trajectory traj = make_trajectory(0.01, {0.4, 0.4});  // dx = a h = 0
    const double value = quasi_nll_value(model, {1.0}, traj);
    CHECK(value == doctest::Approx(0.5 * std::log(kTwoPi * 0.01)).epsilon(1e-12));
    CHECK(value == doctest::Approx(-1.3836466).epsilon(1e-6));
}

TEST_CASE("quasi-likelihood term matches direct arithmetic") {
    const SdeModelSpec model = theta_is_diffusion_model();
    const Trajectory traj = make_trajectory(0.1, {0.0, 0.3});  // a = 0, b = 2, dx = 0.3
    const double value = quasi_nll_value(model, {2.0}, traj);
    const double expected = 0.5 * (std::log(kTwoPi * 0.1 * 4.0) + 0.09 / (0.1 * 4.0));
    CHECK(value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("scaling the diffusion shifts the loss by n ln|c| when residuals vanish") {
    const SdeModelSpec model = theta_is_diffusion_model();
    const Trajectory traj = make_trajectory(0.05, std::vector<double>(11, 1.3));  // dx = 0
    const double base = quasi_nll_value(model, {2.0}, traj);
    const double scaled = quasi_nll_value(model, {6.0}, traj);
    CHECK(scaled - base == doctest::Approx(10.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("quasi-likelihood is exactly invariant to the diffusion sign") {
    const SdeModelSpec model = builtin_sde("ex1");
    Rng rng(17);
    std::vector<double> values{1.0};
    for (int i = 0; i < 100; ++i) values.push_back(values.back() + 0.05 * rng.normal());
    const Trajectory traj = make_trajectory(0.002, values);

    const double plus = quasi_nll_value(model, {1.7}, traj);
    const double minus = quasi_nll_value(model, {-1.7}, traj);
    CHECK(plus == minus);  // bitwise: b only enters through square(b)
}

TEST_CASE("singular diffusion names the offending term") {
    const SdeModelSpec model = theta_is_diffusion_model();
    const Trajectory traj = make_trajectory(0.1, {0.0, 0.3});
    Tape tape;
    bool threw = false;
    try {
        sde_quasi_nll(tape, model, constant_theta({0.0}), traj);
    } catch (const DomainError& err) {
        threw = true;
        CHECK(std::string(err.what()).find("term 0") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("loss over a disjoint index union is the sum of the parts") {
    const SdeModelSpec model = builtin_sde("ex1");
    Rng rng(31);
    std::vector<double> values{1.0};
    for (int i = 0; i < 60; ++i) values.push_back(values.back() + 0.1 * rng.normal());
    const Trajectory traj = make_trajectory(0.01, values);

    const std::vector<std::size_t> part_a{0, 2, 4, 11, 30};
    const std::vector<std::size_t> part_b{1, 3, 17, 40, 59, 58};
    std::vector<std::size_t> both = part_a;
    both.insert(both.end(), part_b.begin(), part_b.end());

    const ThetaNodeFn theta = constant_theta({1.3});
    Tape t1;
    Tape t2;
    Tape t3;
    const double united = sde_quasi_nll(t1, model, theta, traj, both).value();
    const double split = sde_quasi_nll(t2, model, theta, traj, part_a).value() +
                         sde_quasi_nll(t3, model, theta, traj, part_b).value();
    CHECK(rel_gap(united, split, 1.0) < 1e-12);
}

TEST_CASE("gradients of both losses match finite differences") {
    Rng rng(2718);
    for (int config = 0; config < 10; ++config) {
        MlpSpec spec;
        spec.layer_widths = {1, static_cast<int>(2 + rng.below(4)),
                             static_cast<int>(2 + rng.below(3)), 0};
        const bool regression = (config % 2 == 0);

        // data; the t = 0 row is dropped because a zero-bias init makes the
        // network vanish identically there, which the loss rightly rejects
        RegressionDataset data;
        Trajectory traj;
        SdeModelSpec model;
        if (regression) {
            spec.layer_widths.back() = 5;
            spec.heads = RegressionCaseSpec::heads();
            const RegressionCaseSpec case_spec = builtin_regression("case1");
            RegressionCaseSpec small = case_spec;
            small.n = 6;
            Rng data_rng(100 + static_cast<std::uint64_t>(config));
            data = regression_sample(small, data_rng);
            data.times.erase(data.times.begin());
            data.observations.erase(data.observations.begin());
        } else {
            model = builtin_sde(config % 4 == 1 ? "ex1" : "ex4_log");
            spec.layer_widths.back() = model.theta_dim;
            spec.heads = model.heads;
            std::vector<double> values{model.x0};
            Rng data_rng(200 + static_cast<std::uint64_t>(config));
            for (int i = 0; i < 6; ++i) values.push_back(values.back() + 0.1 * data_rng.normal());
            traj = make_trajectory(0.02, values);
            for (double& t : traj.times) t += 0.02;
        }

        const Weights w0 = mlp_init(spec, 300 + static_cast<std::uint64_t>(config));

        const auto loss_value = [&](std::span<const double> wv) {
            Tape tape;
            std::vector<Expr> nodes;
            for (double v : wv) nodes.push_back(make_leaf(tape, v));
            const ThetaNodeFn theta = [&](Tape& t, double time) {
                return apply_heads(mlp_forward(spec, t, nodes, time), spec.heads);
            };
            return regression ? regression_nll_2d(tape, theta, data).value()
                              : sde_quasi_nll(tape, model, theta, traj).value();
        };

        Tape tape;
        std::vector<Expr> nodes;
        for (double v : w0.values) nodes.push_back(make_leaf(tape, v));
        const ThetaNodeFn theta = [&](Tape& t, double time) {
            return apply_heads(mlp_forward(spec, t, nodes, time), spec.heads);
        };
        const Expr loss = regression ? regression_nll_2d(tape, theta, data)
                                     : sde_quasi_nll(tape, model, theta, traj);
        const GradientVector grad = tape.backward(loss.ref());

        std::vector<double> probe = w0.values;
        for (std::size_t i = 0; i < probe.size(); ++i) {
            const double step = 1e-6;
            probe[i] = w0.values[i] + step;
            const double up = loss_value(probe);
            probe[i] = w0.values[i] - step;
            const double down = loss_value(probe);
            probe[i] = w0.values[i];
            const double fd = (up - down) / (2.0 * step);
            CHECK(rel_gap(grad.at(nodes[i].ref()), fd) < 1e-5);
        }
    }
}

TEST_CASE("the loss prefers the generating parameters") {
    // NLL at the true sigma should beat a shifted sigma on almost every
    // trajectory drawn from the true model
    const SdeModelSpec model = builtin_sde("ex1");
    int wins = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(4000 + static_cast<std::uint64_t>(trial));
        const Trajectory traj =
            euler_path(model, true_theta_fn(model), model.x0, 2.0, 500, rng);

        const ThetaNodeFn truth = fixed_theta_nodes(model.true_theta);
        const ThetaNodeFn shifted = fixed_theta_nodes([&](double t) {
            std::vector<double> th = model.true_theta(t);
            th[0] += 0.5;
            return th;
        });
        Tape t1;
        Tape t2;
        if (sde_quasi_nll(t1, model, truth, traj).value() <
            sde_quasi_nll(t2, model, shifted, traj).value()) {
            ++wins;
        }
    }
    CHECK(wins >= 99);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const Quadrature q = gauss_legendre(8);
    double weight_sum = 0.0;
    for (double w : q.weights) weight_sum += w;
    CHECK(weight_sum == doctest::Approx(2.0).epsilon(1e-14));

    // degree 15 is exact for an 8-point rule
    double integral = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        integral += q.weights[i] * (std::pow(q.nodes[i], 14) + 3.0 * std::pow(q.nodes[i], 5));
    }
    CHECK(integral == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("OU oracle: quadrature variance matches the constant-sigma closed form") {
    const double theta1 = 1.7;
    const double c = 0.8;
    Rng rng(55);
    std::vector<double> values{0.5};
    for (int i = 0; i < 50; ++i) values.push_back(values.back() + 0.1 * rng.normal());
    const Trajectory traj = make_trajectory(0.02, values);

    const double quad_nll = ou_exact_nll(theta1, [&](double) { return c; }, traj);

    // closed form: v = c^2 (1 - e^{-2 theta1 h}) / (2 theta1)
    const double h = traj.step;
    const double v = c * c * (1.0 - std::exp(-2.0 * theta1 * h)) / (2.0 * theta1);
    const double decay = std::exp(-theta1 * h);
    double closed = 0.0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const double res = values[k + 1] - decay * values[k];
        closed += 0.5 * std::log(kTwoPi * v) + res * res / (2.0 * v);
    }
    CHECK(std::fabs(quad_nll - closed) < 1e-10);
}

TEST_CASE("OU oracle approaches the driftless quasi-likelihood as theta1 -> 0") {
    Rng rng(66);
    std::vector<double> values{0.0};
    for (int i = 0; i < 100; ++i) values.push_back(values.back() + 0.1 * rng.normal());
    const Trajectory traj = make_trajectory(0.01, values);

    const double exact = ou_exact_nll(1e-9, [](double) { return 1.0; }, traj);
    const double quasi = quasi_nll_value(theta_is_diffusion_model(), {1.0}, traj);
    CHECK(std::fabs(exact - quasi) < 1e-5);

    CHECK_THROWS_AS(ou_exact_nll(0.0, [](double) { return 1.0; }, traj), DomainError);
}

TEST_CASE("OU oracle and quasi-likelihood converge as the step shrinks") {
    const double theta1 = 1.0;
    const auto sigma = [](double t) { return 1.0 + 0.5 * std::sin(t); };

    SdeModelSpec ou;
    ou.name = "ou";
    ou.theta_dim = 1;
    ou.heads = {HeadKind::abs_square};
    ou.drift = [theta1](double, double x, std::span<const double>) { return -theta1 * x; };
    ou.diffusion = [](double, double, std::span<const double> th) { return th[0]; };
    ou.drift_expr = [theta1](double, double x, std::span<const Expr> th) {
        return cst(th[0].tape(), -theta1 * x);
    };
    ou.diffusion_expr = [](double, double, std::span<const Expr> th) { return th[0]; };
    ou.true_theta = [&](double t) { return std::vector<double>{sigma(t)}; };

    std::vector<double> mean_term_gap;
    for (const double h : {1e-2, 1e-3, 1e-4}) {
        const auto n = static_cast<std::size_t>(std::llround(1.0 / h));
        Rng rng(7);
        const Trajectory traj = euler_path(ou, true_theta_fn(ou), 0.3, 1.0, n, rng);

        const double exact = ou_exact_nll(theta1, sigma, traj);
        Tape tape;
        const double quasi =
            sde_quasi_nll(tape, ou, fixed_theta_nodes(ou.true_theta), traj).value();
        mean_term_gap.push_back(std::fabs(exact - quasi) / static_cast<double>(n));
    }
    CHECK(mean_term_gap[1] < mean_term_gap[0]);
    CHECK(mean_term_gap[2] < mean_term_gap[1]);
}

TEST_SUITE_END();
