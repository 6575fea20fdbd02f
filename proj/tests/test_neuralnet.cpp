#include "thetafit/neuralnet.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace thetafit;
using testutil::rel_gap;

TEST_SUITE_BEGIN("neuralnet");

TEST_CASE("weight count follows the layer layout") {
    MlpSpec spec;
    spec.layer_widths = {1, 32, 32, 32, 1};
    spec.heads = {HeadKind::abs_square};
    CHECK(spec.weight_count() == 2209);  // (1*32+32)+(32*32+32)+(32*32+32)+(32*1+1)

    MlpSpec tiny;
    tiny.layer_widths = {1, 3, 2};
    tiny.heads = {HeadKind::identity, HeadKind::identity};
    CHECK(tiny.weight_count() == 3 + 3 + 6 + 2);
}

TEST_CASE("spec validation") {
    MlpSpec spec;
    spec.layer_widths = {2, 4, 1};
    spec.heads = {HeadKind::identity};
    CHECK_THROWS_AS(spec.validate(), ConfigError);  // input width must be 1

    spec.layer_widths = {1, 4, 2};
    CHECK_THROWS_AS(spec.validate(), ConfigError);  // heads/output mismatch

    spec.heads = {HeadKind::identity, HeadKind::identity};
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("initialization is deterministic with zero biases and Glorot bounds") {
    MlpSpec spec;
    spec.layer_widths = {1, 16, 16, 2};
    spec.heads = {HeadKind::identity, HeadKind::abs_square};

    const Weights a = mlp_init(spec, 99);
    const Weights b = mlp_init(spec, 99);
    CHECK(a.values == b.values);
    CHECK(a.values.size() == spec.weight_count());

    const Weights c = mlp_init(spec, 100);
    CHECK(a.values != c.values);

    // biases sit after each layer's matrix block
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
        const auto in = static_cast<std::size_t>(spec.layer_widths[l]);
        const auto out = static_cast<std::size_t>(spec.layer_widths[l + 1]);
        const double limit = std::sqrt(6.0 / (static_cast<double>(in) + static_cast<double>(out)));
        for (std::size_t i = 0; i < in * out; ++i) {
            CHECK(std::fabs(a.values[offset + i]) <= limit);
        }
        for (std::size_t i = 0; i < out; ++i) {
            CHECK(a.values[offset + in * out + i] == 0.0);
        }
        offset += in * out + out;
    }
}

TEST_CASE("zero weights give zero outputs; a single layer is affine") {
    MlpSpec spec;
    spec.layer_widths = {1, 4, 3};
    spec.heads = {HeadKind::identity, HeadKind::identity, HeadKind::identity};
    const std::vector<double> zeros(spec.weight_count(), 0.0);
    for (double out : mlp_forward(spec, zeros, 1.7)) CHECK(out == 0.0);

    MlpSpec affine;
    affine.layer_widths = {1, 1};
    affine.heads = {HeadKind::identity};
    const std::vector<double> w{2.5, -0.75};  // weight a, bias b
    for (double t : {-1.0, 0.0, 0.4, 3.0}) {
        CHECK(mlp_forward(affine, w, t)[0] == doctest::Approx(2.5 * t - 0.75).epsilon(1e-15));
    }
}

TEST_CASE("forward pass is bit-identical across calls") {
    MlpSpec spec;
    spec.layer_widths = {1, 8, 8, 2};
    spec.heads = {HeadKind::identity, HeadKind::abs_square};
    const Weights w = mlp_init(spec, 4);
    const auto out1 = mlp_forward(spec, w.values, 0.37);
    const auto out2 = mlp_forward(spec, w.values, 0.37);
    CHECK(out1 == out2);
}

TEST_CASE("tape forward matches the double forward") {
    MlpSpec spec;
    spec.layer_widths = {1, 8, 8, 2};
    spec.heads = {HeadKind::identity, HeadKind::abs_square};
    const Weights w = mlp_init(spec, 12);

    Tape tape;
    std::vector<Expr> nodes;
    for (double v : w.values) nodes.push_back(make_leaf(tape, v));
    const auto expr_out = mlp_forward(spec, tape, nodes, 0.9);
    const auto plain_out = mlp_forward(spec, w.values, 0.9);
    REQUIRE(expr_out.size() == plain_out.size());
    for (std::size_t i = 0; i < plain_out.size(); ++i) {
        CHECK(expr_out[i].value() == plain_out[i]);
    }
}

TEST_CASE("head application") {
    const std::vector<HeadKind> heads{HeadKind::identity, HeadKind::abs_square,
                                      HeadKind::tanh_correlation};
    const std::vector<double> raw{1.25, -0.8, 0.0};
    const auto loss_view = apply_heads(raw, heads);
    CHECK(loss_view[0] == 1.25);
    CHECK(loss_view[1] == -0.8);  // squared inside the loss, passed through here
    CHECK(loss_view[2] == 0.0);   // tanh(0) = 0

    const auto reported = reported_theta(raw, heads);
    CHECK(reported[0] == 1.25);
    CHECK(reported[1] == 0.8);
    CHECK(reported[2] == 0.0);

    // tanh head stays strictly inside (-1, 1) even for huge raw values
    const std::vector<double> huge{0.0, 0.0, 750.0};
    const auto capped = apply_heads(huge, heads);
    CHECK(capped[2] < 1.0);
    CHECK(capped[2] > 0.99);
    const std::vector<double> huge_neg{0.0, 0.0, -750.0};
    CHECK(apply_heads(huge_neg, heads)[2] > -1.0);
}

TEST_CASE("outputs are piecewise linear in t") {
    MlpSpec spec;
    spec.layer_widths = {1, 16, 16, 1};
    spec.heads = {HeadKind::identity};
    const Weights w = mlp_init(spec, 3);

    // three equally spaced points well inside one linear region: the second
    // difference of an exactly affine map vanishes
    const double t0 = 0.5;
    const double dt = 1e-3;
    const double y0 = mlp_forward(spec, w.values, t0 - dt)[0];
    const double y1 = mlp_forward(spec, w.values, t0)[0];
    const double y2 = mlp_forward(spec, w.values, t0 + dt)[0];
    CHECK(std::fabs(y2 - 2.0 * y1 + y0) < 1e-12);
}

TEST_CASE("gradients through the forward pass match finite differences") {
    MlpSpec spec;
    spec.layer_widths = {1, 6, 4, 2};
    spec.heads = {HeadKind::identity, HeadKind::abs_square};
    Weights w = mlp_init(spec, 21);

    // scalar function of the outputs: sum of squares at two time points
    const auto value_at = [&](std::span<const double> values) {
        double acc = 0.0;
        for (double t : {0.2, 1.3}) {
            for (double out : mlp_forward(spec, values, t)) acc += out * out;
        }
        return acc;
    };

    Tape tape;
    std::vector<Expr> nodes;
    for (double v : w.values) nodes.push_back(make_leaf(tape, v));
    Expr acc = cst(tape, 0.0);
    for (double t : {0.2, 1.3}) {
        for (const Expr& out : mlp_forward(spec, tape, nodes, t)) acc = acc + square(out);
    }
    const GradientVector grad = tape.backward(acc.ref());

    std::vector<double> probe = w.values;
    const double step = 1e-6;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        probe[i] = w.values[i] + step;
        const double up = value_at(probe);
        probe[i] = w.values[i] - step;
        const double down = value_at(probe);
        probe[i] = w.values[i];
        const double fd = (up - down) / (2.0 * step);
        CHECK(rel_gap(grad.at(nodes[i].ref()), fd) < 1e-5);
    }
}

TEST_SUITE_END();
