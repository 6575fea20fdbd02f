#include "thetafit/neuralnet.hpp"

#include "thetafit/rng.hpp"

#include <cmath>

namespace thetafit {

std::string head_name(HeadKind kind) {
    switch (kind) {
        case HeadKind::identity:
            return "identity";
        case HeadKind::abs_square:
            return "abs_square";
        case HeadKind::tanh_correlation:
            return "tanh_corr";
    }
    return "identity";
}

HeadKind parse_head(const std::string& name) {
    if (name == "identity") return HeadKind::identity;
    if (name == "abs_square") return HeadKind::abs_square;
    if (name == "tanh_corr") return HeadKind::tanh_correlation;
    throw ConfigError("unknown head kind '" + name + "'");
}

std::size_t MlpSpec::weight_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
        const auto in = static_cast<std::size_t>(layer_widths[l]);
        const auto out = static_cast<std::size_t>(layer_widths[l + 1]);
        n += in * out + out;
    }
    return n;
}

void MlpSpec::validate() const {
    if (layer_widths.size() < 2) {
        throw ConfigError("network needs at least an input and an output layer");
    }
    for (int w : layer_widths) {
        if (w <= 0) throw ConfigError("layer widths must be positive");
    }
    if (layer_widths.front() != 1) {
        throw ConfigError("input width must be 1 (the time value)");
    }
    if (heads.size() != static_cast<std::size_t>(layer_widths.back())) {
        throw ConfigError("head count " + std::to_string(heads.size()) +
                          " does not match output width " + std::to_string(layer_widths.back()));
    }
}

Weights mlp_init(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    Weights w;
    w.values.reserve(spec.weight_count());
    for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
        const int fan_in = spec.layer_widths[l];
        const int fan_out = spec.layer_widths[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (int i = 0; i < fan_in * fan_out; ++i) {
            w.values.push_back(rng.uniform(-limit, limit));
        }
        for (int i = 0; i < fan_out; ++i) {
            w.values.push_back(0.0);
        }
    }
    return w;
}

namespace {

// Shared forward pass; S is double or Expr. `time` already has type S.
template <typename S>
std::vector<S> forward_impl(const MlpSpec& spec, std::span<const S> w, S time) {
    std::vector<S> current{time};
    std::vector<S> next;
    std::size_t offset = 0;
    const std::size_t n_layers = spec.layer_widths.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto in = static_cast<std::size_t>(spec.layer_widths[l]);
        const auto out = static_cast<std::size_t>(spec.layer_widths[l + 1]);
        next.clear();
        next.reserve(out);
        const std::size_t bias_offset = offset + in * out;
        for (std::size_t j = 0; j < out; ++j) {
            S acc = w[bias_offset + j];
            for (std::size_t i = 0; i < in; ++i) {
                acc = acc + w[offset + j * in + i] * current[i];
            }
            next.push_back(l + 1 < n_layers ? relu(acc) : acc);
        }
        current.swap(next);
        offset = bias_offset + out;
    }
    return current;
}

}  // namespace

std::vector<double> mlp_forward(const MlpSpec& spec, std::span<const double> weights, double t) {
    return forward_impl<double>(spec, weights, t);
}

std::vector<Expr> mlp_forward(const MlpSpec& spec, Tape& tape, std::span<const Expr> weights,
                              double t) {
    return forward_impl<Expr>(spec, weights, cst(tape, t));
}

namespace {

// std::tanh saturates to exactly +-1.0 for |x| beyond ~19, which would make
// 1 - rho^2 vanish inside the loss; the scaling keeps the output strictly
// inside (-1, 1) at a distortion far below statistical resolution.
constexpr double kCorrelationScale = 1.0 - 1e-12;

}  // namespace

std::vector<double> apply_heads(std::span<const double> raw, std::span<const HeadKind> heads) {
    std::vector<double> out(raw.begin(), raw.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (heads[i] == HeadKind::tanh_correlation) {
            out[i] = kCorrelationScale * std::tanh(out[i]);
        }
    }
    return out;
}

std::vector<Expr> apply_heads(std::span<const Expr> raw, std::span<const HeadKind> heads) {
    std::vector<Expr> out(raw.begin(), raw.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (heads[i] == HeadKind::tanh_correlation) {
            out[i] = kCorrelationScale * tanh(out[i]);
        }
    }
    return out;
}

std::vector<double> reported_theta(std::span<const double> raw, std::span<const HeadKind> heads) {
    std::vector<double> out(raw.begin(), raw.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        switch (heads[i]) {
            case HeadKind::abs_square:
                out[i] = std::fabs(out[i]);
                break;
            case HeadKind::tanh_correlation:
                out[i] = kCorrelationScale * std::tanh(out[i]);
                break;
            case HeadKind::identity:
                break;
        }
    }
    return out;
}

}  // namespace thetafit
