#pragma once

#include "thetafit/autodiff.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace thetafit {

/// Output-head convention per parameter component.
///
/// - identity: component used as-is (means, drift parameters).
/// - abs_square: diffusion magnitude. The raw output reaches the loss only
///   through its square, so its sign is unidentifiable; reported values take
///   the absolute value.
/// - tanh_correlation: correlation mapped through tanh into (-1, 1), which
///   keeps 2x2 covariance matrices positive definite.
enum class HeadKind : std::uint8_t {
    identity,
    abs_square,
    tanh_correlation,
};

std::string head_name(HeadKind kind);
HeadKind parse_head(const std::string& name);  // ConfigError on unknown name

/// Fully connected network t -> parameter components: ReLU hidden layers,
/// linear output layer, one head per output component.
struct MlpSpec {
    std::vector<int> layer_widths;  // first entry 1 (time input)
    std::vector<HeadKind> heads;    // size equals the last width

    int output_dim() const { return layer_widths.back(); }
    std::size_t weight_count() const;

    /// Throws ConfigError unless widths are positive, input width is 1 and
    /// heads match the output width.
    void validate() const;
};

/// Flat parameter vector. Layout per layer: the out x in weight matrix in
/// row-major (output-major) order, then the biases; layers in order.
struct Weights {
    std::vector<double> values;
};

/// Uniform Glorot initialization, bounds +-sqrt(6/(fan_in+fan_out)) per
/// layer; biases zero. Deterministic in the seed.
Weights mlp_init(const MlpSpec& spec, std::uint64_t seed);

std::vector<double> mlp_forward(const MlpSpec& spec, std::span<const double> weights, double t);

/// Differentiable forward pass: weights are tape nodes, outputs are tape
/// nodes of the same tape.
std::vector<Expr> mlp_forward(const MlpSpec& spec, Tape& tape, std::span<const Expr> weights,
                              double t);

/// Loss-side view of the raw outputs: identity and abs_square pass through
/// (the loss squares the latter itself), tanh_correlation applies tanh.
std::vector<double> apply_heads(std::span<const double> raw, std::span<const HeadKind> heads);
std::vector<Expr> apply_heads(std::span<const Expr> raw, std::span<const HeadKind> heads);

/// Reporting-side view: like apply_heads, but abs_square components come
/// back as |raw|. This is the fitted parameter function users see.
std::vector<double> reported_theta(std::span<const double> raw, std::span<const HeadKind> heads);

}  // namespace thetafit
