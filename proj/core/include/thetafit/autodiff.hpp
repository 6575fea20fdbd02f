#pragma once

#include "thetafit/errors.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace thetafit {

/// Scalar operations recorded on a Tape. The set is the closure of everything
/// the built-in losses and network forward passes need.
enum class OpKind : std::uint8_t {
    leaf,
    add,
    sub,
    mul,
    div,
    neg,
    ln,
    exp,
    sin,
    cos,
    sqrt,
    tanh,
    softplus,
    square,
    abs,
};

/// 1 for unary ops, 2 for binary ops, 0 for leaf.
int op_arity(OpKind kind) noexcept;

/// Position of a node on its tape.
struct NodeRef {
    std::uint32_t index = 0;
};

/// Adjoints d(root)/d(node) produced by one reverse sweep. Every node the
/// root depends on has its adjoint; nodes the root does not reach read as 0.
class GradientVector {
public:
    double at(NodeRef ref) const noexcept {
        return ref.index < adjoints_.size() ? adjoints_[ref.index] : 0.0;
    }
    std::size_t size() const noexcept { return adjoints_.size(); }

private:
    friend class Tape;
    std::vector<double> adjoints_;
};

/// Append-only scalar expression graph. Operands always precede their
/// consumers, so a single reverse pass over the node sequence propagates
/// adjoints. Intended lifetime is one loss evaluation: build, sweep, clear.
///
/// Single-writer; distinct tapes may be built and swept concurrently.
class Tape {
public:
    /// New input node. Two leaves with equal values are distinct nodes.
    NodeRef leaf(double value);

    /// Scalar constant; repeated values share one node within a tape.
    NodeRef constant(double value);

    NodeRef apply(OpKind kind, NodeRef a);
    NodeRef apply(OpKind kind, NodeRef a, NodeRef b);

    double primal(NodeRef ref) const noexcept { return nodes_[ref.index].primal; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Drops all nodes but keeps allocated capacity.
    void clear() noexcept;
    void reserve(std::size_t n) { nodes_.reserve(n); }

    /// Reverse sweep from `root`. The tape is left unchanged; repeated calls
    /// return bit-identical results.
    GradientVector backward(NodeRef root) const;

private:
    struct Node {
        double primal;
        double da;  // d(primal)/d(operand a)
        double db;
        std::uint32_t a;
        std::uint32_t b;
        OpKind op;
    };

    NodeRef push(Node n);

    std::vector<Node> nodes_;
    std::unordered_map<double, std::uint32_t> constants_;
};

/// Node handle with operator sugar so loss and network code reads like the
/// math it implements. Mixed Expr/double arithmetic materializes the double
/// as a shared constant on the tape.
class Expr {
public:
    Expr() = default;
    Expr(Tape& tape, NodeRef ref) noexcept : tape_(&tape), ref_(ref) {}

    double value() const noexcept { return tape_->primal(ref_); }
    NodeRef ref() const noexcept { return ref_; }
    Tape& tape() const noexcept { return *tape_; }

private:
    Tape* tape_ = nullptr;
    NodeRef ref_{};
};

inline Expr make_leaf(Tape& tape, double value) { return {tape, tape.leaf(value)}; }
inline Expr cst(Tape& tape, double value) { return {tape, tape.constant(value)}; }

inline Expr binary(OpKind k, Expr a, Expr b) {
    return {a.tape(), a.tape().apply(k, a.ref(), b.ref())};
}
inline Expr unary(OpKind k, Expr a) { return {a.tape(), a.tape().apply(k, a.ref())}; }

inline Expr operator+(Expr a, Expr b) { return binary(OpKind::add, a, b); }
inline Expr operator-(Expr a, Expr b) { return binary(OpKind::sub, a, b); }
inline Expr operator*(Expr a, Expr b) { return binary(OpKind::mul, a, b); }
inline Expr operator/(Expr a, Expr b) { return binary(OpKind::div, a, b); }
inline Expr operator-(Expr a) { return unary(OpKind::neg, a); }

inline Expr operator+(Expr a, double b) { return a + cst(a.tape(), b); }
inline Expr operator+(double a, Expr b) { return cst(b.tape(), a) + b; }
inline Expr operator-(Expr a, double b) { return a - cst(a.tape(), b); }
inline Expr operator-(double a, Expr b) { return cst(b.tape(), a) - b; }
inline Expr operator*(Expr a, double b) { return a * cst(a.tape(), b); }
inline Expr operator*(double a, Expr b) { return cst(b.tape(), a) * b; }
inline Expr operator/(Expr a, double b) { return a / cst(a.tape(), b); }
inline Expr operator/(double a, Expr b) { return cst(b.tape(), a) / b; }

inline Expr ln(Expr a) { return unary(OpKind::ln, a); }
inline Expr exp(Expr a) { return unary(OpKind::exp, a); }
inline Expr sin(Expr a) { return unary(OpKind::sin, a); }
inline Expr cos(Expr a) { return unary(OpKind::cos, a); }
inline Expr sqrt(Expr a) { return unary(OpKind::sqrt, a); }
inline Expr tanh(Expr a) { return unary(OpKind::tanh, a); }
inline Expr softplus(Expr a) { return unary(OpKind::softplus, a); }
inline Expr square(Expr a) { return unary(OpKind::square, a); }
inline Expr abs(Expr a) { return unary(OpKind::abs, a); }

/// max(x, 0) composed as (x + |x|) / 2; at x = 0 the sub-derivative is 0.5.
inline Expr relu(Expr a) { return (a + abs(a)) * cst(a.tape(), 0.5); }

// Plain-double twins of the non-<cmath> ops, so formulas can be written once
// and instantiated for both value types.
double softplus(double x) noexcept;
inline double square(double x) noexcept { return x * x; }
inline double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

}  // namespace thetafit
