#include "thetafit/autodiff.hpp"

#include <cmath>

namespace thetafit {

int op_arity(OpKind kind) noexcept {
    switch (kind) {
        case OpKind::leaf:
            return 0;
        case OpKind::add:
        case OpKind::sub:
        case OpKind::mul:
        case OpKind::div:
            return 2;
        default:
            return 1;
    }
}

double softplus(double x) noexcept {
    // Branch form: for large x, softplus(x) = x up to an exp(-x) correction,
    // so the naive ln(1 + exp(x)) overflow never happens.
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

NodeRef Tape::leaf(double value) {
    return push({value, 0.0, 0.0, 0, 0, OpKind::leaf});
}

NodeRef Tape::constant(double value) {
    auto [it, inserted] = constants_.try_emplace(value, 0);
    if (inserted) {
        it->second = leaf(value).index;
    }
    return {it->second};
}

NodeRef Tape::push(Node n) {
    nodes_.push_back(n);
    return {static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeRef Tape::apply(OpKind kind, NodeRef a) {
    if (op_arity(kind) != 1) {
        throw std::logic_error("unary apply() called with a binary/leaf op");
    }
    const double x = nodes_[a.index].primal;
    double value = 0.0;
    double dx = 0.0;
    switch (kind) {
        case OpKind::neg:
            value = -x;
            dx = -1.0;
            break;
        case OpKind::ln:
            if (!(x > 0.0)) throw DomainError("ln of non-positive argument", x);
            value = std::log(x);
            dx = 1.0 / x;
            break;
        case OpKind::exp:
            value = std::exp(x);
            dx = value;
            break;
        case OpKind::sin:
            value = std::sin(x);
            dx = std::cos(x);
            break;
        case OpKind::cos:
            value = std::cos(x);
            dx = -std::sin(x);
            break;
        case OpKind::sqrt:
            if (!(x > 0.0)) throw DomainError("sqrt of non-positive argument", x);
            value = std::sqrt(x);
            dx = 0.5 / value;
            break;
        case OpKind::tanh:
            value = std::tanh(x);
            dx = 1.0 - value * value;
            break;
        case OpKind::softplus:
            value = softplus(x);
            // logistic(x), evaluated without overflow on either side
            dx = x > 0.0 ? 1.0 / (1.0 + std::exp(-x)) : 1.0 - 1.0 / (1.0 + std::exp(x));
            break;
        case OpKind::square:
            value = x * x;
            dx = 2.0 * x;
            break;
        case OpKind::abs:
            value = std::fabs(x);
            dx = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
            break;
        default:
            break;
    }
    return push({value, dx, 0.0, a.index, 0, kind});
}

NodeRef Tape::apply(OpKind kind, NodeRef a, NodeRef b) {
    if (op_arity(kind) != 2) {
        throw std::logic_error("binary apply() called with a unary/leaf op");
    }
    const double x = nodes_[a.index].primal;
    const double y = nodes_[b.index].primal;
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    switch (kind) {
        case OpKind::add:
            value = x + y;
            dx = 1.0;
            dy = 1.0;
            break;
        case OpKind::sub:
            value = x - y;
            dx = 1.0;
            dy = -1.0;
            break;
        case OpKind::mul:
            value = x * y;
            dx = y;
            dy = x;
            break;
        case OpKind::div:
            value = x / y;
            dx = 1.0 / y;
            dy = -x / (y * y);
            break;
        default:
            break;
    }
    return push({value, dx, dy, a.index, b.index, kind});
}

void Tape::clear() noexcept {
    nodes_.clear();
    constants_.clear();
}

GradientVector Tape::backward(NodeRef root) const {
    GradientVector grad;
    grad.adjoints_.assign(nodes_.size(), 0.0);
    grad.adjoints_[root.index] = 1.0;
    for (std::uint32_t i = root.index + 1; i-- > 0;) {
        const Node& node = nodes_[i];
        if (node.op == OpKind::leaf) continue;
        const double adj = grad.adjoints_[i];
        if (adj == 0.0) continue;
        grad.adjoints_[node.a] += adj * node.da;
        if (op_arity(node.op) == 2) {
            grad.adjoints_[node.b] += adj * node.db;
        }
    }
    return grad;
}

}  // namespace thetafit
