#include "picnn/autodiff/tape.hpp"

#include <stdexcept>
#include <string>

namespace picnn::ad {

Var Tape::leaf(double value) {
    nodes_.push_back(Node{});
    values_.push_back(value);
    leaf_.push_back(true);
    return Var(this, static_cast<std::int32_t>(values_.size() - 1), value);
}

std::vector<Var> Tape::leaves(std::span<const double> values) {
    std::vector<Var> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(leaf(v));
    return out;
}

Var Tape::record(double value, const Var& a, double da) {
    Node n;
    n.parent[0] = a.index();
    n.partial[0] = da;
    nodes_.push_back(n);
    values_.push_back(value);
    leaf_.push_back(false);
    return Var(this, static_cast<std::int32_t>(values_.size() - 1), value);
}

Var Tape::record(double value, const Var& a, double da, const Var& b, double db) {
    Node n;
    n.parent = {a.index(), b.index()};
    n.partial = {da, db};
    nodes_.push_back(n);
    values_.push_back(value);
    leaf_.push_back(false);
    return Var(this, static_cast<std::int32_t>(values_.size() - 1), value);
}

std::size_t Tape::leaf_count() const {
    std::size_t n = 0;
    for (bool b : leaf_) n += b ? 1 : 0;
    return n;
}

void Tape::clear() {
    nodes_.clear();
    values_.clear();
    leaf_.clear();
}

std::vector<double> Tape::gradient(const Var& root, std::span<const Var> wrt) const {
    if (root.tape() != this) throw std::logic_error("gradient: root is not recorded on this tape");
    const std::size_t n = nodes_.size();
    std::vector<char> consumed(n, 0);
    for (const Node& node : nodes_) {
        for (std::int32_t p : node.parent) {
            if (p >= 0) consumed[static_cast<std::size_t>(p)] = 1;
        }
    }
    std::size_t roots = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!leaf_[i] && !consumed[i]) ++roots;
    }
    if (roots == 0) throw std::logic_error("gradient: tape has no root");
    if (roots > 1) throw std::logic_error("gradient: tape has " + std::to_string(roots) + " roots");
    const auto r = static_cast<std::size_t>(root.index());
    if (leaf_[r] || consumed[r]) throw std::logic_error("gradient: requested root is not the tape's root");

    std::vector<double> adjoint(n, 0.0);
    adjoint[r] = 1.0;
    for (std::size_t i = r + 1; i-- > 0;) {
        const double a = adjoint[i];
        if (a == 0.0) continue;
        const Node& node = nodes_[i];
        for (int k = 0; k < 2; ++k) {
            if (node.parent[k] >= 0) adjoint[static_cast<std::size_t>(node.parent[k])] += a * node.partial[k];
        }
    }
    std::vector<double> out;
    out.reserve(wrt.size());
    for (const Var& v : wrt) {
        if (v.is_constant()) {
            out.push_back(0.0);
        } else {
            if (v.tape() != this) throw std::logic_error("gradient: variable from another tape");
            out.push_back(adjoint[static_cast<std::size_t>(v.index())]);
        }
    }
    return out;
}

namespace {

Tape* common_tape(const Var& a, const Var& b) {
    if (a.tape() && b.tape() && a.tape() != b.tape()) throw std::logic_error("mixing variables from different tapes");
    return a.tape() ? a.tape() : b.tape();
}

// Records value = f(a, b) with partials (da, db), skipping constant operands.
Var binary(double value, const Var& a, double da, const Var& b, double db) {
    Tape* t = common_tape(a, b);
    if (!t) return Var(value);
    if (a.is_constant()) return t->record(value, b, db);
    if (b.is_constant()) return t->record(value, a, da);
    return t->record(value, a, da, b, db);
}

}  // namespace

Var operator+(const Var& a, const Var& b) {
    return binary(a.value() + b.value(), a, 1.0, b, 1.0);
}

Var operator-(const Var& a, const Var& b) {
    return binary(a.value() - b.value(), a, 1.0, b, -1.0);
}

Var operator*(const Var& a, const Var& b) {
    return binary(a.value() * b.value(), a, b.value(), b, a.value());
}

Var operator/(const Var& a, const Var& b) {
    return a * elem(Fn::Recip, 0, b);
}

Var operator-(const Var& a) {
    if (a.is_constant()) return Var(-a.value());
    return a.tape()->record(-a.value(), a, -1.0);
}

Var elem(Fn f, int order, const Var& x, double p) {
    if (order < 0 || order > 2) throw std::invalid_argument("tape elem: order must be in [0, 2]");
    const double value = derivative(f, order, x.value(), p);
    if (x.is_constant()) return Var(value);
    return x.tape()->record(value, x, derivative(f, order + 1, x.value(), p));
}

std::vector<double> grad_params(const std::function<Var(std::span<const Var>)>& loss,
                                std::span<const double> params, double* loss_value) {
    Tape tape;
    const std::vector<Var> leaves = tape.leaves(params);
    const Var root = loss(leaves);
    if (root.is_constant()) throw std::logic_error("grad_params: loss does not depend on the parameters");
    if (loss_value) *loss_value = root.value();
    return tape.gradient(root, leaves);
}

}  // namespace picnn::ad
