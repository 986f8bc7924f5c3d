#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "picnn/autodiff/elementary.hpp"

namespace picnn::ad {

class Tape;

/// Handle to a scalar on a Tape. A Var without a tape is a detached constant:
/// arithmetic with it records nothing for the constant side.
class Var {
public:
    Var() = default;
    Var(double constant) : value_(constant) {}  // NOLINT(google-explicit-constructor)

    double value() const { return value_; }
    bool is_constant() const { return tape_ == nullptr; }
    Tape* tape() const { return tape_; }
    std::int32_t index() const { return index_; }

private:
    friend class Tape;
    Var(Tape* tape, std::int32_t index, double value) : tape_(tape), index_(index), value_(value) {}

    Tape* tape_ = nullptr;
    std::int32_t index_ = -1;
    double value_ = 0.0;
};

/// Append-only reverse-mode tape of scalar operations with at most two parents.
/// Parents always precede their children, so one backward sweep suffices.
class Tape {
public:
    /// Leaf bound to an input (e.g. a network parameter).
    Var leaf(double value);
    std::vector<Var> leaves(std::span<const double> values);

    /// Records a node with one or two parents and the local partials.
    Var record(double value, const Var& a, double da);
    Var record(double value, const Var& a, double da, const Var& b, double db);

    std::size_t size() const { return values_.size(); }
    std::size_t leaf_count() const;

    /// Adjoint of `root` with respect to each of `wrt`. The tape must have
    /// exactly one root (a non-leaf node without consumers) and it must be
    /// `root`; anything else throws std::logic_error.
    std::vector<double> gradient(const Var& root, std::span<const Var> wrt) const;

    void clear();

private:
    struct Node {
        std::array<std::int32_t, 2> parent{-1, -1};
        std::array<double, 2> partial{0.0, 0.0};
    };
    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<bool> leaf_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);

inline Var operator+(const Var& a, double b) { return a + Var(b); }
inline Var operator+(double a, const Var& b) { return Var(a) + b; }
inline Var operator-(const Var& a, double b) { return a - Var(b); }
inline Var operator-(double a, const Var& b) { return Var(a) - b; }
inline Var operator*(const Var& a, double b) { return a * Var(b); }
inline Var operator*(double a, const Var& b) { return Var(a) * b; }
inline Var operator/(const Var& a, double b) { return a / Var(b); }
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

/// order-th derivative of f at x as a tape value (order <= 2, since the
/// recorded partial is the next derivative).
Var elem(Fn f, int order, const Var& x, double p = 0.0);
inline Var apply(Fn f, const Var& x, double p = 0.0) { return elem(f, 0, x, p); }

/// Gradient of a scalar loss with respect to a parameter vector: builds a
/// fresh tape, binds every parameter to a leaf, evaluates `loss`, and runs the
/// reverse sweep.
std::vector<double> grad_params(const std::function<Var(std::span<const Var>)>& loss,
                                std::span<const double> params, double* loss_value = nullptr);

}  // namespace picnn::ad
