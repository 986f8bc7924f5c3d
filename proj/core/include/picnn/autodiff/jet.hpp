#pragma once

#include <array>
#include <concepts>

#include "picnn/autodiff/elementary.hpp"

namespace picnn::ad {

/// Scalar hook for the jet arithmetic: order-th derivative of f at x, carried in
/// the scalar type itself. Tape variables provide their own overload.
inline double elem(Fn f, int order, double x, double p = 0.0) {
    return derivative(f, order, x, p);
}

/// Second-order truncated Taylor expansion in two chart directions.
///
/// The Hessian is stored once as (h00, h01, h11), so it cannot desymmetrize.
/// Component order for indexed access: val, g0, g1, h00, h01, h11.
template <class T>
struct Jet2 {
    static constexpr int kSize = 6;

    T val{};
    std::array<T, 2> grad{};
    std::array<T, 3> hess{};

    static Jet2 constant(const T& c) {
        Jet2 j;
        j.val = c;
        j.grad = {T(0.0), T(0.0)};
        j.hess = {T(0.0), T(0.0), T(0.0)};
        return j;
    }

    /// Coordinate seed: value v with unit gradient along `direction` (0 or 1).
    static Jet2 variable(const T& v, int direction) {
        Jet2 j = constant(v);
        j.grad[direction] = T(1.0);
        return j;
    }

    const T& h(int i, int j) const { return hess[i + j]; }

    T& operator[](int c) { return c == 0 ? val : c < 3 ? grad[c - 1] : hess[c - 3]; }
    const T& operator[](int c) const { return c == 0 ? val : c < 3 ? grad[c - 1] : hess[c - 3]; }
};

template <class T>
Jet2<T> operator+(const Jet2<T>& a, const Jet2<T>& b) {
    Jet2<T> r;
    for (int c = 0; c < Jet2<T>::kSize; ++c) r[c] = a[c] + b[c];
    return r;
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a, const Jet2<T>& b) {
    Jet2<T> r;
    for (int c = 0; c < Jet2<T>::kSize; ++c) r[c] = a[c] - b[c];
    return r;
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a) {
    Jet2<T> r;
    for (int c = 0; c < Jet2<T>::kSize; ++c) r[c] = -a[c];
    return r;
}

template <class T>
Jet2<T> operator*(const Jet2<T>& a, const Jet2<T>& b) {
    Jet2<T> r;
    r.val = a.val * b.val;
    for (int i = 0; i < 2; ++i) r.grad[i] = a.val * b.grad[i] + a.grad[i] * b.val;
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
            r.hess[i + j] = a.val * b.h(i, j) + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i] + a.h(i, j) * b.val;
        }
    }
    return r;
}

// Scalar operands. S is either the payload scalar itself or a plain double.
template <class T, class S>
concept JetScalar = std::same_as<S, T> || std::same_as<S, double>;

template <class T, class S>
    requires JetScalar<T, S>
Jet2<T> operator*(const Jet2<T>& a, const S& s) {
    Jet2<T> r;
    for (int c = 0; c < Jet2<T>::kSize; ++c) r[c] = a[c] * s;
    return r;
}

template <class T, class S>
    requires JetScalar<T, S>
Jet2<T> operator*(const S& s, const Jet2<T>& a) {
    return a * s;
}

template <class T, class S>
    requires JetScalar<T, S>
Jet2<T> operator+(const Jet2<T>& a, const S& s) {
    Jet2<T> r = a;
    r.val = a.val + s;
    return r;
}

template <class T, class S>
    requires JetScalar<T, S>
Jet2<T> operator+(const S& s, const Jet2<T>& a) {
    return a + s;
}

template <class T, class S>
    requires JetScalar<T, S>
Jet2<T> operator-(const Jet2<T>& a, const S& s) {
    Jet2<T> r = a;
    r.val = a.val - s;
    return r;
}

template <class T, class S>
    requires JetScalar<T, S>
Jet2<T> operator-(const S& s, const Jet2<T>& a) {
    return -a + s;
}

/// f applied to a jet by the second-order chain rule:
/// grad = f' g, hess = f' H + f'' g g^T.
template <class T>
Jet2<T> apply(Fn f, const Jet2<T>& x, double p = 0.0) {
    const T d0 = elem(f, 0, x.val, p);
    const T d1 = elem(f, 1, x.val, p);
    const T d2 = elem(f, 2, x.val, p);
    Jet2<T> r;
    r.val = d0;
    for (int i = 0; i < 2; ++i) r.grad[i] = d1 * x.grad[i];
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) r.hess[i + j] = d1 * x.h(i, j) + d2 * (x.grad[i] * x.grad[j]);
    }
    return r;
}

/// Plain-scalar counterpart so generic code can write apply(f, x) for any payload.
inline double apply(Fn f, double x, double p = 0.0) {
    return elem(f, 0, x, p);
}

template <class T>
Jet2<T> operator/(const Jet2<T>& a, const Jet2<T>& b) {
    return a * apply(Fn::Recip, b);
}

template <class T, class S>
    requires JetScalar<T, S>
Jet2<T> operator/(const Jet2<T>& a, const S& s) {
    return a * elem(Fn::Recip, 0, s);
}

template <class T> Jet2<T> exp(const Jet2<T>& x) { return apply(Fn::Exp, x); }
template <class T> Jet2<T> log(const Jet2<T>& x) { return apply(Fn::Log, x); }
template <class T> Jet2<T> sin(const Jet2<T>& x) { return apply(Fn::Sin, x); }
template <class T> Jet2<T> cos(const Jet2<T>& x) { return apply(Fn::Cos, x); }
template <class T> Jet2<T> sqrt(const Jet2<T>& x) { return apply(Fn::Sqrt, x); }
template <class T> Jet2<T> erf(const Jet2<T>& x) { return apply(Fn::Erf, x); }
template <class T> Jet2<T> pow(const Jet2<T>& x, double p) { return apply(Fn::Pow, x, p); }
template <class T> Jet2<T> relu(const Jet2<T>& x) { return apply(Fn::Relu, x); }
template <class T> Jet2<T> gelu(const Jet2<T>& x) { return apply(Fn::Gelu, x); }

using Jet = Jet2<double>;

/// Coordinate jets of a chart point: theta seeds direction 0, phi direction 1.
inline std::array<Jet, 2> lift_chart(double theta, double phi) {
    return {Jet::variable(theta, 0), Jet::variable(phi, 1)};
}

}  // namespace picnn::ad
