#pragma once

namespace picnn::ad {

/// Unary elementary functions known to the jet and tape arithmetic.
enum class Fn {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Erf,
    Recip,  // 1/x
    Pow,    // x^p for a constant exponent p
    Relu,   // max(x, 0), derivative 0 at 0
    Requ,   // max(x, 0)^2
    Gelu,   // x * Phi(x) with Phi the standard normal CDF
    Gelu2,  // Gelu(x)^2
};

const char* name(Fn f);

/// order-th derivative (0..3) of f at x. `p` is the exponent for Fn::Pow and is
/// ignored otherwise. Throws DomainError outside the function's domain.
double derivative(Fn f, int order, double x, double p = 0.0);

/// Derivatives 0..max_order of f at x written to out[0..max_order]; shares
/// the transcendental evaluations between orders.
void derivatives(Fn f, double x, int max_order, double* out, double p = 0.0);

/// Standard normal density and CDF.
double normal_pdf(double x);
double normal_cdf(double x);

}  // namespace picnn::ad
