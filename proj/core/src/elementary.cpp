#include "picnn/autodiff/elementary.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "picnn/error.hpp"

namespace picnn::ad {

namespace {

constexpr double kTiny = 1e-300;

void check_order(int order) {
    if (order < 0 || order > 3) throw std::invalid_argument("derivative order must be in [0, 3]");
}

double gelu_derivative(int order, double x) {
    const double pdf = normal_pdf(x);
    switch (order) {
        case 0: return x * normal_cdf(x);
        case 1: return normal_cdf(x) + x * pdf;
        case 2: return pdf * (2.0 - x * x);
        default: return pdf * (x * x * x - 4.0 * x);
    }
}

// Falling factorial p (p-1) ... (p-n+1).
double falling(double p, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= p - i;
    return r;
}

}  // namespace

const char* name(Fn f) {
    switch (f) {
        case Fn::Exp: return "exp";
        case Fn::Log: return "ln";
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Sqrt: return "sqrt";
        case Fn::Erf: return "erf";
        case Fn::Recip: return "recip";
        case Fn::Pow: return "pow";
        case Fn::Relu: return "relu";
        case Fn::Requ: return "requ";
        case Fn::Gelu: return "gelu";
        case Fn::Gelu2: return "gelu2";
    }
    return "?";
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double derivative(Fn f, int order, double x, double p) {
    check_order(order);
    switch (f) {
        case Fn::Exp:
            return std::exp(x);
        case Fn::Log:
            if (!(x > kTiny)) throw DomainError("ln of nonpositive argument " + std::to_string(x));
            switch (order) {
                case 0: return std::log(x);
                case 1: return 1.0 / x;
                case 2: return -1.0 / (x * x);
                default: return 2.0 / (x * x * x);
            }
        case Fn::Sin:
            switch (order) {
                case 0: return std::sin(x);
                case 1: return std::cos(x);
                case 2: return -std::sin(x);
                default: return -std::cos(x);
            }
        case Fn::Cos:
            switch (order) {
                case 0: return std::cos(x);
                case 1: return -std::sin(x);
                case 2: return -std::cos(x);
                default: return std::sin(x);
            }
        case Fn::Sqrt:
            if (x < 0.0 || (order > 0 && !(x > kTiny)))
                throw DomainError("sqrt outside its differentiable domain at " + std::to_string(x));
            return falling(0.5, order) * std::pow(x, 0.5 - order);
        case Fn::Erf: {
            if (order == 0) return std::erf(x);
            const double d1 = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
            if (order == 1) return d1;
            if (order == 2) return -2.0 * x * d1;
            return (4.0 * x * x - 2.0) * d1;
        }
        case Fn::Recip:
            if (std::abs(x) < kTiny) throw DomainError("division by zero");
            switch (order) {
                case 0: return 1.0 / x;
                case 1: return -1.0 / (x * x);
                case 2: return 2.0 / (x * x * x);
                default: return -6.0 / (x * x * x * x);
            }
        case Fn::Pow:
            if (x < 0.0 && p != std::floor(p)) throw DomainError("pow of negative base with non-integer exponent");
            if (x == 0.0 && p - order < 0.0 && falling(p, order) != 0.0)
                throw DomainError("pow derivative singular at 0");
            if (falling(p, order) == 0.0) return 0.0;
            return falling(p, order) * std::pow(x, p - order);
        case Fn::Relu:
            if (order == 0) return x > 0.0 ? x : 0.0;
            if (order == 1) return x > 0.0 ? 1.0 : 0.0;
            return 0.0;
        case Fn::Requ:
            if (order == 0) return x > 0.0 ? x * x : 0.0;
            if (order == 1) return x > 0.0 ? 2.0 * x : 0.0;
            if (order == 2) return x > 0.0 ? 2.0 : 0.0;
            return 0.0;
        case Fn::Gelu:
            return gelu_derivative(order, x);
        case Fn::Gelu2: {
            const double h = gelu_derivative(0, x);
            const double h1 = gelu_derivative(1, x);
            if (order == 0) return h * h;
            if (order == 1) return 2.0 * h * h1;
            const double h2 = gelu_derivative(2, x);
            if (order == 2) return 2.0 * (h1 * h1 + h * h2);
            return 6.0 * h1 * h2 + 2.0 * h * gelu_derivative(3, x);
        }
    }
    throw std::invalid_argument("unknown elementary function");
}

void derivatives(Fn f, double x, int max_order, double* out, double p) {
    check_order(max_order);
    if (f == Fn::Gelu || f == Fn::Gelu2) {
        const double pdf = normal_pdf(x);
        const double cdf = normal_cdf(x);
        const double h[4] = {x * cdf, cdf + x * pdf, pdf * (2.0 - x * x), pdf * (x * x * x - 4.0 * x)};
        if (f == Fn::Gelu) {
            for (int k = 0; k <= max_order; ++k) out[k] = h[k];
            return;
        }
        const double g[4] = {h[0] * h[0], 2.0 * h[0] * h[1], 2.0 * (h[1] * h[1] + h[0] * h[2]),
                             6.0 * h[1] * h[2] + 2.0 * h[0] * h[3]};
        for (int k = 0; k <= max_order; ++k) out[k] = g[k];
        return;
    }
    for (int k = 0; k <= max_order; ++k) out[k] = derivative(f, k, x, p);
}

}  // namespace picnn::ad
