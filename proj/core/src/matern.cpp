#include <cmath>
#include <numbers>
#include <stdexcept>

#include "picnn/constructions.hpp"
#include "picnn/error.hpp"

namespace picnn::construct {

namespace {

constexpr int kMaxDegree = 60;
constexpr double kIntegerGap = 1e-3;
// Below this radius the power series is used for non-integer orders; its
// alternating cancellation grows like e^r, so larger radii go to the library Bessel K.
constexpr double kSeriesRadius = 2.0;

double integer_distance(double nu) { return std::abs(nu - std::round(nu)); }

// Coefficient tables of A and B in powers of u.
void series_tables(double nu, int degree, std::vector<double>& a, std::vector<double>& b) {
    const double c = std::numbers::pi / (2.0 * std::sin(std::numbers::pi * nu));
    a.resize(static_cast<std::size_t>(degree) + 1);
    b.resize(static_cast<std::size_t>(degree) + 1);
    double fact = 1.0;
    for (int m = 0; m <= degree; ++m) {
        if (m > 0) fact *= m;
        a[m] = c / (fact * std::tgamma(m - nu + 1.0) * std::pow(2.0, 2.0 * m - nu));
        b[m] = -c / (fact * std::tgamma(m + nu + 1.0) * std::pow(2.0, 2.0 * m + nu));
    }
}

double horner(const std::vector<double>& coef, double x) {
    double acc = 0.0;
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * x + *it;
    return acc;
}

}  // namespace

double MaternKernel::prefactor() const { return std::pow(2.0, 1.0 - tau) / std::tgamma(tau); }

void MaternKernel::validate() const {
    if (ambient_dim < 1) throw std::invalid_argument("ambient dimension must be >= 1");
    if (!(nu() > 0.0)) throw std::invalid_argument("Matern kernel needs tau > D/2");
}

double bessel_term(double nu, double r) {
    if (!(nu > 0.0)) throw DomainError("Bessel order must be positive");
    if (r < 0.0) throw DomainError("radius must be non-negative");
    if (r == 0.0) return std::tgamma(nu) * std::pow(2.0, nu - 1.0);
    constexpr double root = 1.2533141373155002512;  // sqrt(pi/2)
    if (nu == 0.5) return root * std::exp(-r);
    if (nu == 1.5) return root * std::exp(-r) * (1.0 + r);
    if (nu == 2.5) return root * std::exp(-r) * (r * r + 3.0 * r + 3.0);
    if (r <= kSeriesRadius && integer_distance(nu) >= kIntegerGap) {
        std::vector<double> a, b;
        series_tables(nu, 40, a, b);
        const double u = r * r;
        return horner(a, u) + std::pow(r, 2.0 * nu) * horner(b, u);
    }
    return std::pow(r, nu) * std::cyl_bessel_k(nu, r);
}

double matern_eval(const MaternKernel& k, double r) {
    k.validate();
    return k.prefactor() * bessel_term(k.nu(), r);
}

Decomposition matern_decompose(const MaternKernel& k, double u, int degree) {
    k.validate();
    const double nu = k.nu();
    if (integer_distance(nu) < kIntegerGap) throw DomainError("decomposition needs nu away from the integers");
    if (degree < 0 || degree > kMaxDegree) throw std::invalid_argument("series degree must lie in [0, 60]");
    if (u < 0.0) throw DomainError("u = r^2 must be non-negative");
    std::vector<double> a, b;
    series_tables(nu, degree, a, b);
    return {horner(a, u), horner(b, u)};
}

TruncatedApproximant make_truncated(const MaternKernel& k, double eta, int degree, int p, int taylor) {
    k.validate();
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
    if (integer_distance(k.nu()) < kIntegerGap) throw DomainError("decomposition needs nu away from the integers");
    if (degree < 0 || degree > kMaxDegree) throw std::invalid_argument("series degree must lie in [0, 60]");
    if (p < 1 || taylor < 0) throw std::invalid_argument("invalid cutoff or Taylor order");
    TruncatedApproximant t;
    t.eta = eta;
    t.degree = degree;
    t.p = p;
    t.taylor = taylor;
    series_tables(k.nu(), degree, t.a_coef, t.b_coef);
    // Taylor coefficients of u^nu at eta: binom(nu, i) eta^{nu - i}.
    double binom = 1.0;
    for (int i = 0; i <= taylor; ++i) {
        t.taylor_coef.push_back(binom * std::pow(eta, k.nu() - i));
        binom *= (k.nu() - i) / (i + 1);
    }
    return t;
}

double smoothed_power(const TruncatedApproximant& t, const MaternKernel& k, double u) {
    if (u < 0.0) throw DomainError("u = r^2 must be non-negative");
    const double chi = bspline_cutoff({t.p}, u / t.eta);
    double patch = 0.0;
    if (chi > 0.0) patch = horner(t.taylor_coef, u - t.eta);
    const double power = chi < 1.0 ? std::pow(u, k.nu()) : 0.0;
    return chi * patch + (1.0 - chi) * power;
}

double truncated_kernel(const TruncatedApproximant& t, const MaternKernel& k, double u) {
    return k.prefactor() * (horner(t.a_coef, u) + smoothed_power(t, k, u) * horner(t.b_coef, u));
}

}  // namespace picnn::construct
