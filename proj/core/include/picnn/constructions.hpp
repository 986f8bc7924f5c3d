#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace picnn::construct {

// ---- ReQU product networks -------------------------------------------------

inline double requ(double t) { return t > 0.0 ? t * t : 0.0; }

/// xy = (s(x+y) + s(-x-y) - s(x-y) - s(-x+y)) / 4 with s the squared ReLU.
double requ_pair(double x, double y);

/// Binary product tree. Each level pairs values of the previous level;
/// index -1 stands for the constant 1 used to pad odd counts.
struct ProductNetwork {
    int inputs = 0;
    std::vector<std::vector<std::pair<int, int>>> levels;

    int depth() const { return static_cast<int>(levels.size()); }
    /// Four ReQU units per pairwise product.
    int neurons() const;
    double evaluate(std::span<const double> x) const;
};

ProductNetwork requ_product_network(int n);
double requ_product(std::span<const double> xs);

// ---- B-spline cutoff -------------------------------------------------------

struct CutoffSpec {
    int p = 2;
};

/// Integral of the cardinal B-spline of order p (support [0, p + 1]).
double bspline_integral(int p, double t);

/// 1 on t <= 1, 0 on t >= 2, C^p in between.
double bspline_cutoff(const CutoffSpec& spec, double t);

// ---- Matern kernel ---------------------------------------------------------

struct MaternKernel {
    double tau = 2.5;
    int ambient_dim = 3;

    double nu() const { return tau - ambient_dim / 2.0; }
    /// 2^{1-tau} / Gamma(tau)
    double prefactor() const;
    void validate() const;
};

/// r^nu K_nu(r) for nu > 0, r >= 0, continuous at r = 0.
double bessel_term(double nu, double r);

/// phi(r) = 2^{1-tau} / Gamma(tau) * r^nu K_nu(r).
double matern_eval(const MaternKernel& k, double r);

/// Truncated series of r^nu K_nu(r) = A(r^2) + r^{2 nu} B(r^2), evaluated at u = r^2.
struct Decomposition {
    double a = 0.0;
    double b = 0.0;
};

/// Requires nu at least 1e-3 away from an integer and degree <= 60.
Decomposition matern_decompose(const MaternKernel& k, double u, int degree);

struct TruncatedApproximant {
    double eta = 1e-2;
    int degree = 40;   // series degree N
    int p = 2;         // cutoff order
    int taylor = 4;    // degree m of the Taylor patch of u^nu at eta
    std::vector<double> a_coef;       // P_A in powers of u
    std::vector<double> b_coef;       // P_B in powers of u
    std::vector<double> taylor_coef;  // Q in powers of (u - eta)
};

TruncatedApproximant make_truncated(const MaternKernel& k, double eta, int degree, int p, int taylor);

/// Smoothed power: chi(u/eta) Q(u) + (1 - chi(u/eta)) u^nu.
double smoothed_power(const TruncatedApproximant& t, const MaternKernel& k, double u);

/// Approximation of phi(sqrt(u)), including the 2^{1-tau}/Gamma(tau) factor.
double truncated_kernel(const TruncatedApproximant& t, const MaternKernel& k, double u);

// ---- Degree-2 ridge decompositions -----------------------------------------

/// Unit directions; each quadratic term is a polynomial in xi . x.
struct FeatureBank {
    std::vector<Eigen::VectorXd> xi;
};

/// {e_i} followed by {(e_i + e_j) / sqrt 2, i < j}.
FeatureBank degree2_bank(int dim);

/// sum_r (c0 + c1 t + c2 t^2) at t = xi_r . x.
struct RidgeExpansion {
    FeatureBank bank;
    std::vector<std::array<double, 3>> coef;

    double evaluate(const Eigen::VectorXd& x) const;
};

/// x^T Q x + b . x + c over the degree-2 bank; Q symmetric.
RidgeExpansion ridge_decompose_quadratic(const Eigen::MatrixXd& q, const Eigen::VectorXd& b, double c);

/// |x - y|^2 over the degree-2 bank.
RidgeExpansion ridge_decompose_sqdist(const Eigen::VectorXd& y);

// ---- Multichannel inner-product CNN ----------------------------------------

/// One-sided stride-one convolution layer with ReLU: length-D sequences,
/// out_i = relu(sum_k w[k] F_{i+k} + b), zero beyond position D.
struct ConvLayer {
    int taps = 0;
    int in_channels = 0;
    int out_channels = 0;
    std::vector<double> weight;  // [tap][out][in]
    std::vector<double> bias;

    double& w(int k, int o, int i) { return weight[(static_cast<std::size_t>(k) * out_channels + o) * in_channels + i]; }
    double w(int k, int o, int i) const {
        return weight[(static_cast<std::size_t>(k) * out_channels + o) * in_channels + i];
    }
};

/// Three channels per feature (positive part, negative part, shifted input
/// tail). Feature r reads channels 3r and 3r+1 at the first position.
struct InnerProductNet {
    int dim = 0;
    int filter_size = 0;
    double input_bound = 1.0;
    std::vector<ConvLayer> layers;
    int features = 0;

    std::vector<double> evaluate(std::span<const double> x) const;
    std::size_t nonzero_filter_entries() const;
    int depth() const { return static_cast<int>(layers.size()); }
};

/// Exact for |x_k| <= input_bound. Requires 2 <= S <= D.
InnerProductNet multichannel_inner_product_net(const FeatureBank& bank, int dim, int filter_size,
                                               double input_bound = 1.0);

/// Closed-form nonzero filter count per feature for generic directions.
std::size_t inner_product_filter_count(int dim, int filter_size);

// ---- Kernel interpolation on the sphere ------------------------------------

std::vector<Eigen::Vector3d> fibonacci_sphere(int n);

struct KernelInterpolant {
    MaternKernel kernel;
    std::vector<Eigen::Vector3d> nodes;
    Eigen::VectorXd coef;

    double operator()(const Eigen::Vector3d& x) const;
};

Eigen::MatrixXd gram_matrix(const MaternKernel& k, const std::vector<Eigen::Vector3d>& nodes);

/// Solves K(X) c = f(X) by Cholesky; throws FactorizationError if K(X) is not
/// numerically positive definite.
KernelInterpolant kernel_interpolate(const std::vector<Eigen::Vector3d>& nodes, const Eigen::VectorXd& fvals,
                                     const MaternKernel& k);

struct RateStudy {
    std::vector<int> n;
    std::vector<double> error;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Monte-Carlo L^2(S^2) error of the Fibonacci-node interpolant for each N,
/// with a least-squares slope of log error on log N.
RateStudy interpolation_rate_study(const MaternKernel& k, const std::function<double(const Eigen::Vector3d&)>& f,
                                   const std::vector<int>& ns, int mc_samples = 4000, std::uint64_t seed = 1);

}  // namespace picnn::construct
