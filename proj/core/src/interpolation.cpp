#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "picnn/constructions.hpp"
#include "picnn/error.hpp"
#include "picnn/rng.hpp"
#include "picnn/stats.hpp"

namespace picnn::construct {

std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
    if (n < 1) throw std::invalid_argument("node count must be >= 1");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        pts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
    }
    return pts;
}

Eigen::MatrixXd gram_matrix(const MaternKernel& k, const std::vector<Eigen::Vector3d>& nodes) {
    k.validate();
    const auto n = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd g(n, n);
    const double diag = matern_eval(k, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i, i) = diag;
        for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i) = matern_eval(k, (nodes[i] - nodes[j]).norm());
    }
    return g;
}

double KernelInterpolant::operator()(const Eigen::Vector3d& x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += coef(static_cast<Eigen::Index>(i)) * matern_eval(kernel, (x - nodes[i]).norm());
    return acc;
}

KernelInterpolant kernel_interpolate(const std::vector<Eigen::Vector3d>& nodes, const Eigen::VectorXd& fvals,
                                     const MaternKernel& k) {
    if (nodes.empty() || static_cast<Eigen::Index>(nodes.size()) != fvals.size())
        throw std::invalid_argument("node and value counts must match and be positive");
    const Eigen::LLT<Eigen::MatrixXd> llt(gram_matrix(k, nodes));
    if (llt.info() != Eigen::Success) throw FactorizationError("Gram matrix is not numerically positive definite");
    return {k, nodes, llt.solve(fvals)};
}

RateStudy interpolation_rate_study(const MaternKernel& k, const std::function<double(const Eigen::Vector3d&)>& f,
                                   const std::vector<int>& ns, int mc_samples, std::uint64_t seed) {
    if (ns.size() < 2) throw std::invalid_argument("rate study needs at least two node counts");
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Eigen::Vector3d> probes(mc_samples);
    std::vector<double> truth(mc_samples);
    for (int i = 0; i < mc_samples; ++i) {
        Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
        probes[i] = v.normalized();
        truth[i] = f(probes[i]);
    }

    RateStudy study;
    std::vector<double> logn, loge;
    for (int n : ns) {
        const auto nodes = fibonacci_sphere(n);
        Eigen::VectorXd vals(n);
        for (int i = 0; i < n; ++i) vals(i) = f(nodes[i]);
        const KernelInterpolant interp = kernel_interpolate(nodes, vals, k);
        double acc = 0.0;
        for (int i = 0; i < mc_samples; ++i) acc += std::pow(interp(probes[i]) - truth[i], 2);
        const double err = std::sqrt(acc / mc_samples);
        study.n.push_back(n);
        study.error.push_back(err);
        logn.push_back(std::log(n));
        loge.push_back(std::log(err));
    }
    const stats::Line line = stats::fit_line(logn, loge);
    study.slope = line.slope;
    study.intercept = line.intercept;
    return study;
}

}  // namespace picnn::construct
