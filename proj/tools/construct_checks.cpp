#include "construct_checks.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "picnn/constructions.hpp"
#include "picnn/rng.hpp"

using namespace picnn;
using namespace picnn::construct;

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

CheckResult check_requ() {
    Rng rng(11);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 7));
        std::vector<double> x(n);
        double prod = 1.0, scale = 1.0;
        for (auto& v : x) {
            v = uniform(rng, -10.0, 10.0);
            prod *= v;
            scale *= std::max(1.0, std::abs(v));
        }
        worst = std::max(worst, std::abs(requ_product(x) - prod) / scale);
    }
    return {"requ_product", worst <= 1e-12, "max scaled error " + sci(worst)};
}

CheckResult check_cutoff() {
    const double v = bspline_cutoff({2}, 1.5);
    bool plateaus = true;
    for (int p = 1; p <= 6; ++p) plateaus = plateaus && bspline_cutoff({p}, 0.5) == 1.0 && bspline_cutoff({p}, 3.0) == 0.0;
    return {"bspline_cutoff", std::abs(v - 0.5) <= 1e-15 && plateaus, "chi_2(1.5) = " + sci(v)};
}

CheckResult check_matern() {
    const MaternKernel k{2.0, 3};  // nu = 1/2
    double worst = 0.0;
    for (int i = 0; i <= 290; ++i) {
        const double r = 0.1 + i * 0.01;
        const auto d = matern_decompose(k, r * r, 30);
        const double rec = d.a + r * d.b;
        const double exact = std::sqrt(std::numbers::pi / 2.0) * std::exp(-r);
        worst = std::max(worst, std::abs(rec - exact) / exact);
    }
    return {"matern_decompose", worst <= 1e-10, "max rel error " + sci(worst)};
}

CheckResult check_ridge() {
    Rng rng(5);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Eigen::VectorXd x(3), y(3);
        for (int i = 0; i < 3; ++i) {
            x(i) = uniform(rng, -2.0, 2.0);
            y(i) = uniform(rng, -2.0, 2.0);
        }
        worst = std::max(worst, std::abs(ridge_decompose_sqdist(y).evaluate(x) - (x - y).squaredNorm()));
    }
    return {"ridge_decompose_sqdist", worst <= 1e-12, "max error " + sci(worst)};
}

CheckResult check_multichannel() {
    Rng rng(3);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    bool counts = true;
    for (int dim : {3, 5, 8}) {
        for (int s = 2; s <= dim; ++s) {
            FeatureBank bank;
            for (int r = 0; r < 6; ++r) {
                Eigen::VectorXd v(dim);
                for (int i = 0; i < dim; ++i) v(i) = normal(rng);
                bank.xi.push_back(v.normalized());
            }
            const auto net = multichannel_inner_product_net(bank, dim, s);
            counts = counts && net.nonzero_filter_entries() == bank.xi.size() * inner_product_filter_count(dim, s);
            for (int t = 0; t < 100; ++t) {
                std::vector<double> x(dim);
                for (auto& v : x) v = uniform(rng, -1.0, 1.0);
                const auto out = net.evaluate(x);
                for (std::size_t r = 0; r < bank.xi.size(); ++r) {
                    const double ip = bank.xi[r].dot(Eigen::Map<const Eigen::VectorXd>(x.data(), dim));
                    worst = std::max(worst, std::abs(out[r] - ip));
                }
            }
        }
    }
    return {"multichannel_inner_product_net", worst <= 1e-12 && counts, "max error " + sci(worst)};
}

CheckResult check_interpolation() {
    const MaternKernel k{2.5, 3};
    const auto study = interpolation_rate_study(
        k, [](const Eigen::Vector3d& x) { return std::exp(x.x()) * std::sin(2.0 * x.y()) + x.z() * x.z(); },
        {100, 200, 400, 800}, 2000, 1);
    std::string detail = "slope " + sci(study.slope) + " errors";
    for (double e : study.error) detail += " " + sci(e);
    return {"interpolation_rate", study.slope <= -0.7, detail};
}

}  // namespace

std::vector<CheckResult> run_construct_checks(const std::string& which) {
    std::vector<CheckResult> out;
    const bool all = which == "all";
    bool matched = false;
    auto want = [&](const char* name) {
        const bool w = all || which == name;
        matched = matched || w;
        return w;
    };
    if (want("requ")) out.push_back(check_requ());
    if (want("cutoff")) out.push_back(check_cutoff());
    if (want("matern")) out.push_back(check_matern());
    if (want("ridge")) out.push_back(check_ridge());
    if (want("multichannel")) out.push_back(check_multichannel());
    if (want("interpolation")) out.push_back(check_interpolation());
    if (!matched) throw std::invalid_argument("unknown check group '" + which + "'");
    return out;
}
