#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "picnn/constructions.hpp"
#include "picnn/error.hpp"
#include "picnn/rng.hpp"

using namespace picnn;
using namespace picnn::construct;
using std::numbers::pi;

namespace {

// K_nu(r) = int_0^inf exp(-r cosh t) cosh(nu t) dt, trapezoidal rule (spectrally
// accurate for this analytic, rapidly decaying integrand).
double bessel_k_ref(double nu, double r) {
    const double h = 1e-3;
    double s = 0.5 * std::exp(-r);
    for (int i = 1; i < 40000; ++i) {
        const double t = i * h;
        const double v = std::exp(-r * std::cosh(t)) * std::cosh(nu * t);
        s += v;
        if (v < 1e-300) break;
    }
    return s * h;
}

double matern_ref(const MaternKernel& k, double r) {
    return std::pow(2.0, 1.0 - k.tau) / std::tgamma(k.tau) * std::pow(r, k.nu()) * bessel_k_ref(k.nu(), r);
}

// Cardinal B-spline of order p on [0, p + 1] by the Cox-de Boor recursion.
double bspline_ref(int p, double t) {
    if (p == 0) return (t >= 0.0 && t < 1.0) ? 1.0 : 0.0;
    return (t * bspline_ref(p - 1, t) + (p + 1 - t) * bspline_ref(p - 1, t - 1)) / p;
}

double decompose_error(double nu, int degree) {
    const MaternKernel k{nu + 1.5, 3};
    double worst = 0.0;
    for (int i = 0; i <= 290; ++i) {
        const double r = 0.1 + i * 0.01;
        const auto d = matern_decompose(k, r * r, degree);
        const double rec = d.a + std::pow(r, 2 * nu) * d.b;
        const double exact = std::pow(r, nu) * bessel_k_ref(nu, r);
        worst = std::max(worst, std::abs(rec - exact) / exact);
    }
    return worst;
}

// Second-order one-sided estimates of the q-th derivative (exact on cubics).
double one_sided(const std::function<double(double)>& f, double t, double h, int q, int side) {
    auto g = [&](int j) { return f(t + side * j * h); };
    switch (q) {
        case 1: return side * (-3 * g(0) + 4 * g(1) - g(2)) / (2 * h);
        case 2: return (2 * g(0) - 5 * g(1) + 4 * g(2) - g(3)) / (h * h);
        case 3: return side * (-5 * g(0) + 18 * g(1) - 24 * g(2) + 14 * g(3) - 3 * g(4)) / (2 * h * h * h);
        default: throw std::invalid_argument("order");
    }
}

Eigen::VectorXd random_unit(Rng& rng, int dim) {
    static std::normal_distribution<double> normal;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    return v.normalized();
}

}  // namespace

// ---- ReQU ------------------------------------------------------------------

TEST_CASE("requ pair identity") {
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const double x = uniform(rng, -10, 10), y = uniform(rng, -10, 10);
        CHECK(std::abs(requ_pair(x, y) - x * y) <= 1e-12 * std::max(1.0, std::abs(x * y)) + 1e-13);
    }
    CHECK(requ(-2.0) == 0.0);
    CHECK(requ(3.0) == 9.0);
}

TEST_CASE("requ product examples") {
    CHECK(requ_product(std::vector<double>{2, 3}) == doctest::Approx(6.0));
    CHECK(requ_product(std::vector<double>{1.5, -2, 4}) == doctest::Approx(-12.0));
    CHECK(requ_product(std::vector<double>{1.5, 0.0, 4, 7}) == 0.0);
    CHECK_THROWS(requ_product(std::vector<double>{2}));
    CHECK_THROWS(requ_product_network(1));
}

TEST_CASE("requ product tree shape") {
    for (int n = 2; n <= 33; ++n) {
        const auto net = requ_product_network(n);
        CHECK(net.inputs == n);
        CHECK(net.depth() == static_cast<int>(std::ceil(std::log2(n))));
        CHECK(net.levels.back().size() == 1);
        // Only the first level pads with the constant.
        for (std::size_t l = 1; l < net.levels.size(); ++l)
            for (const auto& [a, b] : net.levels[l]) CHECK((a >= 0 && b >= 0));
        std::vector<int> seen;
        for (const auto& [a, b] : net.levels[0]) {
            seen.push_back(a);
            if (b >= 0) seen.push_back(b);
        }
        std::vector<int> want(n);
        std::iota(want.begin(), want.end(), 0);
        CHECK(seen == want);
        int products = 0;
        for (const auto& l : net.levels) products += static_cast<int>(l.size());
        CHECK(net.neurons() == 4 * products);
    }
}

// Running a-priori bound on the rounding error of the product tree: each pair
// identity adds at most 10 eps (|u| + |v|)^2 on top of the propagated errors.
double product_error_bound(const ProductNetwork& net, std::span<const double> x) {
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> val(x.begin(), x.end()), err(x.size(), 0.0);
    for (const auto& level : net.levels) {
        std::vector<double> nv, ne;
        for (const auto& [a, b] : level) {
            const double u = val[a], du = err[a];
            const double v = b < 0 ? 1.0 : val[b], dv = b < 0 ? 0.0 : err[b];
            nv.push_back(requ_pair(u, v));
            ne.push_back(std::abs(v) * du + std::abs(u) * dv + du * dv + 10 * eps * (std::abs(u) + std::abs(v)) * (std::abs(u) + std::abs(v)));
        }
        val = std::move(nv);
        err = std::move(ne);
    }
    return err.front();
}

TEST_CASE("requ product accuracy and permutation invariance") {
    Rng rng(2);
    std::mt19937_64 shuffle(3);
    for (int t = 0; t < 2000; ++t) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 15));
        std::vector<double> x(n);
        double prod = 1.0, scale = 1.0;
        for (auto& v : x) {
            v = uniform(rng, -10, 10);
            prod *= v;
            scale *= std::max(1.0, std::abs(v));
        }
        const auto net = requ_product_network(n);
        const double got = requ_product(x);
        CHECK(std::abs(got - prod) <= product_error_bound(net, x) + 1e-15 * scale);
        if (n <= 8) CHECK(std::abs(got - prod) <= 1e-12 * scale);

        std::shuffle(x.begin(), x.end(), shuffle);
        const double permuted = requ_product(x);
        CHECK(std::abs(permuted - prod) <= product_error_bound(net, x) + 1e-15 * scale);
        if (n <= 8) CHECK(std::abs(permuted - got) <= 1e-12 * scale);

        if (n >= 4) {
            const std::vector<double> a(x.begin(), x.begin() + n / 2), b(x.begin() + n / 2, x.end());
            const double regrouped = requ_pair(requ_product(a), requ_product(b));
            if (n <= 8) CHECK(std::abs(regrouped - got) <= 1e-12 * scale);
        }
    }
}

// ---- Cutoff ----------------------------------------------------------------

TEST_CASE("cutoff plateaus and midpoint") {
    for (int p = 1; p <= 6; ++p) {
        CHECK(bspline_cutoff({p}, 0.5) == 1.0);
        CHECK(bspline_cutoff({p}, 1.0) == 1.0);
        CHECK(bspline_cutoff({p}, 2.0) == doctest::Approx(0.0));
        CHECK(bspline_cutoff({p}, 3.0) == 0.0);
        CHECK(bspline_cutoff({p}, -4.0) == 1.0);
        CHECK(bspline_cutoff({p}, 1.5) == doctest::Approx(0.5).epsilon(1e-13));  // symmetry of the window
    }
    CHECK(bspline_cutoff({2}, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bspline_integral(2, 1.5) == doctest::Approx((std::pow(1.5, 3) - 3 * std::pow(0.5, 3)) / 6.0));
}

TEST_CASE("B-spline integral matches quadrature of the recursion") {
    for (int p = 1; p <= 5; ++p) {
        for (double t : {0.3, 1.0, 1.7, 2.5, p + 0.5, p + 1.0}) {
            // Composite Simpson on unit knot intervals keeps each panel polynomial.
            double acc = 0.0;
            const int per = 64;
            for (int knot = 0; knot < p + 1; ++knot) {
                const double a = knot, b = std::min<double>(knot + 1, t);
                if (b <= a) break;
                const double h = (b - a) / per;
                double s = bspline_ref(p, a) + bspline_ref(p, b - 1e-15);
                for (int i = 1; i < per; ++i) s += (i % 2 ? 4 : 2) * bspline_ref(p, a + i * h);
                acc += s * h / 3;
            }
            CHECK(bspline_integral(p, t) == doctest::Approx(acc).epsilon(1e-9));
        }
        CHECK(bspline_integral(p, -1.0) == 0.0);
        CHECK(bspline_integral(p, p + 3.0) == doctest::Approx(1.0));
    }
}

TEST_CASE("cutoff continuity order") {
    const double h = 1e-4;
    for (int p : {1, 2}) {
        const auto chi = [p](double t) { return bspline_cutoff({p}, t); };
        for (double t0 : {1.0, 2.0}) {
            for (int q = 1; q <= p + 1; ++q) {
                const double jump = std::abs(one_sided(chi, t0, h, q, +1) - one_sided(chi, t0, h, q, -1));
                if (q <= p) {
                    CHECK_MESSAGE(jump <= 1e-3, "p=" << p << " t=" << t0 << " q=" << q);
                } else {
                    CHECK_MESSAGE(jump >= 0.5, "p=" << p << " t=" << t0 << " q=" << q);
                }
            }
        }
    }
}

// ---- Matern ----------------------------------------------------------------

TEST_CASE("matern closed forms") {
    const MaternKernel half{2.0, 3};
    CHECK(half.nu() == 0.5);
    CHECK(matern_eval(half, 0.0) == doctest::Approx(std::sqrt(pi / 8)).epsilon(1e-14));
    CHECK(matern_eval(half, 0.0) == doctest::Approx(0.62666).epsilon(1e-5));
    for (double r : {0.1, 1.0, 2.5, 7.0}) CHECK(matern_eval(half, r) == doctest::Approx(std::sqrt(pi / 8) * std::exp(-r)).epsilon(1e-14));

    const MaternKernel three{3.0, 3}, five{4.0, 3};
    for (double r : {0.01, 0.5, 1.0, 3.0, 9.0}) {
        CHECK(oracle::close(matern_eval(three, r), matern_ref(three, r), 1e-10, 0.0));
        CHECK(oracle::close(matern_eval(five, r), matern_ref(five, r), 1e-10, 0.0));
    }
    CHECK_THROWS(MaternKernel{1.5, 3}.validate());
    CHECK_THROWS(matern_eval(three, -1.0));
}

TEST_CASE("matern general order agrees with the integral representation") {
    for (double tau : {2.2, 2.7, 2.99, 3.3, 4.15}) {
        const MaternKernel k{tau, 3};
        for (double r : {1e-3, 0.2, 1.0, 1.9, 2.0, 2.1, 4.0, 12.0}) {
            CHECK_MESSAGE(oracle::close(matern_eval(k, r), matern_ref(k, r), 1e-10, 1e-300), "tau=" << tau << " r=" << r);
        }
    }
}

TEST_CASE("matern value at the origin") {
    for (double tau : {2.2, 2.7, 3.3}) {
        const MaternKernel k{tau, 3};
        const double nu = k.nu();
        const double limit = std::pow(2.0, 1 - tau) * std::tgamma(nu) * std::pow(2.0, nu - 1) / std::tgamma(tau);
        CHECK(matern_eval(k, 0.0) == doctest::Approx(limit).epsilon(1e-12));
        CHECK(oracle::close(matern_eval(k, 1e-8), limit, 1e-6, 0.0));
    }
}

TEST_CASE("matern is decreasing for nu = 3/2") {
    const MaternKernel k{3.0, 3};
    double prev = matern_eval(k, 0.0);
    for (int i = 1; i <= 10000; ++i) {
        const double v = matern_eval(k, i * 1e-3);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("series decomposition examples") {
    const MaternKernel half{2.0, 3};
    const auto d = matern_decompose(half, 1.0, 30);
    const double exact = std::sqrt(pi / 2) * std::exp(-1.0);
    CHECK(std::abs(d.a + d.b - exact) / exact <= 1e-10);
    CHECK(d.a + d.b == doctest::Approx(0.46108).epsilon(1e-5));

    const auto zero = matern_decompose(half, 0.0, 30);
    CHECK(zero.a == doctest::Approx(std::sqrt(pi / 2)).epsilon(1e-13));
    CHECK(zero.a == doctest::Approx(1.25331).epsilon(1e-5));
    for (double nu : {0.3, 1.6, 2.45}) {
        const auto z = matern_decompose(MaternKernel{nu + 1.5, 3}, 0.0, 10);
        CHECK(z.a == doctest::Approx(std::pow(2.0, nu - 1) * std::tgamma(nu)).epsilon(1e-12));
        CHECK(z.b == doctest::Approx(-pi / (2 * std::sin(pi * nu)) / (std::tgamma(nu + 1) * std::pow(2.0, nu))).epsilon(1e-12));
    }

    CHECK_THROWS_AS(matern_decompose(MaternKernel{3.5 + 1e-4, 3}, 1.0, 10), DomainError);
    CHECK_THROWS_AS(matern_decompose(MaternKernel{3.5, 3}, 1.0, 10), DomainError);
    CHECK_THROWS(matern_decompose(half, 1.0, 61));
}

TEST_CASE("series reconstruction converges geometrically") {
    const double nu = 1.6;
    double prev = decompose_error(nu, 5);
    for (int n = 10; n <= 40; n += 5) {
        const double e = decompose_error(nu, n);
        if (prev > 1e-12) CHECK_MESSAGE(e <= 0.5 * prev, "N=" << n);
        prev = e;
    }
    CHECK(prev <= 1e-12);
}

TEST_CASE("series reconstruction degrades near integer orders") {
    CHECK(decompose_error(1.5 + 1e-2, 30) >= decompose_error(1.5 + 1e-1, 30));
    // Moving towards the integer 1 amplifies the reflection factor 1 / sin(pi nu).
    const double e1 = decompose_error(1.0 + 1e-1, 30);
    const double e2 = decompose_error(1.0 + 1e-2, 30);
    const double e3 = decompose_error(1.0 + 2e-3, 30);
    CHECK(e2 >= e1);
    CHECK(e3 >= e2);
}

TEST_CASE("truncated approximant") {
    const MaternKernel k{2.99, 3};  // nu = 1.49
    const double eta = 1e-2;
    const auto t = make_truncated(k, eta, 40, 2, 4);
    for (double c : t.a_coef) CHECK(std::isfinite(c));
    for (double c : t.b_coef) CHECK(std::isfinite(c));
    for (double c : t.taylor_coef) CHECK(std::isfinite(c));

    const double nu = k.nu();
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double r = std::sqrt(2 * eta) + i * (2.0 - std::sqrt(2 * eta)) / 4000;
        worst = std::max(worst, std::abs(truncated_kernel(t, k, r * r) - matern_ref(k, r)));
    }
    CHECK(worst <= 1e-6);

    // Plateaus of the cutoff select the pure power or the Taylor patch.
    for (double u : {0.0, 0.3 * eta, eta}) {
        double q = 0.0, binom = 1.0;
        for (int j = 0; j <= 4; ++j) {
            q += binom * std::pow(eta, nu - j) * std::pow(u - eta, j);
            binom *= (nu - j) / (j + 1);
        }
        CHECK(smoothed_power(t, k, u) == doctest::Approx(q).epsilon(1e-13));
    }
    for (double u : {2 * eta, 0.5, 3.0}) CHECK(smoothed_power(t, k, u) == doctest::Approx(std::pow(u, nu)).epsilon(1e-14));
    CHECK_THROWS(make_truncated(k, 1.5, 40, 2, 4));
}

TEST_CASE("near-origin error mass shrinks with eta") {
    const MaternKernel k{2.99, 3};
    std::vector<double> mass;
    for (double eta : {1e-1, 1e-2, 1e-3}) {
        const auto t = make_truncated(k, eta, 40, 2, 4);
        const double top = std::sqrt(2 * eta);
        const int n = 2000;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double r = top * i / n;
            const double e = truncated_kernel(t, k, r * r) - matern_eval(k, r);
            acc += (i == 0 || i == n ? 0.5 : 1.0) * e * e * r * r;
        }
        mass.push_back(acc * top / n);
    }
    CHECK(mass[0] > mass[1]);
    CHECK(mass[1] > mass[2]);
}

// ---- Ridge -----------------------------------------------------------------

TEST_CASE("degree-2 bank") {
    const auto bank = degree2_bank(3);
    REQUIRE(bank.xi.size() == 6);
    for (const auto& v : bank.xi) CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
    CHECK(degree2_bank(5).xi.size() == 15);
}

TEST_CASE("squared distance ridge decomposition") {
    const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
    const auto r0 = ridge_decompose_sqdist(zero);
    for (std::size_t i = 3; i < 6; ++i)
        for (double c : r0.coef[i]) CHECK(c == 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r0.coef[i][2] == doctest::Approx(1.0));
        CHECK(r0.coef[i][1] == 0.0);
    }
    CHECK(ridge_decompose_sqdist(Eigen::Vector3d(1, 0, 0)).evaluate(Eigen::Vector3d(0, 1, 0)) == doctest::Approx(2.0));

    Rng rng(5);
    for (int t = 0; t < 1000; ++t) {
        Eigen::VectorXd x(3), y(3);
        for (int i = 0; i < 3; ++i) {
            x(i) = uniform(rng, -2, 2);
            y(i) = uniform(rng, -2, 2);
        }
        CHECK(std::abs(ridge_decompose_sqdist(y).evaluate(x) - (x - y).squaredNorm()) <= 1e-12);
    }
}

TEST_CASE("general quadratic ridge decomposition") {
    Rng rng(6);
    for (int t = 0; t < 100; ++t) {
        Eigen::Matrix3d q;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) q(i, j) = uniform(rng, -1, 1);
        q = (q + q.transpose()).eval();
        const Eigen::Vector3d b(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        const double c = uniform(rng, -1, 1);
        const auto e = ridge_decompose_quadratic(q, b, c);
        const Eigen::Vector3d x(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
        CHECK(std::abs(e.evaluate(x) - (x.dot(q * x) + b.dot(x) + c)) <= 1e-12);
    }
}

// ---- Multichannel inner-product CNN ----------------------------------------

TEST_CASE("multichannel net: single coordinate feature") {
    FeatureBank bank;
    bank.xi.push_back(Eigen::Vector3d(1, 0, 0));
    const auto net = multichannel_inner_product_net(bank, 3, 2);
    CHECK(net.depth() == 2);
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> x{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
        CHECK(net.evaluate(x)[0] == x[0]);
    }
}

TEST_CASE("multichannel net: random features") {
    Rng rng(8);
    for (int dim : {2, 3, 5, 8}) {
        for (int s = 2; s <= dim; ++s) {
            FeatureBank bank;
            for (int r = 0; r < 7; ++r) bank.xi.push_back(random_unit(rng, dim));
            const double bound = 3.0;
            const auto net = multichannel_inner_product_net(bank, dim, s, bound);
            CHECK(net.depth() == (dim - 1 + s - 2) / (s - 1));
            CHECK(net.features == 7);
            const auto zero = net.evaluate(std::vector<double>(dim, 0.0));
            for (double z : zero) CHECK(std::abs(z) <= 1e-15);
            double worst = 0.0;
            for (int t = 0; t < 1000 / dim; ++t) {
                std::vector<double> x(dim);
                for (auto& v : x) v = uniform(rng, -bound, bound);
                const auto out = net.evaluate(x);
                const Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim);
                for (std::size_t r = 0; r < bank.xi.size(); ++r) worst = std::max(worst, std::abs(out[r] - bank.xi[r].dot(xv)));
            }
            CHECK_MESSAGE(worst <= 1e-12, "D=" << dim << " S=" << s);
        }
    }
}

TEST_CASE("multichannel net: filter count is linear in the features") {
    Rng rng(9);
    for (int dim : {3, 6}) {
        for (int s = 2; s <= dim; ++s) {
            FeatureBank bank;
            std::size_t prev = 0;
            for (int m = 1; m <= 5; ++m) {
                bank.xi.push_back(random_unit(rng, dim));
                const std::size_t count = multichannel_inner_product_net(bank, dim, s).nonzero_filter_entries();
                CHECK(count == m * inner_product_filter_count(dim, s));
                if (m > 1) CHECK(count - prev == inner_product_filter_count(dim, s));
                prev = count;
            }
        }
    }
}

TEST_CASE("multichannel net: argument checks") {
    const auto bank = degree2_bank(3);
    CHECK_THROWS(multichannel_inner_product_net(bank, 3, 1));
    CHECK_THROWS(multichannel_inner_product_net(bank, 3, 4));
    CHECK_THROWS(multichannel_inner_product_net(FeatureBank{}, 3, 2));
}

// ---- Interpolation ---------------------------------------------------------

TEST_CASE("fibonacci nodes lie on the sphere and are distinct") {
    const auto nodes = fibonacci_sphere(500);
    REQUIRE(nodes.size() == 500);
    double min_sep = 10.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        CHECK(std::abs(nodes[i].norm() - 1.0) <= 1e-14);
        for (std::size_t j = i + 1; j < nodes.size(); ++j) min_sep = std::min(min_sep, (nodes[i] - nodes[j]).norm());
    }
    // Quasi-uniform: separation comparable to N^{-1/2}.
    CHECK(min_sep > 0.5 / std::sqrt(500.0));
}

TEST_CASE("kernel interpolation basics") {
    const MaternKernel k{2.5, 3};
    const std::vector<Eigen::Vector3d> one{Eigen::Vector3d(0, 0, 1)};
    const auto i1 = kernel_interpolate(one, Eigen::VectorXd::Constant(1, 0.7), k);
    CHECK(i1.coef(0) == doctest::Approx(0.7 / matern_eval(k, 0.0)));

    const auto nodes = fibonacci_sphere(200);
    Eigen::VectorXd f(200);
    for (int i = 0; i < 200; ++i) f(i) = std::sin(3 * nodes[i].x()) + nodes[i].y() * nodes[i].z();
    const auto interp = kernel_interpolate(nodes, f, k);
    const Eigen::MatrixXd g = gram_matrix(k, nodes);
    CHECK((g * interp.coef - f).lpNorm<Eigen::Infinity>() <= 1e-8 * f.lpNorm<Eigen::Infinity>());
    for (int i = 0; i < 200; ++i) CHECK(std::abs(interp(nodes[i]) - f(i)) <= 1e-8);

    Eigen::VectorXd col(200);
    for (int i = 0; i < 200; ++i) col(i) = matern_eval(k, (nodes[i] - nodes[0]).norm());
    const auto unit = kernel_interpolate(nodes, col, k);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(200);
    e1(0) = 1.0;
    CHECK((unit.coef - e1).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("Gram matrices are positive definite for quasi-uniform nodes") {
    const MaternKernel k{2.5, 3};
    for (int n : {10, 100, 500, 2000}) {
        const Eigen::MatrixXd g = gram_matrix(k, fibonacci_sphere(n));
        CHECK(g == g.transpose());
        for (int i = 0; i < n; ++i) CHECK(g(i, i) == matern_eval(k, 0.0));
        const Eigen::LLT<Eigen::MatrixXd> llt(g);
        REQUIRE(llt.info() == Eigen::Success);
        const Eigen::MatrixXd l = llt.matrixL();
        CHECK(l.diagonal().minCoeff() > 0.0);
    }
}

TEST_CASE("coincident nodes are reported, not regularized") {
    const MaternKernel k{2.5, 3};
    std::vector<Eigen::Vector3d> nodes = fibonacci_sphere(20);
    nodes.push_back(nodes[3]);
    CHECK_THROWS_AS(kernel_interpolate(nodes, Eigen::VectorXd::Ones(21), k), FactorizationError);
    CHECK_THROWS(kernel_interpolate(fibonacci_sphere(5), Eigen::VectorXd::Ones(4), k));
}

TEST_CASE("interpolation rate study") {
    const MaternKernel k{2.5, 3};
    const std::vector<int> ns{100, 200, 400, 800};
    const auto smooth = interpolation_rate_study(
        k, [](const Eigen::Vector3d& x) { return std::exp(x.x()) * std::sin(2.0 * x.y()) + x.z() * x.z(); }, ns, 2000, 1);
    REQUIRE(smooth.error.size() == ns.size());
    CHECK(smooth.slope <= -0.7);
    int inversions = 0;
    for (std::size_t i = 1; i < ns.size(); ++i) inversions += smooth.error[i] > smooth.error[i - 1];
    CHECK(inversions <= 1);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        lx.push_back(std::log(ns[i]));
        ly.push_back(std::log(smooth.error[i]));
    }
    const auto [icpt, slope] = oracle::least_squares(lx, ly);
    CHECK(smooth.slope == doctest::Approx(slope).epsilon(1e-12));
    CHECK(smooth.intercept == doctest::Approx(icpt).epsilon(1e-12));

    const auto constant = interpolation_rate_study(k, [](const Eigen::Vector3d&) { return 1.0; }, ns, 2000, 1);
    for (std::size_t i = 1; i < ns.size(); ++i) CHECK(constant.error[i] < constant.error[i - 1]);
}
