#include "picnn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "picnn/error.hpp"

namespace picnn::geometry {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegenerateDet = 1e-12;
constexpr double kAngleSlack = 1e-12;
constexpr std::size_t kMaxRejectionDraws = 1'000'000;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Coarse range check used by the differential operators: the pole cap is not
// enforced here, so approaching the pole surfaces as DegenerateMetric.
void check_operator_domain(const Manifold& m, const ChartPoint& p) {
    const double theta_max = m.kind == ManifoldKind::Hemisphere ? kPi / 2 : kPi;
    if (!std::isfinite(p.theta) || !std::isfinite(p.phi) || p.theta < -kAngleSlack ||
        p.theta > theta_max + kAngleSlack) {
        throw DomainError("chart point outside the operator domain: theta=" + std::to_string(p.theta));
    }
}

struct DiagonalMetric {
    double g11, g22;    // metric entries
    double dg11, dg22;  // theta-derivatives
};

DiagonalMetric diagonal_metric(const Manifold& m, const ChartPoint& p) {
    check_operator_domain(m, p);
    DiagonalMetric g{};
    if (m.kind == ManifoldKind::Hemisphere) {
        const double s = std::sin(p.theta), c = std::cos(p.theta);
        g = {1.0, s * s, 0.0, 2.0 * s * c};
    } else {
        const double r = m.minor_radius;
        const double ring = m.major_radius + r * std::cos(p.theta);
        g = {r * r, ring * ring, 0.0, -2.0 * ring * r * std::sin(p.theta)};
    }
    if (g.g11 * g.g22 < kDegenerateDet) {
        throw DegenerateMetric("metric determinant " + std::to_string(g.g11 * g.g22) + " below 1e-12 at theta=" +
                               std::to_string(p.theta));
    }
    return g;
}

// d_theta(sqrt|g| g^{11}) / sqrt|g| for a theta-dependent diagonal metric.
double theta_flux_factor(const DiagonalMetric& g) {
    return (0.5 * (g.dg11 / g.g11 + g.dg22 / g.g22) - g.dg11 / g.g11) / g.g11;
}

}  // namespace

std::string to_string(ManifoldKind kind) {
    return kind == ManifoldKind::Hemisphere ? "hemisphere" : "half-torus";
}

ManifoldKind parse_manifold(const std::string& text) {
    if (text == "hemisphere") return ManifoldKind::Hemisphere;
    if (text == "half-torus" || text == "half_torus" || text == "torus") return ManifoldKind::HalfTorus;
    throw std::invalid_argument("unknown manifold '" + text + "' (expected hemisphere or half-torus)");
}

Manifold Manifold::hemisphere(double pole_exclusion) {
    Manifold m;
    m.kind = ManifoldKind::Hemisphere;
    m.pole_exclusion = pole_exclusion;
    m.validate();
    return m;
}

Manifold Manifold::half_torus(double major_radius, double minor_radius) {
    Manifold m;
    m.kind = ManifoldKind::HalfTorus;
    m.major_radius = major_radius;
    m.minor_radius = minor_radius;
    m.validate();
    return m;
}

void Manifold::validate() const {
    if (!(pole_exclusion > 0.0 && pole_exclusion <= kPi / 8)) {
        throw std::invalid_argument("pole_exclusion must lie in (0, pi/8]");
    }
    if (kind == ManifoldKind::HalfTorus && !(minor_radius > 0.0 && minor_radius < major_radius)) {
        throw std::invalid_argument("half-torus requires 0 < minor_radius < major_radius");
    }
}

BoundaryComponent::BoundaryComponent(BoundaryLabel label, double circle_radius)
    : label_(label), radius_(circle_radius) {}

double BoundaryComponent::length() const { return kTwoPi * radius_; }

AmbientPoint BoundaryComponent::parametrize(double tau) const {
    const double angle = tau / radius_;
    return {radius_ * std::cos(angle), radius_ * std::sin(angle), 0.0};
}

std::vector<BoundaryComponent> boundary_components(const Manifold& m) {
    if (m.kind == ManifoldKind::Hemisphere) return {BoundaryComponent(BoundaryLabel::Equator, 1.0)};
    return {BoundaryComponent(BoundaryLabel::TorusOuter, m.major_radius + m.minor_radius),
            BoundaryComponent(BoundaryLabel::TorusInner, m.major_radius - m.minor_radius)};
}

void check_chart(const Manifold& m, const ChartPoint& p) {
    const bool phi_ok = std::isfinite(p.phi) && p.phi >= 0.0 && p.phi < kTwoPi;
    bool theta_ok = std::isfinite(p.theta);
    if (m.kind == ManifoldKind::Hemisphere) {
        theta_ok = theta_ok && p.theta >= m.pole_exclusion && p.theta <= kPi / 2;
    } else {
        theta_ok = theta_ok && p.theta >= 0.0 && p.theta <= kPi;
    }
    if (!phi_ok || !theta_ok) {
        throw DomainError("chart point (" + std::to_string(p.theta) + ", " + std::to_string(p.phi) +
                          ") outside the " + to_string(m.kind) + " chart domain");
    }
}

AmbientPoint chart_embed(const Manifold& m, const ChartPoint& p) {
    check_chart(m, p);
    const auto q = embed(m, p.theta, p.phi);
    return {q[0], q[1], q[2]};
}

std::array<ad::Jet, 3> embed_jet(const Manifold& m, const ChartPoint& p) {
    const auto [theta, phi] = ad::lift_chart(p.theta, p.phi);
    return embed(m, theta, phi);
}

double surface_residual(const Manifold& m, const AmbientPoint& q) {
    if (m.kind == ManifoldKind::Hemisphere) return q.x * q.x + q.y * q.y + q.z * q.z - 1.0;
    const double rho = std::hypot(q.x, q.y) - m.major_radius;
    return rho * rho + q.z * q.z - m.minor_radius * m.minor_radius;
}

Eigen::Matrix2d metric(const Manifold& m, const ChartPoint& p) {
    const DiagonalMetric g = diagonal_metric(m, p);
    Eigen::Matrix2d out;
    out << g.g11, 0.0, 0.0, g.g22;
    return out;
}

std::vector<Sample> sample_interior(const Manifold& m, std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("sample_interior: n must be at least 1");
    std::vector<Sample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ChartPoint p;
        if (m.kind == ManifoldKind::Hemisphere) {
            // Archimedes: z is uniform under the area measure.
            const double z = uniform(rng, 0.0, std::cos(m.pole_exclusion));
            p.theta = std::clamp(std::acos(z), m.pole_exclusion, kPi / 2);
            p.phi = kTwoPi * uniform01(rng);
        } else {
            p.phi = kTwoPi * uniform01(rng);
            const double r = m.minor_radius, big = m.major_radius;
            std::size_t draws = 0;
            for (;;) {
                if (++draws > kMaxRejectionDraws) throw std::runtime_error("sample_interior: rejection cap exceeded");
                const double theta = kPi * uniform01(rng);
                if (uniform01(rng) * (big + r) <= big + r * std::cos(theta)) {
                    p.theta = theta;
                    break;
                }
            }
        }
        out.push_back({p, chart_embed(m, p)});
    }
    return out;
}

std::vector<std::vector<AmbientPoint>> sample_boundary(const Manifold& m, std::size_t per_component) {
    if (per_component < 4 || !is_power_of_two(per_component)) {
        throw std::invalid_argument("sample_boundary: M must be a power of two >= 4, got " +
                                    std::to_string(per_component));
    }
    std::vector<std::vector<AmbientPoint>> out;
    for (const BoundaryComponent& c : boundary_components(m)) {
        std::vector<AmbientPoint> pts(per_component);
        for (std::size_t j = 0; j < per_component; ++j) {
            pts[j] = c.parametrize(static_cast<double>(j) * c.length() / static_cast<double>(per_component));
        }
        out.push_back(std::move(pts));
    }
    return out;
}

double exact_solution(const AmbientPoint& q) { return q.x * q.y * q.z; }

ad::Jet exact_solution_jet(const Manifold& m, const ChartPoint& p) {
    const auto q = embed_jet(m, p);
    return q[0] * q[1] * q[2];
}

double boundary_data(const AmbientPoint& q) { return exact_solution(q); }

std::array<double, 3> diffusion_coefficient(const Manifold& m, const ChartPoint& p) {
    if (m.kind == ManifoldKind::Hemisphere) return {2.0 + std::cos(p.theta), -std::sin(p.theta), 0.0};
    const double r = m.minor_radius;
    return {2.0 + r * std::sin(p.theta), r * std::cos(p.theta), 0.0};
}

Stencil elliptic_stencil(const Manifold& m, const ChartPoint& p) {
    const DiagonalMetric g = diagonal_metric(m, p);
    const auto [a, a_theta, a_phi] = diffusion_coefficient(m, p);
    const double inv11 = 1.0 / g.g11, inv22 = 1.0 / g.g22;
    Stencil s;
    s.coef[0] = 1.0;
    s.coef[1] = -(a_theta * inv11 + a * theta_flux_factor(g));
    s.coef[2] = -a_phi * inv22;
    s.coef[3] = -a * inv11;
    s.coef[4] = 0.0;
    s.coef[5] = -a * inv22;
    return s;
}

Stencil laplace_beltrami_stencil(const Manifold& m, const ChartPoint& p) {
    const DiagonalMetric g = diagonal_metric(m, p);
    Stencil s;
    s.coef[1] = -theta_flux_factor(g);
    s.coef[3] = -1.0 / g.g11;
    s.coef[5] = -1.0 / g.g22;
    return s;
}

double apply_elliptic_operator(const ad::Jet& u, const Manifold& m, const ChartPoint& p) {
    return elliptic_stencil(m, p).apply(u);
}

double laplace_beltrami(const ad::Jet& u, const Manifold& m, const ChartPoint& p) {
    return laplace_beltrami_stencil(m, p).apply(u);
}

double source_term(const Manifold& m, const ChartPoint& p) {
    return apply_elliptic_operator(exact_solution_jet(m, p), m, p);
}

}  // namespace picnn::geometry
