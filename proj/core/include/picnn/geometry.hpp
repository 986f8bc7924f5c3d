#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "picnn/autodiff/jet.hpp"
#include "picnn/rng.hpp"

namespace picnn::geometry {

enum class ManifoldKind { Hemisphere, HalfTorus };

std::string to_string(ManifoldKind kind);
ManifoldKind parse_manifold(const std::string& text);

/// Benchmark surface. Hemisphere ignores the torus radii.
struct Manifold {
    ManifoldKind kind = ManifoldKind::Hemisphere;
    double major_radius = 2.0;
    double minor_radius = 1.0;
    double pole_exclusion = 1e-3;  // chart-angle cap excluded around the hemisphere pole

    static Manifold hemisphere(double pole_exclusion = 1e-3);
    static Manifold half_torus(double major_radius = 2.0, double minor_radius = 1.0);

    /// Throws std::invalid_argument when the radii or pole cap are out of range.
    void validate() const;
};

/// Chart coordinates: theta is the polar (hemisphere) or tube (torus) angle,
/// phi the azimuth.
struct ChartPoint {
    double theta = 0.0;
    double phi = 0.0;
};

struct AmbientPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct Sample {
    ChartPoint chart;
    AmbientPoint ambient;
};

enum class BoundaryLabel { Equator, TorusOuter, TorusInner };

/// Closed boundary curve with its unit-speed parametrization on [0, length).
class BoundaryComponent {
public:
    BoundaryComponent(BoundaryLabel label, double circle_radius);

    BoundaryLabel label() const { return label_; }
    double length() const;
    AmbientPoint parametrize(double tau) const;

private:
    BoundaryLabel label_;
    double radius_;
};

std::vector<BoundaryComponent> boundary_components(const Manifold& m);

/// Embedding written once for every payload type (double, jets, tape values).
template <class T>
std::array<T, 3> embed(const Manifold& m, const T& theta, const T& phi) {
    using std::cos;
    using std::sin;
    using ad::cos;
    using ad::sin;
    if (m.kind == ManifoldKind::Hemisphere) {
        const T st = sin(theta);
        return {st * cos(phi), st * sin(phi), cos(theta)};
    }
    const T ring = m.major_radius + m.minor_radius * cos(theta);
    return {ring * cos(phi), ring * sin(phi), m.minor_radius * sin(theta)};
}

/// Throws DomainError if p is outside the chart domain of m.
void check_chart(const Manifold& m, const ChartPoint& p);

AmbientPoint chart_embed(const Manifold& m, const ChartPoint& p);

/// Ambient coordinates as jets in the chart directions.
std::array<ad::Jet, 3> embed_jet(const Manifold& m, const ChartPoint& p);

/// Residual of the implicit surface equation (0 on the surface).
double surface_residual(const Manifold& m, const AmbientPoint& q);

/// First fundamental form of the chart. Throws DegenerateMetric if det < 1e-12.
Eigen::Matrix2d metric(const Manifold& m, const ChartPoint& p);

std::vector<Sample> sample_interior(const Manifold& m, std::size_t n, Rng& rng);

/// M equidistant arclength samples per boundary component; M must be a power
/// of two and at least 4.
std::vector<std::vector<AmbientPoint>> sample_boundary(const Manifold& m, std::size_t per_component);

double exact_solution(const AmbientPoint& q);

/// Exact jet of u* composed with the embedding at p.
ad::Jet exact_solution_jet(const Manifold& m, const ChartPoint& p);

double boundary_data(const AmbientPoint& q);

/// A second-order linear differential operator at a chart point, written as
/// coefficients on the jet components (val, g0, g1, h00, h01, h11).
struct Stencil {
    std::array<double, 6> coef{};

    template <class T>
    T apply(const ad::Jet2<T>& u) const {
        T acc = u[0] * coef[0];
        for (int c = 1; c < 6; ++c) acc = acc + u[c] * coef[c];
        return acc;
    }
};

/// -div((2 + z) grad u) + u at p.
Stencil elliptic_stencil(const Manifold& m, const ChartPoint& p);

/// Positive Laplace-Beltrami operator -div(grad u) at p.
Stencil laplace_beltrami_stencil(const Manifold& m, const ChartPoint& p);

double apply_elliptic_operator(const ad::Jet& u, const Manifold& m, const ChartPoint& p);
double laplace_beltrami(const ad::Jet& u, const Manifold& m, const ChartPoint& p);

/// f = L(u* o embed), evaluated through exact jet arithmetic.
double source_term(const Manifold& m, const ChartPoint& p);

/// Diffusion coefficient a = 2 + z and its chart derivatives (a, a_theta, a_phi).
std::array<double, 3> diffusion_coefficient(const Manifold& m, const ChartPoint& p);

}  // namespace picnn::geometry
