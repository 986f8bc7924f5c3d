#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "picnn/autodiff/jet.hpp"
#include "picnn/batch_network.hpp"
#include "picnn/geometry.hpp"
#include "picnn/network.hpp"
#include "picnn/spectral.hpp"
#include "picnn/training.hpp"

namespace picnn::train {

/// Interior collocation points with their operator stencils and source values.
struct InteriorData {
    std::vector<geometry::Sample> samples;
    std::vector<std::array<ad::Jet, 3>> inputs;
    std::vector<geometry::Stencil> stencils;
    std::vector<double> source;

    std::size_t size() const { return samples.size(); }
};

InteriorData make_interior(const geometry::Manifold& m, std::vector<geometry::Sample> samples);

/// Equidistant boundary grids, one per component.
struct BoundaryData {
    std::vector<std::vector<geometry::AmbientPoint>> points;
    std::vector<std::vector<double>> target;
    std::vector<double> lengths;

    std::size_t total() const;
};

BoundaryData make_boundary(const geometry::Manifold& m, std::size_t per_component);

struct TestData {
    std::vector<geometry::Sample> samples;
    std::vector<std::array<ad::Jet, 3>> inputs;
    std::vector<geometry::Stencil> laplace;
    std::vector<double> u_exact;
    std::vector<double> lap_exact;

    std::size_t size() const { return samples.size(); }
};

TestData make_test(const geometry::Manifold& m, std::vector<geometry::Sample> samples);

struct ProblemData {
    geometry::Manifold manifold;
    InteriorData interior;
    BoundaryData boundary;
};

/// Truncation actually used for a component with the given sample count.
int resolve_truncation(const TrainConfig& config, std::size_t samples);

/// Boundary penalty of the selected mode with its per-component tables
/// precomputed. Does not include lambda_bnd.
class BoundaryPenalty {
public:
    BoundaryPenalty(const BoundaryData& boundary, const TrainConfig& config);

    /// Penalty of per-component residuals e = u - g. If grads is non-null it
    /// receives d(penalty)/de with the same shape.
    double operator()(const std::vector<std::vector<double>>& residuals,
                      std::vector<std::vector<double>>* grads = nullptr) const;

private:
    TrainConfig config_;
    std::size_t total_ = 0;
    std::vector<spectral::SpectralWeightTable> tables_;
    std::vector<spectral::Eigenbasis> bases_;
};

/// A chart jet of a candidate solution at a sample.
using JetField = std::function<ad::Jet(const geometry::Sample&)>;
using ValueField = std::function<double(const geometry::AmbientPoint&)>;

double physics_loss(const JetField& u, const InteriorData& interior);
double boundary_loss(const ValueField& u, const BoundaryData& boundary, const TrainConfig& config);
double total_loss(const JetField& u_jet, const ValueField& u, const ProblemData& data, const TrainConfig& config);

struct RelErrors {
    double rel_l2 = 0.0;
    double rel_h2 = 0.0;
};

RelErrors rel_errors(const JetField& u, const TestData& test);

double physics_loss(const net::BatchNetwork& net, std::span<const double> params, const InteriorData& interior);
double boundary_loss(const net::BatchNetwork& net, std::span<const double> params, const BoundaryData& boundary,
                     const TrainConfig& config);
double total_loss(const net::BatchNetwork& net, std::span<const double> params, const ProblemData& data,
                  const TrainConfig& config);
RelErrors rel_errors(const net::BatchNetwork& net, std::span<const double> params, const TestData& test,
                     std::size_t limit = 0);

/// physics + lambda * boundary for the batched network; mini-batches range over interior points.
class PicnnObjective final : public Objective {
public:
    PicnnObjective(const net::BatchNetwork& net, const ProblemData& data, const TrainConfig& config);

    std::size_t dimension() const override { return net_.layout().size(); }
    std::size_t population() const override { return data_.interior.size(); }
    double evaluate(std::span<const double> params, std::span<const std::size_t> batch,
                    std::span<double> grad) override;

    double last_physics() const { return last_physics_; }
    double last_boundary() const { return last_boundary_; }

private:
    const net::BatchNetwork& net_;
    const ProblemData& data_;
    TrainConfig config_;
    BoundaryPenalty penalty_;
    net::Batch boundary_batch_;
    net::Workspace ws_;
    double last_physics_ = 0.0;
    double last_boundary_ = 0.0;
};

/// Full training run: Glorot init from config.seed, then optimize.
TrainResult train(const net::BatchNetwork& net, const ProblemData& data, const TrainConfig& config,
                  const Monitor& monitor = {});

}  // namespace picnn::train
