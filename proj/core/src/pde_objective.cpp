#include "picnn/pde_objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "picnn/error.hpp"
#include "picnn/rng.hpp"

namespace picnn::train {

namespace {

double l2_term(const std::vector<std::vector<double>>& residuals, std::size_t total,
               std::vector<std::vector<double>>* grads) {
    double acc = 0.0;
    for (std::size_t c = 0; c < residuals.size(); ++c) {
        for (std::size_t j = 0; j < residuals[c].size(); ++j) {
            const double e = residuals[c][j];
            acc += e * e;
            if (grads) (*grads)[c][j] += 2.0 * e / static_cast<double>(total);
        }
    }
    return acc / static_cast<double>(total);
}

std::vector<std::vector<double>> split_residuals(const Eigen::RowVectorXd& out, const BoundaryData& boundary) {
    std::vector<std::vector<double>> res(boundary.points.size());
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < boundary.points.size(); ++c) {
        res[c].resize(boundary.points[c].size());
        for (std::size_t j = 0; j < res[c].size(); ++j) res[c][j] = out(col++) - boundary.target[c][j];
    }
    return res;
}

net::Batch boundary_inputs(const BoundaryData& boundary) {
    std::vector<std::array<double, 3>> pts;
    pts.reserve(boundary.total());
    for (const auto& comp : boundary.points) {
        for (const auto& q : comp) pts.push_back({q.x, q.y, q.z});
    }
    return net::Batch::plain(pts);
}

net::Batch interior_inputs(const InteriorData& interior, std::span<const std::size_t> batch) {
    if (batch.empty()) return net::Batch::jets(interior.inputs);
    std::vector<std::array<ad::Jet, 3>> sel;
    sel.reserve(batch.size());
    for (std::size_t i : batch) sel.push_back(interior.inputs.at(i));
    return net::Batch::jets(sel);
}

}  // namespace

InteriorData make_interior(const geometry::Manifold& m, std::vector<geometry::Sample> samples) {
    InteriorData d;
    d.samples = std::move(samples);
    d.inputs.reserve(d.samples.size());
    d.stencils.reserve(d.samples.size());
    d.source.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        d.inputs.push_back(geometry::embed_jet(m, s.chart));
        d.stencils.push_back(geometry::elliptic_stencil(m, s.chart));
        d.source.push_back(geometry::source_term(m, s.chart));
    }
    return d;
}

std::size_t BoundaryData::total() const {
    std::size_t n = 0;
    for (const auto& c : points) n += c.size();
    return n;
}

BoundaryData make_boundary(const geometry::Manifold& m, std::size_t per_component) {
    BoundaryData b;
    b.points = geometry::sample_boundary(m, per_component);
    for (const auto& comp : geometry::boundary_components(m)) b.lengths.push_back(comp.length());
    for (const auto& comp : b.points) {
        std::vector<double> g;
        g.reserve(comp.size());
        for (const auto& q : comp) g.push_back(geometry::boundary_data(q));
        b.target.push_back(std::move(g));
    }
    return b;
}

TestData make_test(const geometry::Manifold& m, std::vector<geometry::Sample> samples) {
    TestData t;
    t.samples = std::move(samples);
    for (const auto& s : t.samples) {
        t.inputs.push_back(geometry::embed_jet(m, s.chart));
        const geometry::Stencil lb = geometry::laplace_beltrami_stencil(m, s.chart);
        t.laplace.push_back(lb);
        t.u_exact.push_back(geometry::exact_solution(s.ambient));
        t.lap_exact.push_back(lb.apply(geometry::exact_solution_jet(m, s.chart)));
    }
    return t;
}

int resolve_truncation(const TrainConfig& config, std::size_t samples) {
    if (config.truncation >= 0) return config.truncation;
    const int half = static_cast<int>(samples / 2);
    // The sqrt(2) sin/cos basis is only orthonormal below Nyquist.
    return config.bnd_mode == BoundaryMode::PluginEigen ? half - 1 : half;
}

BoundaryPenalty::BoundaryPenalty(const BoundaryData& boundary, const TrainConfig& config)
    : config_(config), total_(boundary.total()) {
    if (total_ == 0) throw std::invalid_argument("boundary has no samples");
    const double sigma = spectral::trace_order(config.s_order);
    for (std::size_t c = 0; c < boundary.points.size(); ++c) {
        const std::size_t m = boundary.points[c].size();
        const int k = resolve_truncation(config, m);
        if (config.bnd_mode == BoundaryMode::SobolevFFT) {
            if (static_cast<std::size_t>(k) > m / 2) throw std::invalid_argument("truncation K exceeds M/2");
            tables_.emplace_back(boundary.lengths[c], sigma, k);
        } else if (config.bnd_mode == BoundaryMode::PluginEigen) {
            bases_.push_back(spectral::circle_eigenbasis(static_cast<int>(m), boundary.lengths[c], k));
        }
    }
}

double BoundaryPenalty::operator()(const std::vector<std::vector<double>>& residuals,
                                   std::vector<std::vector<double>>* grads) const {
    if (grads) {
        grads->resize(residuals.size());
        for (std::size_t c = 0; c < residuals.size(); ++c) (*grads)[c].assign(residuals[c].size(), 0.0);
    }
    if (config_.bnd_mode == BoundaryMode::L2) return l2_term(residuals, total_, grads);

    double acc = 0.0;
    std::vector<double> g;
    const double sigma = spectral::trace_order(config_.s_order);
    for (std::size_t c = 0; c < residuals.size(); ++c) {
        const auto& e = residuals[c];
        if (grads) g.assign(e.size(), 0.0);
        const std::span<double> gs = grads ? std::span<double>(g) : std::span<double>();
        if (config_.bnd_mode == BoundaryMode::SobolevFFT) {
            acc += grads ? spectral::spectral_penalty(e, tables_[c], gs) : spectral::spectral_penalty(e, tables_[c]);
        } else {
            acc += spectral::plugin_penalty(e, bases_[c], sigma, gs);
        }
        if (grads) std::copy(g.begin(), g.end(), (*grads)[c].begin());
    }
    if (config_.include_plain_l2_term) acc += l2_term(residuals, total_, grads);
    return acc;
}

double physics_loss(const JetField& u, const InteriorData& interior) {
    if (interior.size() == 0) throw std::invalid_argument("physics loss needs at least one interior sample");
    double acc = 0.0;
    for (std::size_t i = 0; i < interior.size(); ++i) {
        const double r = interior.stencils[i].apply(u(interior.samples[i])) - interior.source[i];
        acc += r * r;
    }
    return acc / static_cast<double>(interior.size());
}

double boundary_loss(const ValueField& u, const BoundaryData& boundary, const TrainConfig& config) {
    std::vector<std::vector<double>> res(boundary.points.size());
    for (std::size_t c = 0; c < res.size(); ++c) {
        for (std::size_t j = 0; j < boundary.points[c].size(); ++j)
            res[c].push_back(u(boundary.points[c][j]) - boundary.target[c][j]);
    }
    return BoundaryPenalty(boundary, config)(res);
}

double total_loss(const JetField& u_jet, const ValueField& u, const ProblemData& data, const TrainConfig& config) {
    return physics_loss(u_jet, data.interior) + config.lambda_bnd * boundary_loss(u, data.boundary, config);
}

RelErrors rel_errors(const JetField& u, const TestData& test) {
    if (test.size() == 0) throw std::invalid_argument("empty test set");
    double num0 = 0.0, den0 = 0.0, num2 = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const ad::Jet j = u(test.samples[i]);
        const double lap = test.laplace[i].apply(j);
        num0 += std::pow(j.val - test.u_exact[i], 2);
        den0 += test.u_exact[i] * test.u_exact[i];
        num2 += std::pow(lap - test.lap_exact[i], 2);
        den2 += test.lap_exact[i] * test.lap_exact[i];
    }
    if (den0 == 0.0 || den2 == 0.0) throw DomainError("relative error with zero reference norm");
    return {std::sqrt(num0 / den0), std::sqrt(num2 / den2)};
}

double physics_loss(const net::BatchNetwork& net, std::span<const double> params, const InteriorData& interior) {
    if (interior.size() == 0) throw std::invalid_argument("physics loss needs at least one interior sample");
    net::Workspace ws;
    const net::Batch in = net::Batch::jets(interior.inputs);
    const Eigen::RowVectorXd out = net.forward(params, in, ws);
    double acc = 0.0;
    for (int p = 0; p < in.points; ++p) {
        const double r = interior.stencils[p].apply(net::output_jet(out, in.points, p)) - interior.source[p];
        acc += r * r;
    }
    return acc / in.points;
}

double boundary_loss(const net::BatchNetwork& net, std::span<const double> params, const BoundaryData& boundary,
                     const TrainConfig& config) {
    net::Workspace ws;
    const Eigen::RowVectorXd out = net.forward(params, boundary_inputs(boundary), ws);
    return BoundaryPenalty(boundary, config)(split_residuals(out, boundary));
}

double total_loss(const net::BatchNetwork& net, std::span<const double> params, const ProblemData& data,
                  const TrainConfig& config) {
    return physics_loss(net, params, data.interior) + config.lambda_bnd * boundary_loss(net, params, data.boundary, config);
}

RelErrors rel_errors(const net::BatchNetwork& net, std::span<const double> params, const TestData& test,
                     std::size_t limit) {
    const std::size_t n = limit == 0 ? test.size() : std::min(limit, test.size());
    if (n == 0) throw std::invalid_argument("empty test set");
    constexpr std::size_t kChunk = 1024;
    double num0 = 0.0, den0 = 0.0, num2 = 0.0, den2 = 0.0;
    net::Workspace ws;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t len = std::min(kChunk, n - start);
        const net::Batch in = net::Batch::jets(std::span(test.inputs).subspan(start, len));
        const Eigen::RowVectorXd out = net.forward(params, in, ws);
        for (std::size_t p = 0; p < len; ++p) {
            const std::size_t i = start + p;
            const ad::Jet j = net::output_jet(out, in.points, static_cast<int>(p));
            const double lap = test.laplace[i].apply(j);
            num0 += std::pow(j.val - test.u_exact[i], 2);
            den0 += test.u_exact[i] * test.u_exact[i];
            num2 += std::pow(lap - test.lap_exact[i], 2);
            den2 += test.lap_exact[i] * test.lap_exact[i];
        }
    }
    if (den0 == 0.0 || den2 == 0.0) throw DomainError("relative error with zero reference norm");
    return {std::sqrt(num0 / den0), std::sqrt(num2 / den2)};
}

PicnnObjective::PicnnObjective(const net::BatchNetwork& net, const ProblemData& data, const TrainConfig& config)
    : net_(net), data_(data), config_(config), penalty_(data.boundary, config),
      boundary_batch_(boundary_inputs(data.boundary)) {
    if (data.interior.size() == 0) throw std::invalid_argument("no interior samples");
}

double PicnnObjective::evaluate(std::span<const double> params, std::span<const std::size_t> batch,
                                std::span<double> grad) {
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);

    const net::Batch in = interior_inputs(data_.interior, batch);
    const int pts = in.points;
    const Eigen::RowVectorXd out = net_.forward(params, in, ws_);
    Eigen::RowVectorXd adj;
    if (want_grad) adj.setZero(in.cols());
    double phys = 0.0;
    for (int p = 0; p < pts; ++p) {
        const std::size_t i = batch.empty() ? static_cast<std::size_t>(p) : batch[p];
        const geometry::Stencil& st = data_.interior.stencils[i];
        const double r = st.apply(net::output_jet(out, pts, p)) - data_.interior.source[i];
        phys += r * r;
        if (want_grad) {
            for (int c = 0; c < ad::Jet::kSize; ++c) adj(c * pts + p) = 2.0 * r * st.coef[c] / pts;
        }
    }
    phys /= pts;
    if (want_grad) net_.backward(params, ws_, adj, grad);

    const Eigen::RowVectorXd bout = net_.forward(params, boundary_batch_, ws_);
    std::vector<std::vector<double>> bgrad;
    const double bnd = penalty_(split_residuals(bout, data_.boundary), want_grad ? &bgrad : nullptr);
    if (want_grad && config_.lambda_bnd != 0.0) {
        Eigen::RowVectorXd badj(boundary_batch_.cols());
        Eigen::Index col = 0;
        for (const auto& comp : bgrad) {
            for (double g : comp) badj(col++) = config_.lambda_bnd * g;
        }
        net_.backward(params, ws_, badj, grad);
    }
    last_physics_ = phys;
    last_boundary_ = bnd;
    return phys + config_.lambda_bnd * bnd;
}

TrainResult train(const net::BatchNetwork& net, const ProblemData& data, const TrainConfig& config,
                  const Monitor& monitor) {
    Rng rng(config.seed);
    net::NetworkParams init = net::init(net.spec(), rng);
    PicnnObjective objective(net, data, config);
    return optimize(objective, std::move(init.flat), config, monitor);
}

}  // namespace picnn::train
