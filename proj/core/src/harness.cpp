#include "picnn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "picnn/batch_network.hpp"
#include "picnn/error.hpp"
#include "picnn/pde_objective.hpp"
#include "picnn/rng.hpp"
#include "picnn/stats.hpp"

namespace picnn::harness {

std::uint64_t cell_seed(std::uint64_t base_seed, int n, int trial) {
    return base_seed + mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) ^
                             static_cast<std::uint32_t>(trial));
}

std::string TrialRecord::cell_id() const {
    return manifold + "_" + bnd_mode + "_N" + std::to_string(n) + "_t" + std::to_string(trial);
}

SlopeFit slope_fit(std::span<const double> means, std::span<const int> ns) {
    if (means.size() != ns.size()) throw std::invalid_argument("slope fit: size mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1) throw std::invalid_argument("slope fit: N must be positive");
        if (!(means[i] > 0.0)) throw std::invalid_argument("slope fit: means must be positive");
        x.push_back(std::log2(static_cast<double>(ns[i])));
        y.push_back(std::log2(means[i]));
    }
    const stats::Line line = stats::fit_line(x, y);
    return {line.intercept, -line.slope};
}

TrialRecord run_cell(const ExperimentConfig& cfg, int n, int trial) {
    const std::uint64_t seed = cell_seed(cfg.base_seed, n, trial);
    TrialRecord rec;
    rec.manifold = geometry::to_string(cfg.manifold.kind);
    rec.bnd_mode = train::to_string(cfg.train.bnd_mode);
    rec.n = n;
    rec.trial = trial;
    rec.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    Rng data_rng(mix64(seed ^ 0x243f6a8885a308d3ULL));
    Rng test_rng(mix64(seed ^ 0x13198a2e03707344ULL));
    const train::ProblemData data{
        cfg.manifold,
        train::make_interior(cfg.manifold, geometry::sample_interior(cfg.manifold, static_cast<std::size_t>(n), data_rng)),
        train::make_boundary(cfg.manifold, static_cast<std::size_t>(cfg.m)),
    };
    const train::TestData test =
        train::make_test(cfg.manifold, geometry::sample_interior(cfg.manifold, static_cast<std::size_t>(cfg.n_test), test_rng));

    const net::BatchNetwork network(cfg.net);
    train::TrainConfig tc = cfg.train;
    tc.seed = seed;
    train::Monitor monitor;
    if (cfg.trace_test_size > 0) {
        monitor = [&](std::span<const double> params) {
            const auto e = train::rel_errors(network, params, test, static_cast<std::size_t>(cfg.trace_test_size));
            return std::pair{e.rel_l2, e.rel_h2};
        };
    }

    train::TrainResult result;
    try {
        result = train::train(network, data, tc, monitor);
    } catch (const TrainingDiverged& e) {
        throw TrainingDiverged("cell " + rec.cell_id() + ": " + e.what());
    }
    const auto errors = train::rel_errors(network, result.best_params, test);
    rec.rel_l2 = errors.rel_l2;
    rec.rel_h2 = errors.rel_h2;
    rec.best_loss = result.best_loss;
    rec.best_epoch = result.best_epoch;
    rec.trace = std::move(result.trace);

    if (cfg.write_pointwise) {
        std::vector<std::array<double, 3>> pts;
        for (const auto& s : test.samples) pts.push_back({s.ambient.x, s.ambient.y, s.ambient.z});
        net::Workspace ws;
        const Eigen::RowVectorXd u = network.forward(result.best_params, net::Batch::plain(pts), ws);
        for (std::size_t i = 0; i < pts.size(); ++i)
            rec.pointwise.push_back({pts[i][0], pts[i][1], pts[i][2], u(static_cast<Eigen::Index>(i)), test.u_exact[i]});
    }
    if (cfg.write_checkpoints) rec.best_params = std::move(result.best_params);
    rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

void aggregate(RunReport& report) {
    report.per_n.clear();
    std::vector<int> ns;
    for (const auto& t : report.trials) ns.push_back(t.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (int n : ns) {
        std::vector<double> l2, h2;
        for (const auto& t : report.trials) {
            if (t.n != n) continue;
            l2.push_back(t.rel_l2);
            h2.push_back(t.rel_h2);
        }
        report.per_n.push_back({n, static_cast<int>(l2.size()), stats::mean(l2), stats::stddev(l2), stats::mean(h2),
                                stats::stddev(h2)});
    }
    report.has_slope = false;
    if (report.per_n.size() >= 2) {
        std::vector<double> l2, h2;
        for (const auto& a : report.per_n) {
            l2.push_back(a.mean_l2);
            h2.push_back(a.mean_h2);
        }
        const bool positive = std::all_of(l2.begin(), l2.end(), [](double v) { return v > 0.0; }) &&
                              std::all_of(h2.begin(), h2.end(), [](double v) { return v > 0.0; });
        if (positive) {
            report.slope_l2 = slope_fit(l2, ns);
            report.slope_h2 = slope_fit(h2, ns);
            report.has_slope = true;
        }
    }
}

RunReport run_experiment(const ExperimentConfig& cfg, const Progress& progress) {
    cfg.validate();
    std::vector<std::pair<int, int>> cells;
    for (int n : cfg.n_list) {
        for (int t = 0; t < cfg.trials; ++t) cells.emplace_back(n, t);
    }

    std::vector<TrialRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            {
                std::lock_guard lock(mu);
                if (failure) return;
            }
            try {
                records[i] = run_cell(cfg, cells[i].first, cells[i].second);
                if (progress) {
                    std::lock_guard lock(mu);
                    progress(records[i]);
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    RunReport report;
    report.config = config_echo(cfg);
    report.trials = std::move(records);
    aggregate(report);
    return report;
}

}  // namespace picnn::harness
