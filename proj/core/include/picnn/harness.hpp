#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "picnn/geometry.hpp"
#include "picnn/network.hpp"
#include "picnn/training.hpp"

namespace picnn::harness {

struct ExperimentConfig {
    geometry::Manifold manifold = geometry::Manifold::hemisphere();
    std::vector<int> n_list{512};
    int m = 256;  // boundary samples per component
    int n_test = 5120;
    int trials = 3;
    std::uint64_t base_seed = 7;
    net::NetworkSpec net;
    train::TrainConfig train;
    std::string output_dir = "picnn-out";
    int threads = 0;             // 0 = hardware concurrency
    int trace_test_size = 256;   // test points used for per-epoch metrics
    bool write_pointwise = false;
    bool write_checkpoints = false;

    void validate() const;
};

/// Flat `key = value` text; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Canonical key/value echo; feeding it back through apply_setting
/// reproduces the configuration.
std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg);

std::uint64_t cell_seed(std::uint64_t base_seed, int n, int trial);

struct PointwiseRow {
    double x, y, z, u, u_exact;
};

struct TrialRecord {
    std::string manifold;
    std::string bnd_mode;
    int n = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double rel_l2 = 0.0;
    double rel_h2 = 0.0;
    double wall_s = 0.0;
    double best_loss = 0.0;
    int best_epoch = -1;
    std::vector<train::EpochRecord> trace;

    // Optional artifacts, not part of report.json.
    std::vector<double> best_params;
    std::vector<PointwiseRow> pointwise;

    std::string cell_id() const;
};

struct Aggregate {
    int n = 0;
    int trials = 0;
    double mean_l2 = 0.0;
    double std_l2 = 0.0;
    double mean_h2 = 0.0;
    double std_h2 = 0.0;
};

struct SlopeFit {
    double a = 0.0;      // intercept of log2 mean
    double alpha = 0.0;  // negated slope
};

struct RunReport {
    std::map<std::string, std::string> config;
    std::vector<TrialRecord> trials;
    std::vector<Aggregate> per_n;
    SlopeFit slope_l2;
    SlopeFit slope_h2;
    bool has_slope = false;
};

/// log2(mean) ~ a - alpha log2(N) by ordinary least squares.
SlopeFit slope_fit(std::span<const double> means, std::span<const int> ns);

/// Samples data, trains and evaluates one (N, trial) cell.
TrialRecord run_cell(const ExperimentConfig& cfg, int n, int trial);

using Progress = std::function<void(const TrialRecord&)>;

/// All cells on a worker pool, then aggregation.
RunReport run_experiment(const ExperimentConfig& cfg, const Progress& progress = {});

/// Per-N means/stds (sorted by N) and slopes when at least two N are present.
void aggregate(RunReport& report);

std::string cells_csv(const std::vector<TrialRecord>& trials);
std::string epochs_csv(const std::vector<TrialRecord>& trials);
std::string report_json(const RunReport& report);
RunReport parse_report_json(const std::string& text);

/// Writes cells.csv, epochs.csv, report.json and the optional artifacts.
void emit_reports(const RunReport& report, const std::filesystem::path& dir);

/// Reads trial rows back from cells.csv (traces are left empty).
std::vector<TrialRecord> read_cells_csv(const std::filesystem::path& path);

}  // namespace picnn::harness
