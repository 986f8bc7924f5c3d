#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "construct_checks.hpp"
#include "picnn/harness.hpp"
#include "picnn/stats.hpp"

using namespace picnn;

namespace {

void print_progress(const harness::TrialRecord& r) {
    std::fprintf(stderr, "[%s] rel_l2=%.6g rel_h2=%.6g best_epoch=%d %.1fs\n", r.cell_id().c_str(), r.rel_l2, r.rel_h2,
                 r.best_epoch, r.wall_s);
}

void print_summary(const harness::RunReport& report) {
    std::printf("%8s %6s %14s %14s %14s %14s\n", "N", "trials", "mean_rel_l2", "std_rel_l2", "mean_rel_h2", "std_rel_h2");
    for (const auto& a : report.per_n) {
        std::printf("%8d %6d %14.6g %14.6g %14.6g %14.6g\n", a.n, a.trials, a.mean_l2, a.std_l2, a.mean_h2, a.std_h2);
    }
    if (report.has_slope) {
        std::printf("alpha(rel_l2) = %.4f  a = %.4f\n", report.slope_l2.alpha, report.slope_l2.a);
        std::printf("alpha(rel_h2) = %.4f  a = %.4f\n", report.slope_h2.alpha, report.slope_h2.a);
    }
}

int execute(const harness::ExperimentConfig& cfg) {
    const harness::RunReport report = harness::run_experiment(cfg, print_progress);
    harness::emit_reports(report, cfg.output_dir);
    print_summary(report);
    std::printf("wrote %s/{cells.csv,epochs.csv,report.json}\n", cfg.output_dir.c_str());
    return 0;
}

int rates(const std::string& path) {
    const auto trials = harness::read_cells_csv(path);
    std::map<std::pair<std::string, std::string>, std::vector<harness::TrialRecord>> groups;
    for (const auto& t : trials) groups[{t.manifold, t.bnd_mode}].push_back(t);
    if (groups.empty()) {
        std::printf("no trials in %s\n", path.c_str());
        return 0;
    }
    for (auto& [key, rows] : groups) {
        std::printf("%s / %s\n", key.first.c_str(), key.second.c_str());
        harness::RunReport report;
        report.trials = std::move(rows);
        harness::aggregate(report);
        print_summary(report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physics-informed CNN solver for elliptic problems on surfaces"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
    std::string config_path, out_override;
    std::vector<std::string> overrides;
    run->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_override, "Override output_dir");
    run->add_option("--set", overrides, "Extra key=value settings applied after the file");

    auto* sweep = app.add_subcommand("sweep", "Sample-size sweep from command-line settings");
    std::string manifold = "hemisphere", bnd = "sobolev", n_list = "128,256,512,1024,2048,4096", out_dir = "picnn-out";
    int m = 256, trials = 10, epochs = 200, channels = 0, threads = 0, batch = -1, n_test = 5120;
    std::uint64_t seed = 7;
    bool pointwise = false, checkpoints = false;
    sweep->add_option("--manifold", manifold, "hemisphere | half-torus");
    sweep->add_option("--bnd", bnd, "l2 | sobolev | plugin");
    sweep->add_option("--n", n_list, "Comma-separated interior sample sizes");
    sweep->add_option("--m", m, "Boundary samples per component (power of two)");
    sweep->add_option("--n-test", n_test, "Test samples");
    sweep->add_option("--trials", trials, "Trials per N");
    sweep->add_option("--epochs", epochs, "Training epochs");
    sweep->add_option("--seed", seed, "Base seed");
    sweep->add_option("--channels", channels, "Conv channel width (default 56)");
    sweep->add_option("--batch-size", batch, "Interior points per step (0 = full batch)");
    sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_flag("--pointwise", pointwise, "Write pointwise.csv");
    sweep->add_flag("--checkpoints", checkpoints, "Write best-parameter checkpoints");

    auto* rates_cmd = app.add_subcommand("rates", "Aggregate cells.csv and fit convergence rates");
    std::string cells_path;
    rates_cmd->add_option("--in", cells_path, "cells.csv")->required()->check(CLI::ExistingFile);

    auto* construct = app.add_subcommand("construct", "Verify the explicit network constructions");
    std::string which = "all";
    construct->add_option("--check", which, "all | requ | cutoff | matern | ridge | multichannel | interpolation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            harness::ExperimentConfig cfg = harness::load_config(config_path);
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
                harness::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (!out_override.empty()) cfg.output_dir = out_override;
            cfg.validate();
            return execute(cfg);
        }
        if (*sweep) {
            harness::ExperimentConfig cfg;
            harness::apply_setting(cfg, "manifold", manifold);
            harness::apply_setting(cfg, "bnd_mode", bnd);
            harness::apply_setting(cfg, "N_list", n_list);
            cfg.m = m;
            cfg.n_test = n_test;
            cfg.trials = trials;
            cfg.train.epochs = epochs;
            cfg.base_seed = seed;
            if (channels > 0) cfg.net.conv.channels = channels;
            if (batch >= 0) cfg.train.batch_size = batch;
            cfg.threads = threads;
            cfg.output_dir = out_dir;
            cfg.write_pointwise = pointwise;
            cfg.write_checkpoints = checkpoints;
            cfg.validate();
            return execute(cfg);
        }
        if (*rates_cmd) return rates(cells_path);
        if (*construct) {
            int failures = 0;
            for (const auto& r : run_construct_checks(which)) {
                std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
                failures += !r.pass;
            }
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "picnn: %s\n", e.what());
        return 1;
    }
    return 0;
}
