#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "picnn/harness.hpp"
#include "picnn/stats.hpp"

using namespace picnn;
using namespace picnn::harness;

namespace {

const std::vector<int> kTableN{128, 256, 512, 1024, 2048, 4096};
const std::vector<double> kTableMeans{0.013400, 0.015420, 0.007014, 0.003877, 0.003638, 0.003826};

ExperimentConfig smoke_config() {
    ExperimentConfig c;
    c.n_list = {8, 16};
    c.m = 8;
    c.n_test = 64;
    c.trials = 2;
    c.base_seed = 11;
    c.net.conv.channels = 4;
    c.net.mlp.widths = {4};
    c.train.epochs = 2;
    c.trace_test_size = 32;
    c.threads = 1;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::filesystem::path scratch_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("picnn_harness_" + name);
    std::filesystem::remove_all(d);
    return d;
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST_CASE("slope fit of exact power laws") {
    const std::vector<int> ns{16, 64, 256, 1024};
    std::vector<double> e;
    for (int n : ns) e.push_back(4.0 / n);
    auto f = slope_fit(e, ns);
    CHECK(f.alpha == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.a == doctest::Approx(2.0).epsilon(1e-14));

    const std::vector<double> c(4, 0.3);
    f = slope_fit(c, ns);
    CHECK(std::abs(f.alpha) < 1e-14);
    CHECK(f.a == doctest::Approx(std::log2(0.3)));

    CHECK_THROWS(slope_fit(std::vector<double>{0.1, 0.2}, std::vector<int>{8, 8}));
    CHECK_THROWS(slope_fit(std::vector<double>{0.1}, std::vector<int>{8}));
    CHECK_THROWS(slope_fit(std::vector<double>{0.1, 0.0}, std::vector<int>{8, 16}));
    CHECK_THROWS(slope_fit(std::vector<double>{0.1, 0.2}, std::vector<int>{8, 16, 32}));
}

TEST_CASE("slope fit on the published hemisphere means") {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < kTableN.size(); ++i) {
        lx.push_back(std::log2(kTableN[i]));
        ly.push_back(std::log2(kTableMeans[i]));
    }
    const auto [a, slope] = oracle::least_squares(lx, ly);
    const auto f = slope_fit(kTableMeans, kTableN);
    CHECK(std::abs(f.alpha - (-slope)) <= 1e-12);
    CHECK(std::abs(f.a - a) <= 1e-12);
    CHECK(f.alpha > 0.2);
    CHECK(f.alpha < 0.8);
}

TEST_CASE("slope fit is invariant under rescaling") {
    for (double c : {1e-3, 0.5, 7.0}) {
        std::vector<double> scaled;
        for (double v : kTableMeans) scaled.push_back(c * v);
        const auto base = slope_fit(kTableMeans, kTableN);
        const auto f = slope_fit(scaled, kTableN);
        CHECK(f.alpha == doctest::Approx(base.alpha).epsilon(1e-12));
        CHECK(f.a == doctest::Approx(base.a + std::log2(c)).epsilon(1e-12));
    }
}

TEST_CASE("stats helpers") {
    const std::vector<double> v{1.0, 2.0, 4.0};
    CHECK(stats::mean(v) == doctest::Approx(7.0 / 3));
    CHECK(stats::stddev(v) == doctest::Approx(std::sqrt(((1 - 7.0 / 3) * (1 - 7.0 / 3) + (2 - 7.0 / 3) * (2 - 7.0 / 3) +
                                                         (4 - 7.0 / 3) * (4 - 7.0 / 3)) / 2)));
    CHECK(stats::stddev(std::vector<double>{3.0}) == 0.0);
}

TEST_CASE("config parsing") {
    std::istringstream in(R"(# desk-scale sweep
manifold = half_torus
torus_major_R = 2.5
bnd_mode = l2
N_list = 128, 256
M = 64
N_test = 100
trials = 4
base_seed = 9
conv_channels = 8
mlp_widths = 12,4
epochs = 20
lr_eta = 0.002
K = 10
include_plain_l2_term = true
batch_size = 0
)");
    const auto c = parse_config(in);
    CHECK(c.manifold.kind == geometry::ManifoldKind::HalfTorus);
    CHECK(c.manifold.major_radius == 2.5);
    CHECK(c.train.bnd_mode == train::BoundaryMode::L2);
    CHECK(c.n_list == std::vector<int>{128, 256});
    CHECK(c.m == 64);
    CHECK(c.n_test == 100);
    CHECK(c.trials == 4);
    CHECK(c.base_seed == 9);
    CHECK(c.net.conv.channels == 8);
    CHECK(c.net.mlp.widths == std::vector<int>{12, 4});
    CHECK(c.train.epochs == 20);
    CHECK(c.train.lr == 0.002);
    CHECK(c.train.truncation == 10);
    CHECK(c.train.include_plain_l2_term);
    CHECK(c.train.batch_size == 0);

    std::istringstream bad("nonsense = 3\n");
    CHECK_THROWS(parse_config(bad));
    std::istringstream bad_value("M = many\n");
    CHECK_THROWS(parse_config(bad_value));
    std::istringstream no_eq("M 64\n");
    CHECK_THROWS(parse_config(no_eq));
    std::istringstream bad_m("M = 48\n");
    CHECK_THROWS(parse_config(bad_m).validate());
}

TEST_CASE("config echo round trip") {
    ExperimentConfig c = smoke_config();
    c.manifold = geometry::Manifold::half_torus(2.25, 0.75);
    c.train.lr = 0.1 + 0.2;  // not exactly representable in short decimal
    c.train.bnd_mode = train::BoundaryMode::PluginEigen;
    const auto echo = config_echo(c);
    ExperimentConfig back;
    for (const auto& [k, v] : echo) apply_setting(back, k, v);
    CHECK(config_echo(back) == echo);
    CHECK(back.train.lr == c.train.lr);
    CHECK(back.manifold.minor_radius == 0.75);
    CHECK(back.n_list == c.n_list);
}

TEST_CASE("cell seeds") {
    CHECK(cell_seed(7, 512, 0) == cell_seed(7, 512, 0));
    CHECK(cell_seed(7, 512, 0) != cell_seed(7, 512, 1));
    CHECK(cell_seed(7, 512, 0) != cell_seed(7, 256, 0));
    CHECK(cell_seed(8, 512, 0) - cell_seed(7, 512, 0) == 1);
}

TEST_CASE("smoke cell runs quickly and deterministically") {
    ExperimentConfig c = smoke_config();
    c.n_list = {8};
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = run_cell(c, 8, 0);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(dt < 5.0);
    CHECK(std::isfinite(a.rel_l2));
    CHECK(a.rel_l2 >= 0.0);
    CHECK(std::isfinite(a.rel_h2));
    CHECK(a.trace.size() == 2);
    CHECK(a.seed == cell_seed(c.base_seed, 8, 0));
    CHECK(a.cell_id() == "hemisphere_sobolev_N8_t0");
    const auto b = run_cell(c, 8, 0);
    CHECK(a.rel_l2 == b.rel_l2);
    CHECK(a.rel_h2 == b.rel_h2);
    CHECK(a.best_params == b.best_params);
    CHECK(run_cell(c, 8, 1).rel_l2 != a.rel_l2);
}

TEST_CASE("aggregates match a recomputation") {
    const auto report = run_experiment(smoke_config());
    REQUIRE(report.trials.size() == 4);
    REQUIRE(report.per_n.size() == 2);
    CHECK(report.has_slope);
    for (const auto& agg : report.per_n) {
        std::vector<double> l2, h2;
        for (const auto& t : report.trials) {
            if (t.n != agg.n) continue;
            l2.push_back(t.rel_l2);
            h2.push_back(t.rel_h2);
        }
        const double m = (l2[0] + l2[1]) / 2;
        CHECK(std::abs(agg.mean_l2 - m) <= 1e-12);
        CHECK(std::abs(agg.std_l2 - std::abs(l2[0] - l2[1]) / std::sqrt(2.0)) <= 1e-12);
        CHECK(std::abs(agg.mean_h2 - (h2[0] + h2[1]) / 2) <= 1e-12);
        CHECK(std::abs(agg.std_h2 - std::abs(h2[0] - h2[1]) / std::sqrt(2.0)) <= 1e-12);
        CHECK(agg.trials == 2);
    }
    const std::vector<double> means{report.per_n[0].mean_l2, report.per_n[1].mean_l2};
    const auto f = slope_fit(means, std::vector<int>{8, 16});
    CHECK(report.slope_l2.alpha == f.alpha);
}

TEST_CASE("report bytes are deterministic and independent of the thread count") {
    auto c = smoke_config();
    const std::string a = report_json(run_experiment(c));
    const std::string b = report_json(run_experiment(c));
    c.threads = 3;
    auto threaded = run_experiment(c);
    CHECK(threaded.config.at("threads") == "3");
    threaded.config["threads"] = "1";  // the only echo entry that differs
    CHECK(a == b);
    CHECK(a == report_json(threaded));
    CHECK(a.find("wall_s") == std::string::npos);
}

TEST_CASE("emitted files") {
    auto c = smoke_config();
    c.write_pointwise = true;
    c.write_checkpoints = true;
    auto report = run_experiment(c);
    const auto dir = scratch_dir("emit");
    emit_reports(report, dir);

    const std::string cells = slurp(dir / "cells.csv");
    CHECK(cells.rfind("manifold,bnd_mode,N,trial,seed,rel_l2,rel_h2,wall_s\n", 0) == 0);
    CHECK(count_lines(cells) == 1 + 4);
    const std::string epochs = slurp(dir / "epochs.csv");
    CHECK(epochs.rfind("cell_id,epoch,lr,total_loss,rel_l2,rel_h2\n", 0) == 0);
    CHECK(count_lines(epochs) == 1 + 4 * 2);
    const std::string pointwise = slurp(dir / "pointwise.csv");
    CHECK(pointwise.rfind("cell_id,x,y,z,u,u_exact,abs_err\n", 0) == 0);
    CHECK(count_lines(pointwise) == 1 + 4 * 64);
    for (const auto& t : report.trials) {
        const auto ck = dir / "checkpoints" / (t.cell_id() + ".bin");
        REQUIRE(std::filesystem::exists(ck));
        CHECK(net::load_checkpoint(ck, c.net).flat == t.best_params);
    }

    const auto rows = read_cells_csv(dir / "cells.csv");
    REQUIRE(rows.size() == report.trials.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].rel_l2 == report.trials[i].rel_l2);
        CHECK(rows[i].seed == report.trials[i].seed);
        CHECK(rows[i].cell_id() == report.trials[i].cell_id());
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("report json round trip") {
    auto report = run_experiment(smoke_config());
    const auto back = parse_report_json(report_json(report));
    CHECK(back.config == report.config);
    REQUIRE(back.trials.size() == report.trials.size());
    for (std::size_t i = 0; i < back.trials.size(); ++i) {
        const auto& x = back.trials[i];
        const auto& y = report.trials[i];
        CHECK(x.manifold == y.manifold);
        CHECK(x.bnd_mode == y.bnd_mode);
        CHECK(x.n == y.n);
        CHECK(x.trial == y.trial);
        CHECK(x.seed == y.seed);
        CHECK(x.rel_l2 == y.rel_l2);
        CHECK(x.rel_h2 == y.rel_h2);
        CHECK(x.best_loss == y.best_loss);
        CHECK(x.best_epoch == y.best_epoch);
        REQUIRE(x.trace.size() == y.trace.size());
        for (std::size_t e = 0; e < x.trace.size(); ++e) {
            CHECK(x.trace[e].epoch == y.trace[e].epoch);
            CHECK(same_double(x.trace[e].lr, y.trace[e].lr));
            CHECK(same_double(x.trace[e].total_loss, y.trace[e].total_loss));
            CHECK(same_double(x.trace[e].rel_l2, y.trace[e].rel_l2));
            CHECK(same_double(x.trace[e].rel_h2, y.trace[e].rel_h2));
        }
    }
    REQUIRE(back.per_n.size() == report.per_n.size());
    for (std::size_t i = 0; i < back.per_n.size(); ++i) {
        CHECK(back.per_n[i].mean_l2 == report.per_n[i].mean_l2);
        CHECK(back.per_n[i].std_h2 == report.per_n[i].std_h2);
    }
    CHECK(back.has_slope == report.has_slope);
    CHECK(back.slope_l2.alpha == report.slope_l2.alpha);
    CHECK(back.slope_h2.a == report.slope_h2.a);
    CHECK(report_json(back) == report_json(report));

    // NaN metrics survive as null.
    report.trials[0].trace[0].rel_l2 = std::numeric_limits<double>::quiet_NaN();
    const std::string text = report_json(report);
    CHECK(text.find("null") != std::string::npos);
    CHECK(std::isnan(parse_report_json(text).trials[0].trace[0].rel_l2));
}

TEST_CASE("empty report writes headers only") {
    RunReport empty;
    aggregate(empty);
    CHECK(empty.per_n.empty());
    CHECK_FALSE(empty.has_slope);
    const auto dir = scratch_dir("empty");
    emit_reports(empty, dir);
    CHECK(slurp(dir / "cells.csv") == "manifold,bnd_mode,N,trial,seed,rel_l2,rel_h2,wall_s\n");
    CHECK(slurp(dir / "epochs.csv") == "cell_id,epoch,lr,total_loss,rel_l2,rel_h2\n");
    CHECK(parse_report_json(slurp(dir / "report.json")).trials.empty());
    CHECK(read_cells_csv(dir / "cells.csv").empty());
    std::filesystem::remove_all(dir);
}
