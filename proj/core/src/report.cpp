#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "picnn/harness.hpp"

namespace picnn::harness {

namespace {

using nlohmann::json;

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_json(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string cells_csv(const std::vector<TrialRecord>& trials) {
    std::string s = "manifold,bnd_mode,N,trial,seed,rel_l2,rel_h2,wall_s\n";
    for (const auto& t : trials) {
        s += t.manifold + "," + t.bnd_mode + "," + std::to_string(t.n) + "," + std::to_string(t.trial) + "," +
             std::to_string(t.seed) + "," + num(t.rel_l2) + "," + num(t.rel_h2) + "," + num(t.wall_s) + "\n";
    }
    return s;
}

std::string epochs_csv(const std::vector<TrialRecord>& trials) {
    std::string s = "cell_id,epoch,lr,total_loss,rel_l2,rel_h2\n";
    for (const auto& t : trials) {
        const std::string id = t.cell_id();
        for (const auto& e : t.trace) {
            s += id + "," + std::to_string(e.epoch) + "," + num(e.lr) + "," + num(e.total_loss) + "," + num(e.rel_l2) +
                 "," + num(e.rel_h2) + "\n";
        }
    }
    return s;
}

std::string report_json(const RunReport& report) {
    json j;
    j["config"] = report.config;
    j["trials"] = json::array();
    for (const auto& t : report.trials) {
        json trace = json::array();
        for (const auto& e : t.trace) {
            trace.push_back({{"epoch", e.epoch},
                             {"lr", jnum(e.lr)},
                             {"total_loss", jnum(e.total_loss)},
                             {"rel_l2", jnum(e.rel_l2)},
                             {"rel_h2", jnum(e.rel_h2)}});
        }
        j["trials"].push_back({{"manifold", t.manifold},
                               {"bnd_mode", t.bnd_mode},
                               {"N", t.n},
                               {"trial", t.trial},
                               {"seed", t.seed},
                               {"rel_l2", jnum(t.rel_l2)},
                               {"rel_h2", jnum(t.rel_h2)},
                               {"best_loss", jnum(t.best_loss)},
                               {"best_epoch", t.best_epoch},
                               {"trace", std::move(trace)}});
    }
    j["per_N"] = json::array();
    for (const auto& a : report.per_n) {
        j["per_N"].push_back({{"N", a.n},
                              {"trials", a.trials},
                              {"mean_rel_l2", jnum(a.mean_l2)},
                              {"std_rel_l2", jnum(a.std_l2)},
                              {"mean_rel_h2", jnum(a.mean_h2)},
                              {"std_rel_h2", jnum(a.std_h2)}});
    }
    if (report.has_slope) {
        j["slope"] = {{"rel_l2", {{"a", report.slope_l2.a}, {"alpha", report.slope_l2.alpha}}},
                      {"rel_h2", {{"a", report.slope_h2.a}, {"alpha", report.slope_h2.alpha}}}};
    } else {
        j["slope"] = nullptr;
    }
    return j.dump(2) + "\n";
}

RunReport parse_report_json(const std::string& text) {
    const json j = json::parse(text);
    RunReport r;
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& t : j.at("trials")) {
        TrialRecord rec;
        rec.manifold = t.at("manifold").get<std::string>();
        rec.bnd_mode = t.at("bnd_mode").get<std::string>();
        rec.n = t.at("N").get<int>();
        rec.trial = t.at("trial").get<int>();
        rec.seed = t.at("seed").get<std::uint64_t>();
        rec.rel_l2 = from_json(t.at("rel_l2"));
        rec.rel_h2 = from_json(t.at("rel_h2"));
        rec.best_loss = from_json(t.at("best_loss"));
        rec.best_epoch = t.at("best_epoch").get<int>();
        for (const auto& e : t.at("trace")) {
            rec.trace.push_back({e.at("epoch").get<int>(), from_json(e.at("lr")), from_json(e.at("total_loss")),
                                 from_json(e.at("rel_l2")), from_json(e.at("rel_h2"))});
        }
        r.trials.push_back(std::move(rec));
    }
    for (const auto& a : j.at("per_N")) {
        r.per_n.push_back({a.at("N").get<int>(), a.at("trials").get<int>(), from_json(a.at("mean_rel_l2")),
                           from_json(a.at("std_rel_l2")), from_json(a.at("mean_rel_h2")), from_json(a.at("std_rel_h2"))});
    }
    if (!j.at("slope").is_null()) {
        r.has_slope = true;
        r.slope_l2 = {j["slope"]["rel_l2"]["a"].get<double>(), j["slope"]["rel_l2"]["alpha"].get<double>()};
        r.slope_h2 = {j["slope"]["rel_h2"]["a"].get<double>(), j["slope"]["rel_h2"]["alpha"].get<double>()};
    }
    return r;
}

void emit_reports(const RunReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "cells.csv", cells_csv(report.trials));
    write_file(dir / "epochs.csv", epochs_csv(report.trials));
    write_file(dir / "report.json", report_json(report));

    bool pointwise = false, checkpoints = false;
    for (const auto& t : report.trials) {
        pointwise = pointwise || !t.pointwise.empty();
        checkpoints = checkpoints || !t.best_params.empty();
    }
    if (pointwise) {
        std::string s = "cell_id,x,y,z,u,u_exact,abs_err\n";
        for (const auto& t : report.trials) {
            const std::string id = t.cell_id();
            for (const auto& p : t.pointwise) {
                s += id + "," + num(p.x) + "," + num(p.y) + "," + num(p.z) + "," + num(p.u) + "," + num(p.u_exact) + "," +
                     num(std::abs(p.u - p.u_exact)) + "\n";
            }
        }
        write_file(dir / "pointwise.csv", s);
    }
    if (checkpoints) {
        ExperimentConfig cfg;
        for (const auto& [k, v] : report.config) apply_setting(cfg, k, v);
        const net::Layout layout(cfg.net);
        std::filesystem::create_directories(dir / "checkpoints", ec);
        if (ec) throw std::runtime_error("cannot create checkpoint directory: " + ec.message());
        for (const auto& t : report.trials) {
            if (!t.best_params.empty())
                net::save_checkpoint(dir / "checkpoints" / (t.cell_id() + ".bin"), net::NetworkParams{t.best_params, layout});
        }
    }
}

std::vector<TrialRecord> read_cells_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "manifold,bnd_mode,N,trial,seed,rel_l2,rel_h2,wall_s")
        throw std::runtime_error(path.string() + ": unexpected cells.csv header");
    std::vector<TrialRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 8) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 8 fields");
        TrialRecord t;
        t.manifold = f[0];
        t.bnd_mode = f[1];
        t.n = std::stoi(f[2]);
        t.trial = std::stoi(f[3]);
        t.seed = std::stoull(f[4]);
        t.rel_l2 = std::stod(f[5]);
        t.rel_h2 = std::stod(f[6]);
        t.wall_s = f[7].empty() ? 0.0 : std::stod(f[7]);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace picnn::harness
