#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "picnn/harness.hpp"

namespace picnn::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
    return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int<int>(key, trim(item)));
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    manifold.validate();
    net.validate();
    train.validate();
    if (n_list.empty()) throw std::invalid_argument("N_list must not be empty");
    for (int n : n_list) {
        if (n < 1) throw std::invalid_argument("every N must be >= 1");
    }
    if (m < 4 || (m & (m - 1)) != 0) throw std::invalid_argument("M must be a power of two >= 4");
    if (n_test < 1) throw std::invalid_argument("N_test must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (threads < 0) throw std::invalid_argument("threads must be >= 0");
    if (trace_test_size < 0) throw std::invalid_argument("trace_test_size must be >= 0");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "manifold") cfg.manifold.kind = geometry::parse_manifold(v);
    else if (key == "torus_major_R") cfg.manifold.major_radius = to_double(key, v);
    else if (key == "torus_minor_r") cfg.manifold.minor_radius = to_double(key, v);
    else if (key == "pole_exclusion_eps") cfg.manifold.pole_exclusion = to_double(key, v);
    else if (key == "bnd_mode") cfg.train.bnd_mode = train::parse_boundary_mode(v);
    else if (key == "N_list") cfg.n_list = to_int_list(key, v);
    else if (key == "M") cfg.m = to_int<int>(key, v);
    else if (key == "N_test") cfg.n_test = to_int<int>(key, v);
    else if (key == "trials") cfg.trials = to_int<int>(key, v);
    else if (key == "base_seed") cfg.base_seed = to_int<std::uint64_t>(key, v);
    else if (key == "conv_layers") cfg.net.conv.layers = to_int<int>(key, v);
    else if (key == "conv_channels") cfg.net.conv.channels = to_int<int>(key, v);
    else if (key == "conv_kernel_size") cfg.net.conv.kernel_size = to_int<int>(key, v);
    else if (key == "conv_activation") cfg.net.conv.activation = net::parse_conv_activation(v);
    else if (key == "mlp_widths") cfg.net.mlp.widths = to_int_list(key, v);
    else if (key == "mlp_activation") cfg.net.mlp.activation = net::parse_mlp_activation(v);
    else if (key == "epochs") cfg.train.epochs = to_int<int>(key, v);
    else if (key == "lr_eta") cfg.train.lr = to_double(key, v);
    else if (key == "steplr_gamma") cfg.train.steplr_gamma = to_double(key, v);
    else if (key == "steplr_period") cfg.train.steplr_period = to_int<int>(key, v);
    else if (key == "lambda_bnd") cfg.train.lambda_bnd = to_double(key, v);
    else if (key == "s_order") cfg.train.s_order = to_double(key, v);
    else if (key == "K") cfg.train.truncation = to_int<int>(key, v);
    else if (key == "include_plain_l2_term") cfg.train.include_plain_l2_term = to_bool(key, v);
    else if (key == "adam_beta1") cfg.train.adam_beta1 = to_double(key, v);
    else if (key == "adam_beta2") cfg.train.adam_beta2 = to_double(key, v);
    else if (key == "adam_eps") cfg.train.adam_eps = to_double(key, v);
    else if (key == "batch_size") cfg.train.batch_size = to_int<int>(key, v);
    else if (key == "trace_every") cfg.train.trace_every = to_int<int>(key, v);
    else if (key == "trace_test_size") cfg.trace_test_size = to_int<int>(key, v);
    else if (key == "threads") cfg.threads = to_int<int>(key, v);
    else if (key == "output_dir") cfg.output_dir = v;
    else if (key == "write_pointwise") cfg.write_pointwise = to_bool(key, v);
    else if (key == "write_checkpoints") cfg.write_checkpoints = to_bool(key, v);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        try {
            apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return parse_config(in);
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg) {
    const auto& t = cfg.train;
    return {
        {"manifold", geometry::to_string(cfg.manifold.kind)},
        {"torus_major_R", fmt(cfg.manifold.major_radius)},
        {"torus_minor_r", fmt(cfg.manifold.minor_radius)},
        {"pole_exclusion_eps", fmt(cfg.manifold.pole_exclusion)},
        {"bnd_mode", train::to_string(t.bnd_mode)},
        {"N_list", join(cfg.n_list)},
        {"M", std::to_string(cfg.m)},
        {"N_test", std::to_string(cfg.n_test)},
        {"trials", std::to_string(cfg.trials)},
        {"base_seed", std::to_string(cfg.base_seed)},
        {"conv_layers", std::to_string(cfg.net.conv.layers)},
        {"conv_channels", std::to_string(cfg.net.conv.channels)},
        {"conv_kernel_size", std::to_string(cfg.net.conv.kernel_size)},
        {"conv_activation", net::to_string(cfg.net.conv.activation)},
        {"mlp_widths", join(cfg.net.mlp.widths)},
        {"mlp_activation", net::to_string(cfg.net.mlp.activation)},
        {"epochs", std::to_string(t.epochs)},
        {"lr_eta", fmt(t.lr)},
        {"steplr_gamma", fmt(t.steplr_gamma)},
        {"steplr_period", std::to_string(t.steplr_period)},
        {"lambda_bnd", fmt(t.lambda_bnd)},
        {"s_order", fmt(t.s_order)},
        {"K", std::to_string(t.truncation)},
        {"include_plain_l2_term", t.include_plain_l2_term ? "true" : "false"},
        {"adam_beta1", fmt(t.adam_beta1)},
        {"adam_beta2", fmt(t.adam_beta2)},
        {"adam_eps", fmt(t.adam_eps)},
        {"batch_size", std::to_string(t.batch_size)},
        {"trace_every", std::to_string(t.trace_every)},
        {"trace_test_size", std::to_string(cfg.trace_test_size)},
        {"threads", std::to_string(cfg.threads)},
        {"output_dir", cfg.output_dir},
        {"write_pointwise", cfg.write_pointwise ? "true" : "false"},
        {"write_checkpoints", cfg.write_checkpoints ? "true" : "false"},
    };
}

}  // namespace picnn::harness
