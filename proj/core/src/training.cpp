#include "picnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "picnn/error.hpp"
#include "picnn/rng.hpp"

namespace picnn::train {

std::string to_string(BoundaryMode mode) {
    switch (mode) {
        case BoundaryMode::L2: return "l2";
        case BoundaryMode::SobolevFFT: return "sobolev";
        case BoundaryMode::PluginEigen: return "plugin";
    }
    return "?";
}

BoundaryMode parse_boundary_mode(const std::string& text) {
    if (text == "l2" || text == "L2") return BoundaryMode::L2;
    if (text == "sobolev" || text == "sobolev_fft" || text == "SobolevFFT") return BoundaryMode::SobolevFFT;
    if (text == "plugin" || text == "plugin_eigen" || text == "PluginEigen") return BoundaryMode::PluginEigen;
    throw std::invalid_argument("unknown boundary mode: " + text);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(steplr_gamma > 0.0 && steplr_gamma <= 1.0)) throw std::invalid_argument("steplr gamma must lie in (0, 1]");
    if (steplr_period < 1) throw std::invalid_argument("steplr period must be >= 1");
    if (!(lambda_bnd >= 0.0)) throw std::invalid_argument("lambda_bnd must be non-negative");
    if (batch_size < 0) throw std::invalid_argument("batch size must be non-negative");
    if (trace_every < 0) throw std::invalid_argument("trace_every must be non-negative");
}

TrainState::TrainState(std::vector<double> init)
    : params(std::move(init)), m(params.size(), 0.0), v(params.size(), 0.0) {}

void adam_step(TrainState& state, std::span<const double> grad, double lr, const TrainConfig& config) {
    if (grad.size() != state.params.size()) throw ShapeError("gradient length does not match parameters");
    ++state.step;
    const double b1 = config.adam_beta1, b2 = config.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        state.params[i] -= lr * mhat / (std::sqrt(vhat) + config.adam_eps);
    }
}

double steplr(double eta, double gamma, int period, int epoch) {
    return eta * std::pow(gamma, static_cast<double>(epoch / period));
}

TrainResult optimize(Objective& objective, std::vector<double> init, const TrainConfig& config,
                     const Monitor& monitor) {
    config.validate();
    if (init.size() != objective.dimension()) throw ShapeError("initial parameters do not match the objective");

    TrainState state(std::move(init));
    TrainResult result;
    Rng rng(mix64(config.seed ^ 0x6a09e667f3bcc909ULL));

    const std::size_t pop = objective.population();
    const std::size_t batch =
        (config.batch_size == 0 || static_cast<std::size_t>(config.batch_size) >= pop) ? pop
                                                                                       : static_cast<std::size_t>(config.batch_size);
    std::vector<std::size_t> order(pop);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(state.params.size());

    auto check = [&](double value, const char* what) {
        if (!std::isfinite(value)) {
            std::ostringstream msg;
            msg << "non-finite " << what << " at epoch " << state.epoch << " (step " << state.step << ")";
            throw TrainingDiverged(msg.str());
        }
    };

    for (state.epoch = 0; state.epoch < config.epochs; ++state.epoch) {
        const double lr = steplr(config.lr, config.steplr_gamma, config.steplr_period, state.epoch);
        if (batch >= pop) {
            check(objective.evaluate(state.params, {}, grad), "loss");
            adam_step(state, grad, lr, config);
        } else {
            // Fisher-Yates with our own index draw keeps shuffles identical across standard libraries.
            for (std::size_t i = pop - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
            for (std::size_t start = 0; start < pop; start += batch) {
                const std::size_t len = std::min(batch, pop - start);
                check(objective.evaluate(state.params, std::span(order).subspan(start, len), grad), "loss");
                adam_step(state, grad, lr, config);
            }
        }

        const double total = objective.evaluate(state.params, {}, {});
        check(total, "training loss");
        if (total < state.best_loss) {
            state.best_loss = total;
            state.best_params = state.params;
            result.best_epoch = state.epoch;
        }

        EpochRecord rec;
        rec.epoch = state.epoch;
        rec.lr = lr;
        rec.total_loss = total;
        const bool last = state.epoch + 1 == config.epochs;
        if (monitor && config.trace_every > 0 && ((state.epoch + 1) % config.trace_every == 0 || last)) {
            std::tie(rec.rel_l2, rec.rel_h2) = monitor(state.params);
        }
        result.trace.push_back(rec);
    }

    result.best_params = std::move(state.best_params);
    result.best_loss = state.best_loss;
    result.final_params = std::move(state.params);
    return result;
}

}  // namespace picnn::train
