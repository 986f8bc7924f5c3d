#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace picnn::train {

enum class BoundaryMode { L2, SobolevFFT, PluginEigen };

std::string to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(const std::string& text);

struct TrainConfig {
    int epochs = 200;
    double lr = 1e-3;
    double steplr_gamma = 0.5;
    int steplr_period = 50;
    double lambda_bnd = 10.0;
    BoundaryMode bnd_mode = BoundaryMode::SobolevFFT;
    double s_order = 1.0;
    int truncation = -1;  // < 0 selects the full resolvable spectrum
    bool include_plain_l2_term = false;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    int batch_size = 16;   // interior points per Adam step; 0 = full batch
    int trace_every = 1;   // epochs between metric evaluations; 0 = never

    void validate() const;
};

struct TrainState {
    std::vector<double> params;
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
    int epoch = 0;
    std::vector<double> best_params;
    double best_loss = std::numeric_limits<double>::infinity();

    explicit TrainState(std::vector<double> init);
};

/// One bias-corrected Adam update; increments state.step.
void adam_step(TrainState& state, std::span<const double> grad, double lr, const TrainConfig& config);

/// eta * gamma^floor(epoch / period).
double steplr(double eta, double gamma, int period, int epoch);

/// A differentiable training loss. The sample population is the set that
/// mini-batches are drawn from; terms outside it are included in every batch.
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t dimension() const = 0;
    virtual std::size_t population() const = 0;

    /// Loss on the given batch (empty = whole population). Writes the
    /// gradient into grad unless grad is empty.
    virtual double evaluate(std::span<const double> params, std::span<const std::size_t> batch,
                            std::span<double> grad) = 0;
};

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    double total_loss = 0.0;
    double rel_l2 = std::numeric_limits<double>::quiet_NaN();
    double rel_h2 = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
    std::vector<double> best_params;
    double best_loss = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
    std::vector<double> final_params;
    std::vector<EpochRecord> trace;
};

/// Returns (rel_l2, rel_h2) for a parameter vector.
using Monitor = std::function<std::pair<double, double>(std::span<const double>)>;

/// Adam with StepLR decay. After every epoch the full objective is evaluated
/// and the best parameters are kept. A non-finite loss throws TrainingDiverged.
TrainResult optimize(Objective& objective, std::vector<double> init, const TrainConfig& config,
                     const Monitor& monitor = {});

}  // namespace picnn::train
