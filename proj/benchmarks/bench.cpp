#include <array>
#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "picnn/batch_network.hpp"
#include "picnn/geometry.hpp"
#include "picnn/pde_objective.hpp"
#include "picnn/rng.hpp"
#include "picnn/spectral.hpp"

using namespace picnn;

static void BM_FftReal(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    std::vector<double> e(m);
    for (auto& v : e) v = uniform(rng, -1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(spectral::fft_real(e));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FftReal)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNLogN);

static void BM_SobolevPenaltyGrad(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    Rng rng(2);
    std::vector<double> e(m), grad(m);
    for (auto& v : e) v = uniform(rng, -1, 1);
    const spectral::SpectralWeightTable table(2 * 3.141592653589793, spectral::trace_order(1.0), m / 2);
    for (auto _ : state) benchmark::DoNotOptimize(spectral::spectral_penalty(e, table, grad));
}
BENCHMARK(BM_SobolevPenaltyGrad)->Arg(256)->Arg(1024);

// Scalar jet forward of the default 56-channel network at one point.
static void BM_JetForward(benchmark::State& state) {
    const net::NetworkSpec spec;
    Rng rng(3);
    const auto params = net::init(spec, rng);
    const std::array<ad::Jet, 3> x{ad::Jet::variable(0.3, 0), ad::Jet::variable(-0.2, 1), ad::Jet::constant(0.9)};
    for (auto _ : state) benchmark::DoNotOptimize(net::forward(params, spec, x));
}
BENCHMARK(BM_JetForward);

// One mini-batch objective evaluation (forward + reverse sweep) with the
// boundary penalty, as done once per Adam step.
static void BM_ObjectiveStep(benchmark::State& state) {
    const net::BatchNetwork network(net::NetworkSpec{});
    const auto manifold = geometry::Manifold::hemisphere();
    Rng rng(4);
    const train::ProblemData data{manifold, train::make_interior(manifold, geometry::sample_interior(manifold, 512, rng)),
                                  train::make_boundary(manifold, 256)};
    train::TrainConfig cfg;
    train::PicnnObjective obj(network, data, cfg);
    const auto params = net::init(network.spec(), rng);
    std::vector<std::size_t> batch(static_cast<std::size_t>(state.range(0)));
    std::iota(batch.begin(), batch.end(), 0);
    std::vector<double> grad(params.flat.size());
    for (auto _ : state) {
        std::fill(grad.begin(), grad.end(), 0.0);
        benchmark::DoNotOptimize(obj.evaluate(params.flat, batch, grad));
    }
}
BENCHMARK(BM_ObjectiveStep)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
