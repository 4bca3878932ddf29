#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mvsim/analysis.hpp"
#include "mvsim/engine.hpp"
#include "mvsim/kernels.hpp"

using namespace mvsim;

static void BM_ResolveCascade(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-0.01, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = u(gen);
    for (auto _ : state) benchmark::DoNotOptimize(resolve_cascade(x, 0.9, n));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ResolveCascade)->RangeMultiplier(16)->Range(64, 1 << 20);

static SimConfig bench_config(std::size_t n) {
    SimConfig c;
    c.n_particles = n;
    c.grid = TimeGrid(1e-5, 200);
    c.coefficients.alpha = TimeFunction::constant(0.9);
    c.initial = InitialLaw::uniform(0.25, 0.35);
    return c;
}

static void BM_Instantaneous(benchmark::State& state) {
    const auto c = bench_config(static_cast<std::size_t>(state.range(0)));
    const auto fz = FrozenNoise::draw(c);
    for (auto _ : state) benchmark::DoNotOptimize(run_instantaneous(c, fz).loss.back());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.n_particles * c.grid.n_steps()));
}
BENCHMARK(BM_Instantaneous)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_DelayedConv(benchmark::State& state) {
    const auto c = bench_config(static_cast<std::size_t>(state.range(0)));
    const auto fz = FrozenNoise::draw(c);
    for (auto _ : state) benchmark::DoNotOptimize(run_delayed_conv(c, fz, 1e-4).loss.back());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.n_particles * c.grid.n_steps()));
}
BENCHMARK(BM_DelayedConv)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static LossPath ramp(const TimeGrid& g, double jump_at) {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.3 * g.time(k) / g.t_max() + (g.time(k) >= jump_at ? 0.4 : 0.0);
    return make_loss_path(g, v);
}

static void BM_Convolve(benchmark::State& state) {
    const TimeGrid g(1e-6, static_cast<std::size_t>(state.range(0)));
    const auto dk = discretize(Kernel::beta22(), 1e-4, g);
    const auto l = ramp(g, 0.5 * g.t_max());
    for (auto _ : state) benchmark::DoNotOptimize(convolve_loss(dk, l));
}
BENCHMARK(BM_Convolve)->Arg(10000)->Arg(100000);

static void BM_Levy(benchmark::State& state) {
    const TimeGrid g(1e-6, static_cast<std::size_t>(state.range(0)));
    const auto a = ramp(g, 0.5 * g.t_max());
    const auto b = ramp(g, 0.55 * g.t_max());
    for (auto _ : state) benchmark::DoNotOptimize(levy_metric(a, b));
}
BENCHMARK(BM_Levy)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
