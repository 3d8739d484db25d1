#include <benchmark/benchmark.h>

#include <random>

#include "npclass/npclass.hpp"

using namespace npc;

namespace {

const Distribution kP0({0.3, 0.3, 0.4});
const Distribution kP1({0.35, 0.35, 0.3});

void BM_KlDivergence(benchmark::State& state) {
    std::vector<double> p(static_cast<std::size_t>(state.range(0)), 1.0 / double(state.range(0)));
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = (i + 1.0);
    double s = 0.0;
    for (double x : q) s += x;
    for (double& x : q) x /= s;
    for (auto _ : state) benchmark::DoNotOptimize(kl_divergence(p, q));
}
BENCHMARK(BM_KlDivergence)->Arg(3)->Arg(64)->Arg(1024);

void BM_TiltRadius(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_tilt_radius(kP0, kP1, 0.005).value);
}
BENCHMARK(BM_TiltRadius);

void BM_ThresholdGamma(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(threshold_gamma(kP0, kP1, 0.005, 1.0));
}
BENCHMARK(BM_ThresholdGamma);

void BM_InterpBind(benchmark::State& state) {
    const auto rule = make_rule("interp", {{"e0", 0.005}}, kP0, kP1);
    const EmpiricalType training({690, 710, 600});
    for (auto _ : state) benchmark::DoNotOptimize(rule->bind(training, 1000));
}
BENCHMARK(BM_InterpBind);

void BM_SampleType(benchmark::State& state) {
    RandomStream rs(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_type(kP0, state.range(0), rs));
}
BENCHMARK(BM_SampleType)->Arg(100)->Arg(10000);

void BM_Jacobi(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 g(3);
    std::normal_distribution<double> z;
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = z(g);
    const SymmetricMatrix m(n, a);
    for (auto _ : state) benchmark::DoNotOptimize(min_eigen_symmetric(m));
}
BENCHMARK(BM_Jacobi)->Arg(3)->Arg(6)->Arg(16);

void BM_AlphaLower(benchmark::State& state) {
    const auto P0 = Distribution::bernoulli(0.3), P1 = Distribution::bernoulli(0.4);
    for (auto _ : state) benchmark::DoNotOptimize(alpha_lower(P0, P1, 0.005, 1.0));
}
BENCHMARK(BM_AlphaLower);

}  // namespace

BENCHMARK_MAIN();
