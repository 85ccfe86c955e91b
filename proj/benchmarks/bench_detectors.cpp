// Microbenchmarks: steady-state per-observation cost of each streaming
// detector, plus optimizer-pair construction. Observations are pre-sampled so
// the loop measures detector work only; alarms reset the detector in place,
// matching how the simulation lab drives long runs.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include <seqdet/detector.hpp>
#include <seqdet/family.hpp>
#include <seqdet/optimizer_pair.hpp>

namespace {

using namespace seqdet;

std::vector<double> presampled(const Family& f, double param, std::size_t n) {
    std::mt19937_64 rng(42);
    std::vector<double> xs(n);
    for (double& x : xs) x = f.sample(param, rng);
    return xs;
}

void run_steps(benchmark::State& state, const DetectorConfig& cfg, double sample_param) {
    const auto xs = presampled(cfg.family, sample_param, 1 << 16);
    const auto det = make_detector(cfg);
    std::size_t i = 0;
    for (auto _ : state) {
        const StepOutcome s = det->step(xs[i++ & (xs.size() - 1)]);
        if (s.alarm) det->reset();
        benchmark::DoNotOptimize(s.statistic);
    }
    state.SetItemsProcessed(state.iterations());
}

std::shared_ptr<const OptimizerPair> exp_pair() {
    const ParamSet theta = ParamSet::interval(0.8, 1.0, 256);
    const ParamSet lambda = ParamSet::interval(2.0, 3.0, 256);
    const TabulatedFn p = optimizer_from(TabulatedFn::constant(lambda, 1.0),
                                         Family::exponential_rate(), theta);
    return std::make_shared<const OptimizerPair>(
        pair_close(p, Family::exponential_rate(), lambda));
}

void BM_cusum_step(benchmark::State& state) {
    DetectorConfig c;
    c.procedure = Procedure::cusum;
    c.family = Family::normal_mean_unit_var();
    c.theta = ParamSet::singleton(-0.5);
    c.lambda = ParamSet::singleton(0.0);
    c.a = 2.92;
    run_steps(state, c, -0.5);
}
BENCHMARK(BM_cusum_step);

void BM_m_star_step(benchmark::State& state) {
    DetectorConfig c;
    c.procedure = Procedure::m_star;
    c.family = Family::normal_mean_unit_var();
    c.theta = ParamSet::interval(-1.0, -0.5);
    c.lambda = ParamSet::singleton(0.0);
    c.a = 18.5;
    run_steps(state, c, -0.7);
}
BENCHMARK(BM_m_star_step);

void BM_open_m_step(benchmark::State& state) {
    DetectorConfig c;
    c.procedure = Procedure::open_m;
    c.family = Family::normal_mean_unit_var();
    c.theta = ParamSet::interval(-1.0, -0.5);
    c.lambda = ParamSet::singleton(0.0);
    c.a = 100.0;
    run_steps(state, c, -0.7);
}
BENCHMARK(BM_open_m_step);

void BM_tau_glr_step(benchmark::State& state) {
    DetectorConfig c;
    c.procedure = Procedure::tau_glr;
    c.family = Family::exponential_rate();
    c.theta = ParamSet::singleton(1.0);
    c.lambda = ParamSet::interval(2.0, 3.0);
    c.a = 5.02;
    run_steps(state, c, 1.0);
}
BENCHMARK(BM_tau_glr_step);

void BM_t_hat_star_glr_step(benchmark::State& state) {
    DetectorConfig c;
    c.procedure = Procedure::t_hat_star_glr;
    c.family = Family::exponential_rate();
    c.theta = ParamSet::interval(0.8, 1.0, 256);
    c.lambda = ParamSet::interval(2.0, 3.0, 256);
    c.a = 22.5;
    c.pair = exp_pair();
    run_steps(state, c, 1.0);
}
BENCHMARK(BM_t_hat_star_glr_step);

void BM_t_star_mixture_step(benchmark::State& state) {
    DetectorConfig c;
    c.procedure = Procedure::t_star_mixture;
    c.family = Family::exponential_rate();
    c.theta = ParamSet::interval(0.8, 1.0, 256);
    c.lambda = ParamSet::interval(2.0, 3.0, 256);
    c.a = 22.5;
    c.pair = exp_pair();
    c.eta_grid_n = 33;
    run_steps(state, c, 1.0);
}
BENCHMARK(BM_t_star_mixture_step);

void BM_pair_construction(benchmark::State& state) {
    const Family f = Family::exponential_rate();
    const ParamSet theta = ParamSet::interval(0.8, 1.0, static_cast<int>(state.range(0)));
    const ParamSet lambda = ParamSet::interval(2.0, 3.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        const TabulatedFn p = optimizer_from(TabulatedFn::constant(lambda, 1.0), f, theta);
        const OptimizerPair pair = pair_close(p, f, lambda);
        benchmark::DoNotOptimize(pair.residual);
    }
}
BENCHMARK(BM_pair_construction)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
