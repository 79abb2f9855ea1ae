#include <benchmark/benchmark.h>

#include "thermoline/bounds.hpp"
#include "thermoline/inference.hpp"
#include "thermoline/simulate.hpp"

using namespace thermoline;

namespace {

const models::SampleModel spin = models::SampleModel::spin_half(1.0);
const models::TemperatureDomain spin_domain(spin, 0.1, 5.0);
const models::SampleModel reservoir = models::SampleModel::ideal_reservoir(1.0);
const models::TemperatureDomain res_domain(reservoir, 0.1, 5.0);

void bm_qfi_spin(benchmark::State& state) {
    double theta = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(models::qfi(spin, theta));
        theta = theta < 5.0 ? theta + 1e-6 : 0.1;
    }
}
BENCHMARK(bm_qfi_spin);

void bm_lambda_round_trip(benchmark::State& state) {
    double theta = 0.7;
    for (auto _ : state) {
        theta = models::theta_of_lambda(spin, models::lambda_of_theta(spin, theta));
        benchmark::DoNotOptimize(theta);
    }
}
BENCHMARK(bm_lambda_round_trip);

void bm_prior_build(benchmark::State& state) {
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin, grid));
    state.SetItemsProcessed(state.iterations() * grid);
}
BENCHMARK(bm_prior_build)->Arg(512)->Arg(2048)->Arg(8192);

void bm_bayes_update(benchmark::State& state) {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin,
                                                      static_cast<int>(state.range(0)));
    const auto m = meas::MeasurementModel::spin_energy(1.0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(infer::bayes_update(prior, m, {1}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_bayes_update)->Arg(512)->Arg(2048);

void bm_bayesian_information(benchmark::State& state) {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin, 2048);
    for (auto _ : state) benchmark::DoNotOptimize(infer::bayesian_information(prior));
}
BENCHMARK(bm_bayesian_information);

void bm_trajectory(benchmark::State& state) {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin, 2048);
    const auto m = meas::MeasurementModel::spin_energy(1.0, 1);
    const int nu = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_trajectory(prior, m, nu, 1.0, seed++));
    state.SetItemsProcessed(state.iterations() * nu);
}
BENCHMARK(bm_trajectory)->Arg(100)->Arg(1000);

void bm_tbcrb(benchmark::State& state) {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin, 512);
    const auto m = meas::MeasurementModel::spin_energy(1.0, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(bounds::tbcrb(prior, m, 10, 100, 7, /*threads=*/1));
}
BENCHMARK(bm_tbcrb);

void bm_adaptive_ensemble(benchmark::State& state) {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, res_domain}, reservoir, 2048);
    const sim::AdaptivePolicy policy{sim::default_gap_candidates(res_domain),
                                     sim::AdaptiveObjective::bcrb, reservoir};
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::run_adaptive(prior, policy, 50, 2, 7, /*threads=*/1));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(bm_adaptive_ensemble);

}  // namespace

BENCHMARK_MAIN();
