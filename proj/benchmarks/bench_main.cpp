#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "cascade/equilibrium.hpp"
#include "cascade/finance.hpp"
#include "cascade/goy.hpp"
#include "cascade/pao.hpp"
#include "cascade/statfit.hpp"

using namespace cascade;

namespace {

GoyParams goy_params() { return GoyParams::from_config(default_config(ModelKind::goy)); }

void BM_GoyStepRk4(benchmark::State& st) {
    const auto p = goy_params();
    const auto s = goy_initial_state(p.grid, 1e-2, 22, 42);
    for (auto _ : st) benchmark::DoNotOptimize(step_rk4(s, p, 1e-4));
}
BENCHMARK(BM_GoyStepRk4);

void BM_GoyStepIfRk4(benchmark::State& st) {
    const auto p = goy_params();
    const auto s = goy_initial_state(p.grid, 1e-2, 22, 42);
    for (auto _ : st) benchmark::DoNotOptimize(step_if_rk4(s, p, 1e-4));
}
BENCHMARK(BM_GoyStepIfRk4);

void BM_GoyFlux(benchmark::State& st) {
    const auto p = goy_params();
    const auto s = goy_initial_state(p.grid, 1e-2, 22, 42);
    for (auto _ : st) benchmark::DoNotOptimize(energy_flux(s, p));
}
BENCHMARK(BM_GoyFlux);

void BM_FinanceRhs(benchmark::State& st) {
    const auto p = FinanceParams::from_config(default_config(ModelKind::finance));
    WealthState s;
    for (std::size_t n = 0; n < p.grid.size(); ++n) s.W.push_back(std::pow(2.0, n / 2.0));
    for (auto _ : st) benchmark::DoNotOptimize(finance_rhs(s, p));
}
BENCHMARK(BM_FinanceRhs);

void BM_FinanceSteadyState(benchmark::State& st) {
    auto cfg = default_config(ModelKind::finance);
    std::get<FinanceSection>(cfg.params).alpha = static_cast<double>(st.range(0)) / 2.0;
    for (auto _ : st) benchmark::DoNotOptimize(run_to_steady_state(cfg));
}
BENCHMARK(BM_FinanceSteadyState)->Arg(-1)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ExchangeStep(benchmark::State& st) {
    AgentPopulation pop(10000, 1.0, 42);
    for (auto _ : st) pop.exchange_step();
    benchmark::DoNotOptimize(pop.total());
}
BENCHMARK(BM_ExchangeStep);

void BM_LoglogFit(benchmark::State& st) {
    std::vector<double> x, y;
    for (int i = 0; i < st.range(0); ++i) {
        x.push_back(std::pow(2.0, i * 0.1));
        y.push_back(std::pow(x.back(), -5.0 / 3.0));
    }
    for (auto _ : st) benchmark::DoNotOptimize(loglog_fit(x, y));
}
BENCHMARK(BM_LoglogFit)->Arg(22)->Arg(1000);

void BM_CcdfFit(benchmark::State& st) {
    AgentPopulation pop(10000, 1.0, 42);
    for (int i = 0; i < 1'000'000; ++i) pop.exchange_step();
    const std::vector<double> w(pop.wealth().begin(), pop.wealth().end());
    for (auto _ : st) benchmark::DoNotOptimize(ccdf_semilog_fit(w));
}
BENCHMARK(BM_CcdfFit)->Unit(benchmark::kMicrosecond);

void BM_PaoFit(benchmark::State& st) {
    const PaoParams p{1.6, 1.0, 1e-4};
    SpectrumSeries e, f;
    const ShellGrid grid(1.0, 2.0, 22);
    for (double k : grid.wavenumbers()) {
        e.k.push_back(k);
        f.k.push_back(k);
        e.value.push_back(pao_spectrum(k, p));
        f.value.push_back(pao_flux(k, p));
    }
    for (auto _ : st) benchmark::DoNotOptimize(fit_pao_to_run(e, f, p.eps_u, p.nu));
}
BENCHMARK(BM_PaoFit)->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
