#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "cascade/finance.hpp"
#include "cascade/goy.hpp"
#include "cascade/pao.hpp"
#include "cascade/statfit.hpp"

namespace cascade {

/// (max - min) / mean. Zero for an empty span.
double relative_spread(std::span<const double> v);

struct GoyAnalysis {
    std::size_t window_lo = 0; // shell indices, inclusive
    std::size_t window_hi = 0;
    FitResult spectrum_fit;    // log-log E(k_n) over the window
    double flux_spread = 0.0;  // relative spread of Pi_n over the window
    std::optional<PaoFit> pao; // K_Ko fitted with eps = mean injection
};

/// Selects the flux plateau and fits the spectrum on it. Throws FitError
/// when no plateau of four shells exists at the configured tolerance.
GoyAnalysis analyze_goy(const GoyRunResult& run, const SimConfig& cfg);

struct FinanceAnalysis {
    FitResult w_shell_fit;  // log-log W_k vs k
    FitResult w_entity_fit; // log-log W(k) vs k
    FitResult nw_fit;       // log-log n(W) vs W
    double flux_spread = 0.0; // over interior boundaries
    std::optional<PredictedExponents> predicted; // empty at alpha = -2
};

FinanceAnalysis analyze_finance(const SteadyStateReport& report, const FinanceParams& params);

/// Count-vs-wealth log-log fit over the enumerated tree levels; needs at
/// least three levels (levels >= 2).
FitResult analyze_tree(std::span<const TreeLevel> levels);

/// Semi-log fit of Pao flux against x = k^{4/3} over [k_d, 3 k_d]; the
/// analytic slope is -(3/2) K_Ko k_d^{-4/3}.
FitResult pao_rolloff_fit(const PaoParams& p, std::size_t n_points = 20);

} // namespace cascade
