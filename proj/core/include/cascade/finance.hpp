#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/grid.hpp"

namespace cascade {

/// Hierarchical wealth shell model. Shell n holds the total wealth W_n of
/// all entities at wavenumber k_n. Wealth Q enters at the first shell per
/// unit time and leaves through the last shell (the sink) and, when b > 0,
/// through the per-shell loss b k^beta W.
///
/// literal:   dW_n/dt = a k_n^alpha W_{n-1} W_{n+1} - b k_n^beta W_n + Q[n=0] - S[n=N-1]
/// flux_form: dW_n/dt = F_{n-1/2} - F_{n+1/2} - b k_n^beta W_n + Q[n=0] - S[n=N-1],
///            F_{n+1/2} = a k_n^alpha W_n W_{n+1}
///
/// The sink S is sink * W_last (linear) or a k_last^alpha W_last W_ghost
/// (outflow), where the phantom shell W_ghost = W_last^2 / W_{last-1}
/// continues the local power law one step past the grid.
struct FinanceParams {
    double a = 1.0;
    double alpha = -1.0;
    double b = 0.0;
    double beta = 2.0;
    double q = 1.0;
    FinanceMode mode = FinanceMode::flux_form;
    SinkLaw sink_law = SinkLaw::outflow;
    double sink = 10.0;
    ShellGrid grid;

    explicit FinanceParams(ShellGrid g) : grid(std::move(g)) {}

    static FinanceParams from_config(const SimConfig& cfg);
};

struct WealthState {
    std::vector<double> W;
    double t = 0.0;
};

std::vector<double> finance_rhs_literal(const WealthState& state, const FinanceParams& p);
std::vector<double> finance_rhs_fluxform(const WealthState& state, const FinanceParams& p);
/// Dispatches on p.mode.
std::vector<double> finance_rhs(const WealthState& state, const FinanceParams& p);

/// Wealth leaving the last shell per unit time.
double sink_outflow(const WealthState& state, const FinanceParams& p);

/// Money flux across the N-1 interior boundaries. flux_form: the pair flux
/// F_{n+1/2}; literal: the budget flux Q - sum_{m<=n} (b k_m^beta W_m + dW_m/dt).
std::vector<double> money_flux(const WealthState& state, const FinanceParams& p);

/// Budget flux Q - sum_{m<=n} (b k_m^beta W_m + dW_m/dt) for either mode.
std::vector<double> budget_flux(const WealthState& state, const FinanceParams& p);

struct ShellFluxes {
    std::vector<double> left;  // into shell n from larger scales (Q at n = 0)
    std::vector<double> right; // out of shell n to smaller scales (sink outflow at the last shell)
};

ShellFluxes shell_fluxes(const WealthState& state, const FinanceParams& p);

struct SteadyStateReport {
    WealthState W_star;
    std::vector<double> flux;
    bool converged = false;
    double residual_norm = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t clamped = 0; // negative shell values set to zero after a step
    std::uint64_t limited = 0; // steps shortened below integrator.dt for stability
};

/// ||dW/dt|| / max(||W||, 1): relative for O(1) and larger states, absolute
/// for states decaying to zero.
double steady_residual(const WealthState& state, const FinanceParams& p);

/// Time-steps from W_n = w_init until steady_residual < integrator.steady_tol
/// or t_end. dt is an upper bound: steps are shortened to 2 / (largest
/// exchange rate) while the state is far from equilibrium. Not converging
/// is reported, not thrown. Throws DivergedError on non-finite values or
/// unbounded growth.
SteadyStateReport run_to_steady_state(const SimConfig& cfg);

struct EntityWealth {
    std::vector<double> k;
    std::vector<double> wealth;   // W(k) = W_k / (2 pi k)
    std::vector<double> entities; // n(k) = 2 pi k
};

EntityWealth entity_wealth(const WealthState& state, const ShellGrid& grid);

/// (W, n(W)) pairs sorted by W ascending; shells with zero wealth are left out.
struct WealthDistribution {
    std::vector<double> wealth;
    std::vector<double> count;
};

WealthDistribution wealth_distribution(const WealthState& state, const ShellGrid& grid);

struct PredictedExponents {
    double n_of_w;   // -2 / (alpha + 2)
    double flux;     // 1 / (alpha + 2)
};

/// Throws DomainError at alpha = -2.
PredictedExponents predicted_exponent(double alpha);

struct TreeLevel {
    std::size_t level;
    std::uint64_t nodes;
    double level_budget;
    double per_node_wealth;
};

/// Budget `q` handed down `levels` times through a tree of fan-out
/// `branching`, losing fraction `pilferage` per level. Returns levels
/// 0..levels inclusive.
std::vector<TreeLevel> tree_cascade(std::size_t levels, std::size_t branching, double q, double pilferage);

} // namespace cascade
