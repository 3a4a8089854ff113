#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/rng.hpp"
#include "cascade/statfit.hpp"

namespace cascade {

/// Agents trading by random pool-and-split exchange. The cached total is a
/// compensated running sum of every change, so it tracks sum(wealth) to
/// working precision over any number of steps.
class AgentPopulation {
public:
    AgentPopulation(std::size_t n_agents, double mean_wealth, std::uint64_t seed);
    AgentPopulation(std::vector<double> wealth, std::uint64_t seed);

    std::size_t size() const { return wealth_.size(); }
    std::span<const double> wealth() const { return wealth_; }

    double total() const { return sum_ + comp_; }
    /// Fresh compensated sum over all agents.
    double recomputed_total() const;

    /// Pools agents i and j and hands eps * S to i, the rest to j.
    void exchange_pair(std::size_t i, std::size_t j, double eps);

    /// One exchange between two distinct agents chosen uniformly.
    void exchange_step();

    Rng& rng() { return rng_; }

private:
    void add(double x);

    std::vector<double> wealth_;
    double sum_ = 0.0;
    double comp_ = 0.0;
    Rng rng_;
};

/// exp(-W/mean) / mean. Throws DomainError for W < 0 or mean <= 0.
double gibbs_pdf(double w, double mean_wealth);

struct ExchangeResult {
    Histogram histogram; // linear bins over [0, max wealth]
    std::vector<double> pdf_estimate;
    std::vector<double> gibbs_reference; // bin average of gibbs_pdf
    // Semi-log fit of the empirical CCDF on the 10%..90% wealth quantiles.
    // Empty when the population is degenerate (e.g. no exchanges yet).
    std::optional<FitResult> ccdf_fit;
    double mean_wealth = 0.0;
    double initial_total = 0.0;
    double final_total = 0.0; // recomputed, not cached
    double max_total_drift = 0.0; // largest |cached - recomputed| / initial seen at checkpoints
    std::uint64_t steps = 0;
    std::vector<double> final_wealth;
};

/// Steps between checks of the cached total against a full resummation.
inline constexpr std::uint64_t kTotalRecheckInterval = 1'000'000;

/// Runs n_steps exchanges from uniform wealth mean_wealth.
ExchangeResult run_exchange(const SimConfig& cfg);

/// Semi-log fit of the CCDF of `wealth` restricted to [q_lo, q_hi] quantiles.
/// Throws FitError if the window holds fewer than three distinct values.
FitResult ccdf_semilog_fit(std::span<const double> wealth, double q_lo = 0.1, double q_hi = 0.9);

} // namespace cascade
