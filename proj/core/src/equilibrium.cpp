#include "cascade/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/error.hpp"

namespace cascade {

namespace {

struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace

AgentPopulation::AgentPopulation(std::size_t n_agents, double mean_wealth, std::uint64_t seed)
    : AgentPopulation(std::vector<double>(n_agents, mean_wealth), seed) {}

AgentPopulation::AgentPopulation(std::vector<double> wealth, std::uint64_t seed)
    : wealth_(std::move(wealth)), rng_(seed) {
    for (double w : wealth_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("AgentPopulation: wealth must be finite and nonnegative");
        add(w);
    }
}

void AgentPopulation::add(double x) {
    NeumaierSum s{sum_, comp_};
    s.add(x);
    sum_ = s.sum;
    comp_ = s.comp;
}

double AgentPopulation::recomputed_total() const {
    NeumaierSum s;
    for (double w : wealth_) s.add(w);
    return s.value();
}

void AgentPopulation::exchange_pair(std::size_t i, std::size_t j, double eps) {
    if (i >= size() || j >= size() || i == j) throw DomainError("exchange_pair: need two distinct agents in range");
    const double wi = wealth_[i], wj = wealth_[j];
    const double pool = wi + wj;
    const double to_i = eps * pool;
    const double to_j = pool - to_i;
    wealth_[i] = to_i;
    wealth_[j] = to_j;
    add(to_i);
    add(to_j);
    add(-wi);
    add(-wj);
}

void AgentPopulation::exchange_step() {
    const std::uint64_t n = size();
    if (n < 2) throw DomainError("exchange_step: need at least two agents");
    const auto i = uniform_index(rng_, n);
    auto j = uniform_index(rng_, n - 1);
    if (j >= i) ++j;
    exchange_pair(i, j, uniform01(rng_));
}

double gibbs_pdf(double w, double mean_wealth) {
    if (!(w >= 0.0)) throw DomainError("gibbs_pdf: W must be nonnegative");
    if (!(mean_wealth > 0.0)) throw DomainError("gibbs_pdf: mean wealth must be positive");
    return std::exp(-w / mean_wealth) / mean_wealth;
}

FitResult ccdf_semilog_fit(std::span<const double> wealth, double q_lo, double q_hi) {
    if (wealth.empty()) throw FitError("ccdf_semilog_fit: empty sample");
    std::vector<double> sorted(wealth.begin(), wealth.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(n - 1)));
        return sorted[std::min(idx, n - 1)];
    };
    const double lo = at(q_lo), hi = at(q_hi);

    // P(W > w) at each distinct sample value; ties share the upper value.
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n && sorted[i + 1] == sorted[i]) continue;
        const double w = sorted[i];
        if (w < lo || w > hi) continue;
        const double ccdf = static_cast<double>(n - 1 - i) / static_cast<double>(n);
        if (!(ccdf > 0.0)) continue;
        x.push_back(w);
        y.push_back(ccdf);
    }
    return semilog_fit(x, y);
}

ExchangeResult run_exchange(const SimConfig& cfg) {
    if (cfg.model != ModelKind::equilibrium) throw ConfigError("model", "run_exchange requires model = equilibrium");
    const auto& s = params_as<EquilibriumSection>(cfg);
    AgentPopulation pop(static_cast<std::size_t>(s.n_agents), s.mean_wealth, cfg.seed);

    ExchangeResult r;
    r.mean_wealth = s.mean_wealth;
    r.initial_total = pop.total();
    const auto n_steps = static_cast<std::uint64_t>(s.n_steps);
    for (std::uint64_t step = 1; step <= n_steps; ++step) {
        pop.exchange_step();
        if (step % kTotalRecheckInterval == 0) {
            const double drift = std::abs(pop.total() - pop.recomputed_total()) / r.initial_total;
            r.max_total_drift = std::max(r.max_total_drift, drift);
        }
    }
    r.steps = n_steps;
    r.final_total = pop.recomputed_total();
    r.max_total_drift = std::max(r.max_total_drift, std::abs(pop.total() - r.final_total) / r.initial_total);
    r.final_wealth.assign(pop.wealth().begin(), pop.wealth().end());

    const double w_max = *std::max_element(r.final_wealth.begin(), r.final_wealth.end());
    const auto n_bins = static_cast<std::size_t>(s.n_bins);
    r.histogram = linear_histogram(r.final_wealth, n_bins, 0.0, w_max);
    const double n = static_cast<double>(pop.size());
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double l = r.histogram.edges[b], h = r.histogram.edges[b + 1], width = h - l;
        r.pdf_estimate.push_back(static_cast<double>(r.histogram.counts[b]) / (n * width));
        r.gibbs_reference.push_back((std::exp(-l / s.mean_wealth) - std::exp(-h / s.mean_wealth)) / width);
    }

    try {
        r.ccdf_fit = ccdf_semilog_fit(r.final_wealth);
    } catch (const FitError&) {
        r.ccdf_fit.reset();
    }
    return r;
}

} // namespace cascade
