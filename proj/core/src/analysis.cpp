#include "cascade/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "cascade/error.hpp"

namespace cascade {

double relative_spread(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    return (*mx - *mn) / mean;
}

GoyAnalysis analyze_goy(const GoyRunResult& run, const SimConfig& cfg) {
    const auto& sec = params_as<GoySection>(cfg);
    const auto forced = GoyParams::from_config(cfg).forced_shells();
    GoyAnalysis a;
    std::tie(a.window_lo, a.window_hi) = inertial_range_select(run.flux, forced, sec.plateau_tol);
    const std::size_t len = a.window_hi - a.window_lo + 1;
    a.spectrum_fit = loglog_fit(std::span(run.spectrum.k).subspan(a.window_lo, len),
                                std::span(run.spectrum.value).subspan(a.window_lo, len));
    a.flux_spread = relative_spread(std::span(run.flux.value).subspan(a.window_lo, len));
    if (run.mean_injection > 0.0 && sec.nu > 0.0) {
        try {
            a.pao = fit_pao_to_run(run.spectrum, run.flux, run.mean_injection, sec.nu);
        } catch (const FitError&) {
            a.pao.reset();
        }
    }
    return a;
}

FinanceAnalysis analyze_finance(const SteadyStateReport& report, const FinanceParams& params) {
    FinanceAnalysis a;
    const auto& k = params.grid.wavenumbers();
    a.w_shell_fit = loglog_fit(k, report.W_star.W);
    const auto ent = entity_wealth(report.W_star, params.grid);
    a.w_entity_fit = loglog_fit(ent.k, ent.wealth);
    const auto dist = wealth_distribution(report.W_star, params.grid);
    a.nw_fit = loglog_fit(dist.wealth, dist.count);
    a.flux_spread = relative_spread(report.flux);
    if (params.alpha != -2.0) a.predicted = predicted_exponent(params.alpha);
    return a;
}

FitResult analyze_tree(std::span<const TreeLevel> levels) {
    std::vector<double> w, n;
    for (const auto& l : levels) {
        w.push_back(l.per_node_wealth);
        n.push_back(static_cast<double>(l.nodes));
    }
    return loglog_fit(w, n);
}

FitResult pao_rolloff_fit(const PaoParams& p, std::size_t n_points) {
    const double kd = p.k_d();
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double k = kd * (1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_points - 1));
        x.push_back(std::pow(k, 4.0 / 3.0));
        y.push_back(pao_flux(k, p));
    }
    return semilog_fit(x, y);
}

} // namespace cascade
