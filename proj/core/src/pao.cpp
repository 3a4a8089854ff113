#include "cascade/pao.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "cascade/error.hpp"

namespace cascade {

namespace {

double pao_factor(double k, double k_ko, double k_d) {
    return std::exp(-1.5 * k_ko * std::pow(k / k_d, 4.0 / 3.0));
}

} // namespace

double PaoParams::k_d() const { return dissipation_wavenumber(eps_u, nu); }

PaoParams PaoParams::from_config(const SimConfig& cfg) {
    const auto& s = params_as<PaoSection>(cfg);
    return PaoParams{s.k_ko, s.eps_u, s.nu};
}

double kolmogorov_spectrum(double k, const PaoParams& p) {
    if (!(k > 0.0)) throw DomainError("kolmogorov_spectrum: k must be positive");
    return p.k_ko * std::cbrt(p.eps_u * p.eps_u) * std::pow(k, -5.0 / 3.0);
}

double dissipation_wavenumber(double eps_u, double nu) {
    if (!(eps_u > 0.0) || !(nu > 0.0)) throw DomainError("dissipation_wavenumber: eps and nu must be positive");
    return std::pow(eps_u / (nu * nu * nu), 0.25);
}

double pao_flux(double k, const PaoParams& p) {
    if (k < 0.0) throw DomainError("pao_flux: k must be nonnegative");
    if (k == 0.0) return p.eps_u;
    return p.eps_u * pao_factor(k, p.k_ko, p.k_d());
}

double pao_spectrum(double k, const PaoParams& p) {
    return kolmogorov_spectrum(k, p) * pao_factor(k, p.k_ko, p.k_d());
}

double consistency_residual(double k, const PaoParams& p) { return consistency_residual(k, p, p.k_d()); }

double consistency_residual(double k, const PaoParams& p, double k_d) {
    if (!(k > 0.0)) throw DomainError("consistency_residual: k must be positive");
    const double factor = pao_factor(k, p.k_ko, k_d);
    // d/dk of eps exp(-3/2 K (k/k_d)^{4/3}) = -2 K eps k^{1/3} k_d^{-4/3} exp(.)
    const double dflux = -2.0 * p.k_ko * p.eps_u * std::cbrt(k) * std::pow(k_d, -4.0 / 3.0) * factor;
    const double spectrum = kolmogorov_spectrum(k, p) * factor;
    const double sink = 2.0 * p.nu * k * k * spectrum;
    return (dflux + sink) / sink;
}

PaoFit fit_pao_to_run(const SpectrumSeries& e_avg, const SpectrumSeries& pi_avg, double eps_u, double nu) {
    if (e_avg.k.size() != e_avg.value.size() || pi_avg.value.size() != e_avg.value.size())
        throw FitError("fit_pao_to_run: spectrum and flux series differ in length");
    const double k_d = dissipation_wavenumber(eps_u, nu);

    // r_n(K) = ln E_n - ln K - 2/3 ln eps + 5/3 ln k_n + 3/2 K x_n
    std::vector<double> d, x;
    for (std::size_t n = 0; n < e_avg.k.size(); ++n) {
        const double e = e_avg.value[n], k = e_avg.k[n];
        if (!(e > 0.0) || !std::isfinite(e) || !(pi_avg.value[n] >= 1e-3 * eps_u)) continue;
        d.push_back(std::log(e) - 2.0 / 3.0 * std::log(eps_u) + 5.0 / 3.0 * std::log(k));
        x.push_back(std::pow(k / k_d, 4.0 / 3.0));
    }
    if (d.size() < 4) throw FitError("fit_pao_to_run: fewer than 4 usable shells");

    auto cost = [&](double log_k) {
        const double kk = std::exp(log_k);
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double r = d[i] - log_k + 1.5 * kk * x[i];
            s += r * r;
        }
        return s;
    };

    // Coarse scan, then Brent on the bracketing cell.
    const double lo = std::log(1e-3), hi = std::log(1e3);
    constexpr int kScan = 240;
    const double step = (hi - lo) / kScan;
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        const double c = cost(lo + step * i);
        if (c < best_cost) {
            best_cost = c;
            best = i;
        }
    }
    const double a = lo + step * std::max(0, best - 1);
    const double b = lo + step * std::min(kScan, best + 1);
    const auto [log_k, c] = boost::math::tools::brent_find_minima(cost, a, b, std::numeric_limits<double>::digits / 2);

    PaoFit fit;
    fit.k_ko = std::exp(log_k);
    fit.rms_log_residual = std::sqrt(c / static_cast<double>(d.size()));
    fit.n_shells = d.size();
    return fit;
}

std::vector<PaoCurvePoint> pao_curves(const PaoParams& p, double k_min, double k_max, std::size_t n_points) {
    if (!(k_min > 0.0) || !(k_max > k_min) || n_points < 2) throw DomainError("pao_curves: invalid range");
    std::vector<PaoCurvePoint> out;
    out.reserve(n_points);
    const double ratio = std::log(k_max / k_min);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double k = k_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n_points - 1));
        out.push_back({k, kolmogorov_spectrum(k, p), pao_spectrum(k, p), pao_flux(k, p), consistency_residual(k, p)});
    }
    return out;
}

} // namespace cascade
