#pragma once

#include <cstddef>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/statfit.hpp"

namespace cascade {

/// Kolmogorov constant, dissipation rate and viscosity. The dissipation
/// wavenumber is always derived from (eps_u, nu) and never stored.
struct PaoParams {
    double k_ko = 1.6;
    double eps_u = 1.0;
    double nu = 1e-4;

    double k_d() const;

    static PaoParams from_config(const SimConfig& cfg);
};

/// K_Ko eps^{2/3} k^{-5/3}
double kolmogorov_spectrum(double k, const PaoParams& p);

/// (eps / nu^3)^{1/4}
double dissipation_wavenumber(double eps_u, double nu);

/// eps exp(-3/2 K_Ko (k/k_d)^{4/3})
double pao_flux(double k, const PaoParams& p);

/// K_Ko eps^{2/3} k^{-5/3} exp(-3/2 K_Ko (k/k_d)^{4/3})
double pao_spectrum(double k, const PaoParams& p);

/// (dPi/dk + 2 nu k^2 E(k)) / (2 nu k^2 E(k)) using the analytic derivative
/// of the Pao flux. Vanishes identically when k_d = (eps/nu^3)^{1/4}.
double consistency_residual(double k, const PaoParams& p);

/// Same, with the dissipation wavenumber supplied explicitly instead of
/// derived; used to show that no other k_d balances the budget.
double consistency_residual(double k, const PaoParams& p, double k_d);

struct PaoFit {
    double k_ko = 0.0;
    double rms_log_residual = 0.0;
    std::size_t n_shells = 0;
};

/// One-parameter least-squares fit of K_Ko to a shell spectrum with eps and
/// nu known, on log residuals. Shells are used when E > 0 and the averaged
/// flux is at least 1e-3 eps. Throws FitError with fewer than 4 usable shells.
PaoFit fit_pao_to_run(const SpectrumSeries& e_avg, const SpectrumSeries& pi_avg, double eps_u, double nu);

struct PaoCurvePoint {
    double k;
    double e_kolmogorov;
    double e_pao;
    double pi_pao;
    double residual;
};

/// Log-spaced samples on [k_min, k_max].
std::vector<PaoCurvePoint> pao_curves(const PaoParams& p, double k_min, double k_max, std::size_t n_points);

} // namespace cascade
