#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/grid.hpp"
#include "cascade/statfit.hpp"

namespace cascade {

using Complex = std::complex<double>;

/// GOY shell model
///
///   du_n/dt = -i (a1 k_n u*_{n+1} u*_{n+2} + a2 k_{n-1} u*_{n+1} u*_{n-1}
///                 + a3 k_{n-2} u*_{n-1} u*_{n-2}) - nu k_n^2 u_n + f_n
///
/// with u_{-2} = u_{-1} = u_N = u_{N+1} = 0. The nonlinear term conserves
/// E = sum |u_n|^2 / 2 whenever a1 + a2 + a3 = 0.
struct GoyParams {
    double a1 = 1.0;
    double a2 = -0.5;
    double a3 = -0.5;
    double nu = 0.0;
    std::vector<std::pair<std::size_t, Complex>> forcing;
    ShellGrid grid;

    explicit GoyParams(ShellGrid g) : grid(std::move(g)) {}

    static GoyParams from_config(const SimConfig& cfg);
    std::vector<std::size_t> forced_shells() const;
};

struct ShellState {
    std::vector<Complex> u;
    double t = 0.0;
};

/// Nonlinear transfer term only (no viscosity, no forcing).
std::vector<Complex> goy_nonlinear(const ShellState& state, const GoyParams& params);
std::vector<Complex> goy_rhs(const ShellState& state, const GoyParams& params);

/// One classical RK4 step of the full right-hand side. Throws DivergedError
/// if the result is not finite.
ShellState step_rk4(const ShellState& state, const GoyParams& params, double dt);

/// One integrating-factor RK4 step: viscous decay exact, nonlinear and
/// forcing terms fourth order.
ShellState step_if_rk4(const ShellState& state, const GoyParams& params, double dt);

double total_energy(const ShellState& state);

/// E(k_n) = |u_n|^2 / (2 k_n).
SpectrumSeries energy_spectrum(const ShellState& state, const ShellGrid& grid);

/// Pi_n = -sum_{m<=n} Re(u*_m NL_m): nonlinear energy transfer out of shells 0..n.
SpectrumSeries energy_flux(const ShellState& state, const GoyParams& params);

/// sum Re(u*_n f_n)
double injection_rate(const ShellState& state, const GoyParams& params);
/// sum nu k_n^2 |u_n|^2
double dissipation_rate(const ShellState& state, const GoyParams& params);

/// Seeded initial condition: |u_n| = amplitude * k_n^{-1/3} with uniform
/// random phases for n < n_active, zero above.
ShellState goy_initial_state(const ShellGrid& grid, double amplitude, std::size_t n_active, std::uint64_t seed);

struct GoyRunResult {
    SpectrumSeries spectrum; // time-averaged E(k_n)
    SpectrumSeries flux;     // time-averaged Pi_n
    std::vector<std::pair<double, double>> energy; // (t, E_total)
    double mean_injection = 0.0;
    double mean_dissipation = 0.0;
    // Coefficient of variation of E_total over the averaging window; a value
    // near zero means the forced state settled onto a fixed point or cycle.
    double energy_cv = 0.0;
    std::uint64_t steps = 0;
    ShellState final_state;
};

GoyRunResult run_goy(const SimConfig& cfg);

} // namespace cascade
