#include "cascade/goy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cascade/error.hpp"
#include "cascade/rk4.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

// Dense view of the parameters used by the time loop.
struct GoyKernel {
    std::vector<double> k;
    std::vector<double> visc; // nu k^2
    std::vector<Complex> f;
    double a1, a2, a3;

    explicit GoyKernel(const GoyParams& p)
        : k(p.grid.wavenumbers()), visc(k.size()), f(k.size()), a1(p.a1), a2(p.a2), a3(p.a3) {
        for (std::size_t n = 0; n < k.size(); ++n) visc[n] = p.nu * k[n] * k[n];
        for (const auto& [shell, amp] : p.forcing) f[shell] += amp;
    }

    void nonlinear(std::span<const Complex> u, std::span<Complex> out) const {
        const std::size_t N = u.size();
        auto at = [&](std::ptrdiff_t m) -> Complex {
            return (m < 0 || m >= static_cast<std::ptrdiff_t>(N)) ? Complex{} : std::conj(u[static_cast<std::size_t>(m)]);
        };
        for (std::size_t n = 0; n < N; ++n) {
            const auto i = static_cast<std::ptrdiff_t>(n);
            Complex s{};
            if (n + 2 < N) s += a1 * k[n] * (at(i + 1) * at(i + 2));
            if (n >= 1 && n + 1 < N) s += a2 * k[n - 1] * (at(i + 1) * at(i - 1));
            if (n >= 2) s += a3 * k[n - 2] * (at(i - 1) * at(i - 2));
            out[n] = Complex{s.imag(), -s.real()}; // -i * s
        }
    }

    void forced_nonlinear(std::span<const Complex> u, std::span<Complex> out) const {
        nonlinear(u, out);
        for (std::size_t n = 0; n < u.size(); ++n) out[n] += f[n];
    }

    void rhs(std::span<const Complex> u, std::span<Complex> out) const {
        forced_nonlinear(u, out);
        for (std::size_t n = 0; n < u.size(); ++n) out[n] -= visc[n] * u[n];
    }
};

void check_dimension(const ShellState& s, const GoyParams& p) {
    if (s.u.size() != p.grid.size())
        throw Error("goy: state has " + std::to_string(s.u.size()) + " shells but grid has " +
                    std::to_string(p.grid.size()));
}

bool all_finite(const std::vector<Complex>& u) {
    for (const auto& z : u)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

[[noreturn]] void throw_diverged(std::uint64_t step, double t) {
    throw DivergedError(step, "goy integration diverged at step " + std::to_string(step) + " (t=" +
                                  std::to_string(t) + "); try a smaller integrator.dt");
}

} // namespace

GoyParams GoyParams::from_config(const SimConfig& cfg) {
    const auto& s = params_as<GoySection>(cfg);
    GoyParams p(cfg.grid.build());
    p.a1 = s.a1;
    p.a2 = s.a2;
    p.a3 = s.a3;
    p.nu = s.nu;
    for (const auto& term : s.forcing) p.forcing.emplace_back(static_cast<std::size_t>(term.shell), term.amplitude);
    return p;
}

std::vector<std::size_t> GoyParams::forced_shells() const {
    std::vector<std::size_t> out;
    for (const auto& [shell, amp] : forcing)
        if (amp != Complex{}) out.push_back(shell);
    return out;
}

std::vector<Complex> goy_nonlinear(const ShellState& state, const GoyParams& params) {
    check_dimension(state, params);
    std::vector<Complex> out(state.u.size());
    GoyKernel(params).nonlinear(state.u, out);
    return out;
}

std::vector<Complex> goy_rhs(const ShellState& state, const GoyParams& params) {
    check_dimension(state, params);
    std::vector<Complex> out(state.u.size());
    GoyKernel(params).rhs(state.u, out);
    return out;
}

ShellState step_rk4(const ShellState& state, const GoyParams& params, double dt) {
    check_dimension(state, params);
    if (!(dt > 0.0)) throw DomainError("goy: dt must be positive");
    const GoyKernel kernel(params);
    Rk4Stepper<Complex> stepper(state.u.size());
    ShellState next = state;
    stepper.step(next.u, dt, [&](auto u, auto out) { kernel.rhs(u, out); });
    next.t += dt;
    if (!all_finite(next.u)) throw_diverged(1, next.t);
    return next;
}

ShellState step_if_rk4(const ShellState& state, const GoyParams& params, double dt) {
    check_dimension(state, params);
    if (!(dt > 0.0)) throw DomainError("goy: dt must be positive");
    const GoyKernel kernel(params);
    Rk4Stepper<Complex> stepper(state.u.size());
    ShellState next = state;
    stepper.step_integrating_factor(next.u, dt, kernel.visc, [&](auto u, auto out) { kernel.forced_nonlinear(u, out); });
    next.t += dt;
    if (!all_finite(next.u)) throw_diverged(1, next.t);
    return next;
}

double total_energy(const ShellState& state) {
    double e = 0.0;
    for (const auto& z : state.u) e += std::norm(z);
    return 0.5 * e;
}

SpectrumSeries energy_spectrum(const ShellState& state, const ShellGrid& grid) {
    SpectrumSeries s;
    s.k = grid.wavenumbers();
    s.value.resize(s.k.size());
    for (std::size_t n = 0; n < s.k.size(); ++n) s.value[n] = std::norm(state.u.at(n)) / (2.0 * s.k[n]);
    s.n_samples = 1;
    return s;
}

SpectrumSeries energy_flux(const ShellState& state, const GoyParams& params) {
    const auto nl = goy_nonlinear(state, params);
    SpectrumSeries s;
    s.k = params.grid.wavenumbers();
    s.value.resize(s.k.size());
    double acc = 0.0;
    for (std::size_t n = 0; n < s.k.size(); ++n) {
        acc -= (std::conj(state.u[n]) * nl[n]).real();
        s.value[n] = acc;
    }
    s.n_samples = 1;
    return s;
}

double injection_rate(const ShellState& state, const GoyParams& params) {
    double sum = 0.0;
    for (const auto& [shell, amp] : params.forcing) sum += (std::conj(state.u.at(shell)) * amp).real();
    return sum;
}

double dissipation_rate(const ShellState& state, const GoyParams& params) {
    double sum = 0.0;
    const auto& k = params.grid.wavenumbers();
    for (std::size_t n = 0; n < k.size(); ++n) sum += params.nu * k[n] * k[n] * std::norm(state.u.at(n));
    return sum;
}

ShellState goy_initial_state(const ShellGrid& grid, double amplitude, std::size_t n_active, std::uint64_t seed) {
    Rng rng(seed);
    ShellState s;
    s.u.assign(grid.size(), Complex{});
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double phase = 2.0 * std::numbers::pi * uniform01(rng);
        if (n < n_active) s.u[n] = std::polar(amplitude * std::pow(grid.wavenumber(n), -1.0 / 3.0), phase);
    }
    return s;
}

GoyRunResult run_goy(const SimConfig& cfg) {
    if (cfg.model != ModelKind::goy) throw ConfigError("model", "run_goy requires model = goy");
    const auto& sec = params_as<GoySection>(cfg);
    const GoyParams params = GoyParams::from_config(cfg);
    const GoyKernel kernel(params);
    const auto& in = cfg.integrator;
    const std::size_t N = params.grid.size();

    ShellState state = goy_initial_state(params.grid, sec.init_amplitude, static_cast<std::size_t>(sec.init_shells), cfg.seed);
    Rk4Stepper<Complex> stepper(N);

    const auto n_steps = static_cast<std::uint64_t>(std::llround(in.t_end / in.dt));
    const auto transient = static_cast<std::uint64_t>(std::floor(in.transient_fraction * static_cast<double>(n_steps)));
    const auto sample_every = static_cast<std::uint64_t>(in.sample_every);
    const std::uint64_t energy_stride = std::max<std::uint64_t>(sample_every, (n_steps + 19999) / 20000);

    GoyRunResult r;
    r.spectrum.k = params.grid.wavenumbers();
    r.spectrum.value.assign(N, 0.0);
    r.flux.k = r.spectrum.k;
    r.flux.value.assign(N, 0.0);
    std::vector<Complex> nl(N);
    double inj = 0.0, diss = 0.0, e_sum = 0.0, e_sq = 0.0;
    std::size_t samples = 0;

    auto record = [&](std::uint64_t step) {
        if (step % energy_stride == 0) r.energy.emplace_back(state.t, total_energy(state));
        if (step <= transient || step % sample_every != 0) return;
        kernel.nonlinear(state.u, nl);
        double acc = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            r.spectrum.value[n] += std::norm(state.u[n]) / (2.0 * r.spectrum.k[n]);
            acc -= (std::conj(state.u[n]) * nl[n]).real();
            r.flux.value[n] += acc;
        }
        inj += injection_rate(state, params);
        diss += dissipation_rate(state, params);
        const double e = total_energy(state);
        e_sum += e;
        e_sq += e * e;
        ++samples;
    };

    record(0);
    for (std::uint64_t step = 1; step <= n_steps; ++step) {
        if (in.scheme == TimeScheme::if_rk4)
            stepper.step_integrating_factor(state.u, in.dt, kernel.visc,
                                            [&](auto u, auto out) { kernel.forced_nonlinear(u, out); });
        else
            stepper.step(state.u, in.dt, [&](auto u, auto out) { kernel.rhs(u, out); });
        state.t = static_cast<double>(step) * in.dt;
        if (!all_finite(state.u)) throw_diverged(step, state.t);
        record(step);
    }

    if (samples > 0) {
        const auto ns = static_cast<double>(samples);
        for (std::size_t n = 0; n < N; ++n) {
            r.spectrum.value[n] /= ns;
            r.flux.value[n] /= ns;
        }
        r.mean_injection = inj / ns;
        r.mean_dissipation = diss / ns;
        const double mean = e_sum / ns;
        const double var = std::max(0.0, e_sq / ns - mean * mean);
        r.energy_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    }
    r.spectrum.n_samples = samples;
    r.flux.n_samples = samples;
    r.steps = n_steps;
    r.final_state = std::move(state);
    return r;
}

} // namespace cascade
