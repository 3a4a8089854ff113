#include "cascade/finance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "cascade/error.hpp"
#include "cascade/rk4.hpp"

namespace cascade {

namespace {

struct FinanceKernel {
    const FinanceParams& p;
    std::vector<double> coupling; // a k_n^alpha
    std::vector<double> loss;     // b k_n^beta

    explicit FinanceKernel(const FinanceParams& params) : p(params) {
        const auto& k = p.grid.wavenumbers();
        coupling.resize(k.size());
        loss.resize(k.size());
        for (std::size_t n = 0; n < k.size(); ++n) {
            coupling[n] = p.a * std::pow(k[n], p.alpha);
            loss[n] = p.b * std::pow(k[n], p.beta);
        }
    }

    double sink(std::span<const double> W) const {
        const std::size_t last = W.size() - 1;
        if (p.sink_law == SinkLaw::linear) return p.sink * W[last];
        if (W.size() < 2 || !(W[last - 1] > 0.0)) return 0.0;
        const double ghost = W[last] * W[last] / W[last - 1];
        return coupling[last] * W[last] * ghost;
    }

    // Everything except the linear loss term.
    void transfer(std::span<const double> W, std::span<double> out) const {
        const std::size_t N = W.size();
        if (p.mode == FinanceMode::flux_form) {
            for (std::size_t n = 0; n < N; ++n) out[n] = 0.0;
            for (std::size_t n = 0; n + 1 < N; ++n) {
                const double f = coupling[n] * W[n] * W[n + 1];
                out[n] -= f;
                out[n + 1] += f;
            }
        } else {
            for (std::size_t n = 0; n < N; ++n) {
                const double left = n > 0 ? W[n - 1] : 0.0;
                const double right = n + 1 < N ? W[n + 1] : 0.0;
                out[n] = coupling[n] * left * right;
            }
        }
        out[0] += p.q;
        out[N - 1] -= sink(W);
    }

    // Largest diagonal of the transfer Jacobian, a bound on the explicit stiffness.
    double max_rate(std::span<const double> W) const {
        const std::size_t N = W.size();
        double r = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            double x = 0.0;
            if (p.mode == FinanceMode::flux_form) {
                if (n > 0) x += coupling[n - 1] * W[n - 1];
                if (n + 1 < N) x += coupling[n] * W[n + 1];
            } else {
                if (n > 0) x += coupling[n] * W[n - 1];
                if (n + 1 < N) x += coupling[n] * W[n + 1];
            }
            r = std::max(r, x);
        }
        if (p.sink_law == SinkLaw::linear) {
            r = std::max(r, p.sink);
        } else if (N >= 2 && W[N - 2] > 0.0) {
            r = std::max(r, 3.0 * coupling[N - 1] * W[N - 1] * W[N - 1] / W[N - 2]);
        }
        return r;
    }

    void rhs(std::span<const double> W, std::span<double> out) const {
        transfer(W, out);
        for (std::size_t n = 0; n < W.size(); ++n) out[n] -= loss[n] * W[n];
    }
};

constexpr double kStabilityMargin = 2.0;

void check_dimension(const WealthState& s, const FinanceParams& p) {
    if (s.W.size() != p.grid.size())
        throw Error("finance: state has " + std::to_string(s.W.size()) + " shells but grid has " +
                    std::to_string(p.grid.size()));
}

std::vector<double> rhs_in_mode(const WealthState& s, const FinanceParams& p, FinanceMode mode) {
    check_dimension(s, p);
    FinanceParams q = p;
    q.mode = mode;
    std::vector<double> out(s.W.size());
    FinanceKernel(q).rhs(s.W, out);
    return out;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

FinanceParams FinanceParams::from_config(const SimConfig& cfg) {
    const auto& s = params_as<FinanceSection>(cfg);
    FinanceParams p(cfg.grid.build());
    p.a = s.a;
    p.alpha = s.alpha;
    p.b = s.b;
    p.beta = s.beta;
    p.q = s.q;
    p.mode = s.mode;
    p.sink_law = s.sink_law;
    p.sink = s.sink;
    return p;
}

std::vector<double> finance_rhs_literal(const WealthState& state, const FinanceParams& p) {
    return rhs_in_mode(state, p, FinanceMode::literal);
}

std::vector<double> finance_rhs_fluxform(const WealthState& state, const FinanceParams& p) {
    return rhs_in_mode(state, p, FinanceMode::flux_form);
}

std::vector<double> finance_rhs(const WealthState& state, const FinanceParams& p) {
    return rhs_in_mode(state, p, p.mode);
}

double sink_outflow(const WealthState& state, const FinanceParams& p) {
    check_dimension(state, p);
    return FinanceKernel(p).sink(state.W);
}

std::vector<double> budget_flux(const WealthState& state, const FinanceParams& p) {
    const auto dW = finance_rhs(state, p);
    const FinanceKernel kernel(p);
    std::vector<double> out(state.W.size() - 1);
    double acc = p.q;
    for (std::size_t n = 0; n + 1 < state.W.size(); ++n) {
        acc -= kernel.loss[n] * state.W[n] + dW[n];
        out[n] = acc;
    }
    return out;
}

std::vector<double> money_flux(const WealthState& state, const FinanceParams& p) {
    check_dimension(state, p);
    if (p.mode == FinanceMode::literal) return budget_flux(state, p);
    const FinanceKernel kernel(p);
    std::vector<double> out(state.W.size() - 1);
    for (std::size_t n = 0; n + 1 < state.W.size(); ++n) out[n] = kernel.coupling[n] * state.W[n] * state.W[n + 1];
    return out;
}

ShellFluxes shell_fluxes(const WealthState& state, const FinanceParams& p) {
    const auto interior = money_flux(state, p);
    const std::size_t N = state.W.size();
    ShellFluxes f;
    f.left.resize(N);
    f.right.resize(N);
    f.left[0] = p.q;
    for (std::size_t n = 0; n + 1 < N; ++n) {
        f.right[n] = interior[n];
        f.left[n + 1] = interior[n];
    }
    f.right[N - 1] = sink_outflow(state, p);
    return f;
}

double steady_residual(const WealthState& state, const FinanceParams& p) {
    const auto dW = finance_rhs(state, p);
    return norm2(dW) / std::max(norm2(state.W), 1.0);
}

SteadyStateReport run_to_steady_state(const SimConfig& cfg) {
    if (cfg.model != ModelKind::finance) throw ConfigError("model", "run_to_steady_state requires model = finance");
    const auto& sec = params_as<FinanceSection>(cfg);
    const FinanceParams p = FinanceParams::from_config(cfg);
    const FinanceKernel kernel(p);
    const auto& in = cfg.integrator;
    const std::size_t N = p.grid.size();

    SteadyStateReport rep;
    WealthState& s = rep.W_star;
    s.W.assign(N, sec.w_init);
    Rk4Stepper<double> stepper(N);
    std::vector<double> dW(N);

    auto residual = [&] {
        kernel.rhs(s.W, dW);
        return norm2(dW) / std::max(norm2(s.W), 1.0);
    };

    const auto check_every = static_cast<std::uint64_t>(in.sample_every);
    rep.residual_norm = residual();
    const double loss_rate =
        in.scheme == TimeScheme::rk4 ? *std::max_element(kernel.loss.begin(), kernel.loss.end()) : 0.0;
    std::uint64_t step = 0;
    while (s.t < in.t_end * (1.0 - 1e-12)) {
        // Explicit stages must resolve the fastest exchange rate; the loss
        // term is integrated exactly and does not limit dt.
        const double h = std::min({in.dt, in.t_end - s.t, kStabilityMargin / (kernel.max_rate(s.W) + loss_rate)});
        if (in.scheme == TimeScheme::if_rk4)
            stepper.step_integrating_factor(s.W, h, kernel.loss,
                                            [&](auto w, auto out) { kernel.transfer(w, out); });
        else
            stepper.step(s.W, h, [&](auto w, auto out) { kernel.rhs(w, out); });
        s.t += h;
        rep.steps = ++step;
        if (h < in.dt) ++rep.limited;

        for (double& w : s.W) {
            if (!std::isfinite(w) || w > 1e150)
                throw DivergedError(step, "finance integration diverged at step " + std::to_string(step) +
                                              " (t=" + std::to_string(s.t) + "); unbounded shell wealth");
            if (w < 0.0) {
                w = 0.0;
                ++rep.clamped;
            }
        }
        if (step % check_every == 0 || s.t >= in.t_end * (1.0 - 1e-12)) {
            rep.residual_norm = residual();
            if (rep.residual_norm < in.steady_tol) {
                rep.converged = true;
                break;
            }
        }
    }
    rep.flux = money_flux(s, p);
    return rep;
}

EntityWealth entity_wealth(const WealthState& state, const ShellGrid& grid) {
    if (state.W.size() != grid.size()) throw Error("entity_wealth: state and grid differ in size");
    EntityWealth e;
    e.k = grid.wavenumbers();
    e.wealth.resize(e.k.size());
    e.entities.resize(e.k.size());
    for (std::size_t n = 0; n < e.k.size(); ++n) {
        e.entities[n] = 2.0 * std::numbers::pi * e.k[n];
        e.wealth[n] = state.W[n] / e.entities[n];
    }
    return e;
}

WealthDistribution wealth_distribution(const WealthState& state, const ShellGrid& grid) {
    const auto e = entity_wealth(state, grid);
    std::vector<std::size_t> idx;
    for (std::size_t n = 0; n < e.k.size(); ++n)
        if (e.wealth[n] > 0.0) idx.push_back(n);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return e.wealth[a] < e.wealth[b]; });
    WealthDistribution d;
    for (auto n : idx) {
        d.wealth.push_back(e.wealth[n]);
        d.count.push_back(e.entities[n]);
    }
    return d;
}

PredictedExponents predicted_exponent(double alpha) {
    const double denom = alpha + 2.0;
    if (denom == 0.0) throw DomainError("predicted_exponent: alpha = -2 makes the exponent degenerate");
    return {-2.0 / denom, 1.0 / denom};
}

std::vector<TreeLevel> tree_cascade(std::size_t levels, std::size_t branching, double q, double pilferage) {
    if (levels < 1) throw DomainError("tree_cascade: need at least one level");
    if (branching < 2) throw DomainError("tree_cascade: branching must be at least 2");
    if (!(pilferage >= 0.0 && pilferage < 1.0)) throw DomainError("tree_cascade: pilferage must lie in [0, 1)");
    if (static_cast<double>(levels) * std::log2(static_cast<double>(branching)) >= 63.0)
        throw DomainError("tree_cascade: node count overflows");

    std::vector<TreeLevel> out;
    std::uint64_t nodes = 1;
    double budget = q;
    for (std::size_t l = 0; l <= levels; ++l) {
        out.push_back({l, nodes, budget, budget / static_cast<double>(nodes)});
        nodes *= branching;
        budget *= 1.0 - pilferage;
    }
    return out;
}

} // namespace cascade
