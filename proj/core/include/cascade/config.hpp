#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cascade/grid.hpp"

namespace cascade {

enum class ModelKind { goy, finance, equilibrium, pao, tree };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

enum class TimeScheme { rk4, if_rk4 };

struct GridSpec {
    double k0 = 1.0;
    double lambda = 2.0;
    std::int64_t n_shells = 22;

    ShellGrid build() const { return ShellGrid(k0, lambda, static_cast<std::size_t>(n_shells)); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct IntegratorSpec {
    double dt = 1e-4;
    double t_end = 200.0;
    double transient_fraction = 0.5;
    TimeScheme scheme = TimeScheme::if_rk4;
    // Steps between spectrum/flux samples (goy) or steady-state checks (finance).
    std::int64_t sample_every = 10;
    double steady_tol = 1e-8;
    friend bool operator==(const IntegratorSpec&, const IntegratorSpec&) = default;
};

struct ForcingTerm {
    std::int64_t shell = 0;
    std::complex<double> amplitude;
    friend bool operator==(const ForcingTerm&, const ForcingTerm&) = default;
};

struct GoySection {
    double a1 = 1.0;
    double a2 = -0.5;
    double a3 = -0.5;
    double nu = 1e-7;
    std::vector<ForcingTerm> forcing{{1, {5e-3, 5e-3}}, {2, {5e-3, 5e-3}}};
    // Initial |u_n| = init_amplitude * k_n^{-1/3} with seeded random phases,
    // on shells below init_shells; zero above.
    double init_amplitude = 1e-2;
    std::int64_t init_shells = 8;
    double plateau_tol = 0.05;
    friend bool operator==(const GoySection&, const GoySection&) = default;
};

enum class FinanceMode { literal, flux_form };
enum class SinkLaw { linear, outflow };

struct FinanceSection {
    double a = 1.0;
    double alpha = -1.0;
    double b = 0.0;
    double beta = 2.0;
    double q = 1.0;
    FinanceMode mode = FinanceMode::flux_form;
    SinkLaw sink_law = SinkLaw::outflow;
    double sink = 10.0;
    double w_init = 0.1;
    friend bool operator==(const FinanceSection&, const FinanceSection&) = default;
};

struct EquilibriumSection {
    std::int64_t n_agents = 10000;
    double mean_wealth = 1.0;
    std::int64_t n_steps = 10'000'000;
    std::int64_t n_bins = 50;
    friend bool operator==(const EquilibriumSection&, const EquilibriumSection&) = default;
};

struct PaoSection {
    double k_ko = 1.6;
    double eps_u = 1.0;
    double nu = 1e-4;
    // Curves span [k_min_factor, k_max_factor] * k_d on a log grid.
    double k_min_factor = 0.01;
    double k_max_factor = 10.0;
    std::int64_t n_points = 50;
    friend bool operator==(const PaoSection&, const PaoSection&) = default;
};

struct TreeSection {
    std::int64_t levels = 3;
    std::int64_t branching = 3;
    double budget = 1.0;
    double pilferage = 0.0;
    friend bool operator==(const TreeSection&, const TreeSection&) = default;
};

using ModelParams = std::variant<GoySection, FinanceSection, EquilibriumSection, PaoSection, TreeSection>;

struct OutputSpec {
    std::filesystem::path dir = "out";
    bool emit_plots = false;
    bool write_energy = true;
    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct SimConfig {
    ModelKind model = ModelKind::goy;
    GridSpec grid;
    IntegratorSpec integrator;
    ModelParams params = GoySection{};
    std::uint64_t seed = 42;
    OutputSpec output;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Violation {
    std::string key;
    std::string message;
    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Defaults for `model`, including the model-dependent integrator horizon.
SimConfig default_config(ModelKind model);

std::vector<Violation> validate_config(const SimConfig& cfg);

/// Parses config text. Throws ConfigError on malformed input, unknown keys,
/// a parameter section that does not belong to the model, or any violation.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// Serializes every field; parse_config(to_config_text(c)) == c.
std::string to_config_text(const SimConfig& cfg);

/// Applies "section.key=value" (or "key=value" for top-level keys) on top
/// of an existing config. Used for sweeps and command-line overrides.
SimConfig with_override(const SimConfig& cfg, std::string_view dotted_key, std::string_view value);

template <class T>
const T& params_as(const SimConfig& cfg) {
    return std::get<T>(cfg.params);
}

} // namespace cascade
