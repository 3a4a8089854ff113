#include "cascade/runner.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <thread>

#include "cascade/analysis.hpp"
#include "cascade/equilibrium.hpp"
#include "cascade/error.hpp"
#include "cascade/finance.hpp"
#include "cascade/format.hpp"
#include "cascade/goy.hpp"
#include "cascade/pao.hpp"
#include "cascade/plots.hpp"

namespace cascade {

namespace {

namespace fs = std::filesystem;

// Below this coefficient of variation of E_total the forced GOY state is
// treated as a fixed point or cycle rather than turbulence.
constexpr double kLowVariability = 1e-3;

struct Artifacts {
    std::vector<std::string> files;
    FitTable fits;
    std::map<std::string, Diagnostic> diagnostics;

    void csv(const fs::path& dir, const std::string& name, const CsvTable& t) {
        write_csv(dir / name, t);
        files.push_back(name);
    }
};

void run_goy_model(const SimConfig& cfg, const fs::path& dir, Artifacts& a) {
    const auto run = run_goy(cfg);
    a.csv(dir, "goy_spectrum.csv", goy_spectrum_table(run));
    if (cfg.output.write_energy) a.csv(dir, "goy_energy.csv", goy_energy_table(run));

    a.diagnostics["goy.steps"] = static_cast<std::int64_t>(run.steps);
    a.diagnostics["goy.samples"] = static_cast<std::int64_t>(run.spectrum.n_samples);
    a.diagnostics["goy.mean_injection"] = run.mean_injection;
    a.diagnostics["goy.mean_dissipation"] = run.mean_dissipation;
    a.diagnostics["goy.energy_cv"] = run.energy_cv;
    a.diagnostics["goy.low_variability"] = run.energy_cv < kLowVariability;
    try {
        const auto an = analyze_goy(run, cfg);
        a.fits["goy.spectrum.slope"] = an.spectrum_fit;
        a.diagnostics["goy.window_lo"] = static_cast<std::int64_t>(an.window_lo);
        a.diagnostics["goy.window_hi"] = static_cast<std::int64_t>(an.window_hi);
        a.diagnostics["goy.flux_spread"] = an.flux_spread;
        if (an.pao) {
            a.diagnostics["goy.pao_k_ko"] = an.pao->k_ko;
            a.diagnostics["goy.pao_rms_log_residual"] = an.pao->rms_log_residual;
        }
    } catch (const FitError& e) {
        a.diagnostics["goy.window_error"] = std::string(e.what());
    }
}

void run_pao_model(const SimConfig& cfg, const fs::path& dir, Artifacts& a) {
    const auto& s = params_as<PaoSection>(cfg);
    const auto p = PaoParams::from_config(cfg);
    const double kd = p.k_d();
    const auto curves = pao_curves(p, s.k_min_factor * kd, s.k_max_factor * kd, static_cast<std::size_t>(s.n_points));
    a.csv(dir, "pao_curves.csv", pao_curves_table(curves));
    double worst = 0.0;
    for (const auto& c : curves) worst = std::max(worst, std::abs(c.residual));
    a.diagnostics["pao.k_d"] = kd;
    a.diagnostics["pao.max_abs_residual"] = worst;
    a.fits["pao.rolloff.semilog"] = pao_rolloff_fit(p);
}

void run_finance_model(const SimConfig& cfg, const fs::path& dir, Artifacts& a) {
    const auto p = FinanceParams::from_config(cfg);
    const auto rep = run_to_steady_state(cfg);
    a.csv(dir, "finance_steady.csv", finance_steady_table(rep, p));
    a.csv(dir, "finance_distribution.csv", finance_distribution_table(wealth_distribution(rep.W_star, p.grid)));

    a.diagnostics["finance.converged"] = rep.converged;
    a.diagnostics["finance.residual_norm"] = rep.residual_norm;
    a.diagnostics["finance.steps"] = static_cast<std::int64_t>(rep.steps);
    a.diagnostics["finance.t_final"] = rep.W_star.t;
    a.diagnostics["finance.clamped_steps"] = static_cast<std::int64_t>(rep.clamped);
    a.diagnostics["finance.limited_steps"] = static_cast<std::int64_t>(rep.limited);
    try {
        const auto an = analyze_finance(rep, p);
        a.fits["finance.Wk.slope"] = an.w_shell_fit;
        a.fits["finance.Wentity.slope"] = an.w_entity_fit;
        a.fits["finance.nW.slope"] = an.nw_fit;
        a.diagnostics["finance.flux_spread"] = an.flux_spread;
        if (an.predicted) {
            a.diagnostics["finance.predicted_nW_slope"] = an.predicted->n_of_w;
            a.diagnostics["finance.predicted_flux_exponent"] = an.predicted->flux;
        }
    } catch (const FitError& e) {
        a.diagnostics["finance.fit_error"] = std::string(e.what());
    }
}

void run_tree_model(const SimConfig& cfg, const fs::path& dir, Artifacts& a) {
    const auto& s = params_as<TreeSection>(cfg);
    const auto levels = tree_cascade(static_cast<std::size_t>(s.levels), static_cast<std::size_t>(s.branching),
                                     s.budget, s.pilferage);
    a.csv(dir, "tree_cascade.csv", tree_cascade_table(levels));
    if (levels.size() >= 3) a.fits["tree.count_vs_wealth.slope"] = analyze_tree(levels);
}

void run_equilibrium_model(const SimConfig& cfg, const fs::path& dir, Artifacts& a) {
    const auto run = run_exchange(cfg);
    a.csv(dir, "equilibrium_hist.csv", equilibrium_hist_table(run));
    if (run.ccdf_fit) {
        a.fits["equilibrium.ccdf.slope"] = *run.ccdf_fit;
        a.diagnostics["equilibrium.rate_times_mean"] = -run.ccdf_fit->slope * run.mean_wealth;
    }
    a.diagnostics["equilibrium.steps"] = static_cast<std::int64_t>(run.steps);
    a.diagnostics["equilibrium.initial_total"] = run.initial_total;
    a.diagnostics["equilibrium.final_total"] = run.final_total;
    a.diagnostics["equilibrium.relative_total_change"] =
        std::abs(run.final_total - run.initial_total) / run.initial_total;
    a.diagnostics["equilibrium.max_cached_total_drift"] = run.max_total_drift;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == '/' || c == '\\' || c == ' ' || c == ':') c = '_';
    return s;
}

} // namespace

RunOutcome run_and_write(const SimConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    out.dir = cfg.output.dir;
    out.manifest.started_at = utc_timestamp();
    fs::create_directories(out.dir);

    Artifacts a;
    switch (cfg.model) {
    case ModelKind::goy: run_goy_model(cfg, out.dir, a); break;
    case ModelKind::pao: run_pao_model(cfg, out.dir, a); break;
    case ModelKind::finance: run_finance_model(cfg, out.dir, a); break;
    case ModelKind::tree: run_tree_model(cfg, out.dir, a); break;
    case ModelKind::equilibrium: run_equilibrium_model(cfg, out.dir, a); break;
    }

    write_fits_json(out.dir / "fits.json", a.fits);
    a.files.push_back("fits.json");

    auto& m = out.manifest;
    m.model = std::string(to_string(cfg.model));
    m.seed = cfg.seed;
    m.config_text = to_config_text(cfg);
    m.version = software_version();
    m.diagnostics = std::move(a.diagnostics);
    m.files = a.files;
    if (cfg.output.emit_plots) {
        const std::string name = plot_script_name(m.model);
        const std::string text = plot_script(m, a.fits);
        std::ofstream f(out.dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + (out.dir / name).string());
        f << text;
        m.files.push_back(name);
    }
    m.finished_at = utc_timestamp();
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out.dir / "manifest.json", m);
    out.fits = std::move(a.fits);
    return out;
}

SweepAxis parse_sweep_axis(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("--sweep", "sweep must look like KEY=v1,v2,... (got '" + std::string(text) + "')");
    SweepAxis axis;
    axis.key = std::string(trim(text.substr(0, eq)));
    std::string_view rest = text.substr(eq + 1);
    while (true) {
        const auto comma = rest.find(',');
        const auto v = trim(rest.substr(0, comma));
        if (v.empty()) throw ConfigError(axis.key, "empty value in sweep over " + axis.key);
        axis.values.emplace_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return axis;
}

std::vector<SweepPoint> expand_sweep(const SimConfig& base, const std::vector<SweepAxis>& axes) {
    std::vector<SweepPoint> points{{"", base}};
    for (const auto& axis : axes) {
        std::vector<SweepPoint> next;
        for (const auto& p : points) {
            for (const auto& v : axis.values) {
                SweepPoint q{p.label.empty() ? "" : p.label + "_", with_override(p.cfg, axis.key, v)};
                q.label += sanitize(axis.key + "=" + v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    for (auto& p : points) p.cfg.output.dir = base.output.dir / p.label;
    return points;
}

RunOutcome run_sweep(const SimConfig& base, const std::vector<SweepAxis>& axes, unsigned threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_timestamp();
    auto points = expand_sweep(base, axes);
    std::vector<RunOutcome> results(points.size());
    std::vector<std::exception_ptr> errors(points.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(points.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                results[i] = run_and_write(points[i].cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunOutcome out;
    out.dir = base.output.dir;
    auto& m = out.manifest;
    m.model = std::string(to_string(base.model));
    m.seed = base.seed;
    m.config_text = to_config_text(base);
    m.version = software_version();
    m.started_at = started;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (const auto& f : results[i].manifest.files) m.files.push_back(points[i].label + "/" + f);
        m.files.push_back(points[i].label + "/manifest.json");
        for (const auto& [name, fit] : results[i].fits) out.fits[points[i].label + "/" + name] = fit;
    }
    m.diagnostics["sweep.points"] = static_cast<std::int64_t>(points.size());
    std::string keys;
    for (const auto& a : axes) keys += (keys.empty() ? "" : ",") + a.key;
    m.diagnostics["sweep.keys"] = keys;
    m.finished_at = utc_timestamp();
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out.dir / "manifest.json", m);
    return out;
}

} // namespace cascade
