#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cascade/acceptance.hpp"
#include "cascade/config.hpp"
#include "cascade/error.hpp"
#include "cascade/runner.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kRuntime = 2, kVerifyFailed = 3 };

struct RunFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sweeps;
    std::vector<std::string> sets;
    bool emit_plots = false;
    unsigned threads = 0;
};

void add_run_flags(CLI::App* sub, RunFlags& f) {
    sub->add_option("--config", f.config, "Config file (defaults apply when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory (overrides output.dir)");
    sub->add_option("--seed", f.seed, "RNG seed (overrides seed)");
    sub->add_option("--sweep", f.sweeps, "KEY=v1,v2,... ; repeat for a cartesian product")->take_all();
    sub->add_option("--set", f.sets, "KEY=VALUE override, applied after the config file");
    sub->add_flag("--emit-plots", f.emit_plots, "Write a gnuplot script next to the CSVs");
    sub->add_option("--threads", f.threads, "Worker threads for sweeps (0 = hardware)");
}

cascade::SimConfig build_config(cascade::ModelKind model, const RunFlags& f) {
    using namespace cascade;
    SimConfig cfg = f.config.empty() ? default_config(model) : load_config(f.config);
    if (cfg.model != model)
        throw ConfigError("model", "config " + f.config + " is for model " + std::string(to_string(cfg.model)) +
                                       ", not " + std::string(to_string(model)));
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set", "--set expects KEY=VALUE, got '" + s + "'");
        cfg = with_override(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!f.out.empty()) cfg.output.dir = f.out;
    if (f.seed) cfg.seed = *f.seed;
    if (f.emit_plots) cfg.output.emit_plots = true;
    return cfg;
}

void print_outcome(const cascade::RunOutcome& r) {
    std::cout << "wrote " << r.manifest.files.size() << " files to " << r.dir.string() << "\n";
    for (const auto& [name, fit] : r.fits)
        std::printf("  %-40s slope %+.6f  r2 %.6f  n=%zu\n", name.c_str(), fit.slope, fit.r_squared, fit.n_points);
}

int run_model(cascade::ModelKind model, const RunFlags& f) {
    auto cfg = build_config(model, f);
    if (f.sweeps.empty()) {
        print_outcome(cascade::run_and_write(cfg));
        return kOk;
    }
    std::vector<cascade::SweepAxis> axes;
    for (const auto& s : f.sweeps) axes.push_back(cascade::parse_sweep_axis(s));
    print_outcome(cascade::run_sweep(cfg, axes, f.threads));
    return kOk;
}

int run_verify(const cascade::AcceptanceOptions& opts) {
    bool all = true;
    for (int id : opts.only.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9} : opts.only) {
        const auto r = cascade::check_criterion(id, opts);
        std::cout << cascade::format_result_line(r) << std::endl;
        all = all && r.passed;
    }
    std::cout << (all ? "all acceptance criteria passed" : "acceptance suite FAILED") << "\n";
    return all ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turbulence and finance cascade laboratory"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", CASCADE_VERSION);

    RunFlags flags;
    struct Sub {
        const char* name;
        cascade::ModelKind model;
        const char* help;
    };
    const Sub subs[] = {
        {"goy", cascade::ModelKind::goy, "Integrate the GOY shell model and fit its inertial range"},
        {"finance", cascade::ModelKind::finance, "Relax the finance shell model to steady state"},
        {"equilibrium", cascade::ModelKind::equilibrium, "Run the kinetic wealth-exchange baseline"},
        {"pao", cascade::ModelKind::pao, "Tabulate the Kolmogorov and Pao closed forms"},
        {"tree", cascade::ModelKind::tree, "Hand a budget down a fiscal tree"},
    };
    std::vector<std::pair<CLI::App*, cascade::ModelKind>> model_cmds;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_run_flags(sub, flags);
        model_cmds.emplace_back(sub, s.model);
    }

    cascade::AcceptanceOptions vopts;
    std::string scratch;
    auto* verify = app.add_subcommand("verify", "Run the acceptance suite; exit 3 if any criterion fails");
    verify->add_option("--only", vopts.only, "Criterion ids to run (default: all)")
        ->check(CLI::Range(1, cascade::kCriterionCount))
        ->delimiter(',');
    verify->add_option("--scratch", scratch, "Directory for the reproducibility runs");
    verify->add_option("--seed", vopts.seed, "Seed for the stochastic criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (verify->parsed()) {
            if (!scratch.empty()) vopts.scratch_dir = scratch;
            return run_verify(vopts);
        }
        for (const auto& [sub, model] : model_cmds)
            if (sub->parsed()) return run_model(model, flags);
    } catch (const cascade::ConfigError& e) {
        std::cerr << "cascade-lab: invalid configuration";
        if (!e.key().empty()) std::cerr << " (" << e.key() << ")";
        std::cerr << ": " << e.what() << "\n";
        return kInvalid;
    } catch (const cascade::DivergedError& e) {
        std::cerr << "cascade-lab: " << e.what() << "\n";
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "cascade-lab: " << e.what() << "\n";
        return kRuntime;
    }
    return kInvalid;
}
