#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "cascade/error.hpp"
#include "cascade/format.hpp"
#include "cascade/manifest.hpp"
#include "cascade/output.hpp"
#include "cascade/plots.hpp"
#include "cascade/runner.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "cascade_test_output" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

// Short configs that still exercise every writer.
SimConfig quick(ModelKind m, const fs::path& dir) {
    auto cfg = default_config(m);
    cfg.output.dir = dir;
    cfg.output.emit_plots = true;
    if (m == ModelKind::goy) cfg.integrator.t_end = 2.0;
    if (m == ModelKind::finance) std::get<FinanceSection>(cfg.params).alpha = -0.5;
    if (m == ModelKind::equilibrium) std::get<EquilibriumSection>(cfg.params).n_steps = 200'000;
    return cfg;
}

const ModelKind kModels[] = {ModelKind::goy, ModelKind::finance, ModelKind::equilibrium, ModelKind::pao,
                             ModelKind::tree};

} // namespace

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(-2.5e-7), "-2.5e-07");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10000; ++i) {
        const auto bits = rng();
        double x;
        std::memcpy(&x, &bits, sizeof x);
        if (!std::isfinite(x)) continue;
        double back = 0.0;
        ASSERT_TRUE(parse_double(format_double(x), back)) << format_double(x);
        EXPECT_EQ(std::memcmp(&x, &back, sizeof x), 0) << format_double(x);
    }
}

TEST(Csv, TextLayout) {
    const CsvTable t{{"a", "b"}, {{csv_cell(1.0), csv_cell(std::uint64_t{7})}, {csv_cell(0.25), "x"}}};
    EXPECT_EQ(to_csv_text(t), "a,b\n1,7\n0.25,x\n");
    const CsvTable bad{{"a", "b"}, {{"1"}}};
    EXPECT_THROW(to_csv_text(bad), Error);
}

TEST(Csv, HeadersPerModel) {
    const auto dir = scratch("headers");
    const std::map<std::string, std::string> expected{
        {"goy_spectrum.csv", "n,k,E_avg,Pi_avg,n_samples"},
        {"goy_energy.csv", "t,E_total"},
        {"pao_curves.csv", "k,E_kolmogorov,E_pao,Pi_pao,residual"},
        {"finance_steady.csv", "n,k,W_shell,W_entity,n_k,flux_left,flux_right"},
        {"finance_distribution.csv", "W,n_of_W"},
        {"tree_cascade.csv", "level,nodes,level_budget,per_node_wealth"},
        {"equilibrium_hist.csv", "bin_left,bin_right,count,pdf_estimate,gibbs_reference"},
    };
    std::set<std::string> seen;
    for (auto m : kModels) {
        const auto out = run_and_write(quick(m, dir / std::string(to_string(m))));
        for (const auto& f : out.manifest.files) {
            if (!f.ends_with(".csv")) continue;
            ASSERT_TRUE(expected.contains(f)) << f;
            EXPECT_EQ(first_line(out.dir / f), expected.at(f));
            seen.insert(f);
        }
    }
    EXPECT_EQ(seen.size(), expected.size());
}

TEST(Manifest, ListsExactlyWhatWasWritten) {
    const auto dir = scratch("manifest");
    for (auto m : kModels) {
        const auto sub = dir / std::string(to_string(m));
        const auto out = run_and_write(quick(m, sub));
        const auto back = read_manifest(sub / "manifest.json");
        EXPECT_TRUE(missing_files(back, sub).empty());
        std::set<std::string> listed(back.files.begin(), back.files.end());
        for (const auto& e : fs::directory_iterator(sub)) {
            const auto name = e.path().filename().string();
            if (name == "manifest.json") continue;
            EXPECT_TRUE(listed.contains(name)) << name;
        }
        EXPECT_EQ(back.model, to_string(m));
        EXPECT_EQ(back.seed, 42u);
        EXPECT_EQ(back.version, software_version());
        EXPECT_EQ(parse_config(back.config_text), quick(m, sub));
        EXPECT_EQ(back.files, out.manifest.files);
        EXPECT_EQ(back.diagnostics, out.manifest.diagnostics);
    }
}

TEST(Manifest, MissingFilesDetected) {
    const auto dir = scratch("missing");
    const auto out = run_and_write(quick(ModelKind::tree, dir));
    fs::remove(dir / "tree_cascade.csv");
    EXPECT_EQ(missing_files(read_manifest(dir / "manifest.json"), dir), std::vector<std::string>{"tree_cascade.csv"});
}

TEST(Manifest, TimestampShape) {
    const auto t = utc_timestamp();
    ASSERT_EQ(t.size(), 20u);
    EXPECT_EQ(t[4], '-');
    EXPECT_EQ(t[10], 'T');
    EXPECT_EQ(t.back(), 'Z');
}

TEST(Reproducibility, CsvBytesIdentical) {
    for (auto m : kModels) {
        const auto a = run_and_write(quick(m, scratch("repro_a")));
        const auto b = run_and_write(quick(m, scratch("repro_b")));
        for (const auto& f : a.manifest.files) {
            if (!f.ends_with(".csv") && f != "fits.json") continue;
            EXPECT_EQ(slurp(a.dir / f), slurp(b.dir / f)) << to_string(m) << " " << f;
        }
    }
}

TEST(Reproducibility, SeedChangesStochasticOutput) {
    auto cfg = quick(ModelKind::equilibrium, scratch("seed_a"));
    const auto a = run_and_write(cfg);
    cfg.seed = 7;
    cfg.output.dir = scratch("seed_b");
    const auto b = run_and_write(cfg);
    EXPECT_NE(slurp(a.dir / "equilibrium_hist.csv"), slurp(b.dir / "equilibrium_hist.csv"));
}

TEST(Fits, KeysAndJsonRoundTrip) {
    const auto dir = scratch("fits");
    const auto out = run_and_write(quick(ModelKind::finance, dir));
    EXPECT_TRUE(out.fits.contains("finance.nW.slope"));
    EXPECT_TRUE(out.fits.contains("finance.Wk.slope"));
    const auto back = read_fits_json(dir / "fits.json");
    ASSERT_EQ(back.size(), out.fits.size());
    for (const auto& [k, f] : out.fits) {
        const auto& g = back.at(k);
        EXPECT_EQ(g.slope, f.slope);
        EXPECT_EQ(g.intercept, f.intercept);
        EXPECT_EQ(g.r_squared, f.r_squared);
        EXPECT_EQ(g.range_used, f.range_used);
        EXPECT_EQ(g.n_points, f.n_points);
    }
}

TEST(PlotScript, ReferencesOnlyListedCsvs) {
    const auto dir = scratch("plots");
    for (auto m : {ModelKind::finance, ModelKind::pao, ModelKind::goy, ModelKind::equilibrium, ModelKind::tree}) {
        const auto sub = dir / std::string(to_string(m));
        const auto out = run_and_write(quick(m, sub));
        const auto name = plot_script_name(std::string(to_string(m)));
        ASSERT_TRUE(fs::exists(sub / name));
        const auto text = slurp(sub / name);
        std::set<std::string> listed(out.manifest.files.begin(), out.manifest.files.end());
        bool any = false;
        for (std::size_t pos = text.find(".csv"); pos != std::string::npos; pos = text.find(".csv", pos + 1)) {
            const auto start = text.find_last_of("'\" ", pos) + 1;
            const auto file = text.substr(start, pos + 4 - start);
            EXPECT_TRUE(listed.contains(file)) << file;
            any = true;
        }
        EXPECT_TRUE(any);
    }
}

TEST(PlotScript, FinanceAndPaoContent) {
    const auto fin = run_and_write(quick(ModelKind::finance, scratch("plot_fin")));
    const auto t = plot_script(fin.manifest, fin.fits);
    EXPECT_NE(t.find("finance_distribution.csv"), std::string::npos);
    EXPECT_NE(t.find("logscale"), std::string::npos);
    const auto pao = run_and_write(quick(ModelKind::pao, scratch("plot_pao")));
    const auto p = plot_script(pao.manifest, pao.fits);
    EXPECT_NE(p.find("E_kolmogorov"), std::string::npos);
    EXPECT_NE(p.find("E_pao"), std::string::npos);
}

TEST(PlotScript, MissingCsvIsAnError) {
    const auto out = run_and_write(quick(ModelKind::finance, scratch("plot_missing")));
    auto m = out.manifest;
    std::erase(m.files, "finance_distribution.csv");
    EXPECT_THROW(plot_script(m, out.fits), Error);
}

TEST(Sweep, ParseAxis) {
    const auto a = parse_sweep_axis("finance.alpha=-1, -0.5,0");
    EXPECT_EQ(a.key, "finance.alpha");
    EXPECT_EQ(a.values, (std::vector<std::string>{"-1", "-0.5", "0"}));
    EXPECT_THROW(parse_sweep_axis("finance.alpha"), ConfigError);
    EXPECT_THROW(parse_sweep_axis("=1,2"), ConfigError);
    EXPECT_THROW(parse_sweep_axis("finance.alpha=1,,2"), ConfigError);
}

TEST(Sweep, CartesianExpansion) {
    auto base = default_config(ModelKind::finance);
    base.output.dir = "out/sweep";
    const auto pts =
        expand_sweep(base, {parse_sweep_axis("finance.alpha=-1,0"), parse_sweep_axis("finance.q=1,2,4")});
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_EQ(params_as<FinanceSection>(pts[0].cfg).alpha, -1.0);
    EXPECT_EQ(params_as<FinanceSection>(pts[2].cfg).q, 4.0);
    EXPECT_EQ(params_as<FinanceSection>(pts[3].cfg).alpha, 0.0);
    std::set<std::string> labels;
    for (const auto& p : pts) {
        EXPECT_EQ(p.cfg.output.dir.parent_path(), base.output.dir);
        labels.insert(p.label);
    }
    EXPECT_EQ(labels.size(), 6u);
    EXPECT_THROW(expand_sweep(base, {parse_sweep_axis("goy.nu=1")}), ConfigError);
}

TEST(Sweep, RunsEveryPointAndListsFiles) {
    auto base = quick(ModelKind::tree, scratch("sweep_run"));
    const auto out = run_sweep(base, {parse_sweep_axis("tree.pilferage=0,0.25,0.5"), parse_sweep_axis("tree.levels=2,4")}, 3);
    const auto m = read_manifest(base.output.dir / "manifest.json");
    EXPECT_TRUE(missing_files(m, base.output.dir).empty());
    EXPECT_EQ(std::get<std::int64_t>(m.diagnostics.at("sweep.points")), 6);
    EXPECT_EQ(out.fits.size(), 6u);

    // Threaded and serial sweeps write the same bytes.
    auto serial = base;
    serial.output.dir = scratch("sweep_serial");
    run_sweep(serial, {parse_sweep_axis("tree.pilferage=0,0.25,0.5"), parse_sweep_axis("tree.levels=2,4")}, 1);
    for (const auto& f : m.files) {
        if (!f.ends_with(".csv")) continue;
        EXPECT_EQ(slurp(base.output.dir / f), slurp(serial.output.dir / f)) << f;
    }
}

TEST(Sweep, FailurePropagates) {
    auto base = quick(ModelKind::tree, scratch("sweep_fail"));
    EXPECT_THROW(run_sweep(base, {parse_sweep_axis("tree.pilferage=0,1.5")}, 2), ConfigError);
}
