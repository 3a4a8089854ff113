#include "cascade/output.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "cascade/error.hpp"
#include "cascade/format.hpp"

namespace cascade {

std::string csv_cell(double x) { return format_double(x); }
std::string csv_cell(std::uint64_t x) { return std::to_string(x); }

std::string to_csv_text(const CsvTable& table) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw Error("csv: row width does not match header");
        line(row);
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    const std::string text = to_csv_text(table);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("failed writing " + path.string());
}

CsvTable goy_spectrum_table(const GoyRunResult& run) {
    CsvTable t{{"n", "k", "E_avg", "Pi_avg", "n_samples"}, {}};
    for (std::size_t n = 0; n < run.spectrum.k.size(); ++n)
        t.rows.push_back({csv_cell(std::uint64_t{n}), csv_cell(run.spectrum.k[n]), csv_cell(run.spectrum.value[n]),
                          csv_cell(run.flux.value[n]), csv_cell(std::uint64_t{run.spectrum.n_samples})});
    return t;
}

CsvTable goy_energy_table(const GoyRunResult& run) {
    CsvTable t{{"t", "E_total"}, {}};
    for (const auto& [time, e] : run.energy) t.rows.push_back({csv_cell(time), csv_cell(e)});
    return t;
}

CsvTable pao_curves_table(const std::vector<PaoCurvePoint>& curves) {
    CsvTable t{{"k", "E_kolmogorov", "E_pao", "Pi_pao", "residual"}, {}};
    for (const auto& c : curves)
        t.rows.push_back({csv_cell(c.k), csv_cell(c.e_kolmogorov), csv_cell(c.e_pao), csv_cell(c.pi_pao),
                          csv_cell(c.residual)});
    return t;
}

CsvTable finance_steady_table(const SteadyStateReport& report, const FinanceParams& params) {
    const auto ent = entity_wealth(report.W_star, params.grid);
    const auto fl = shell_fluxes(report.W_star, params);
    CsvTable t{{"n", "k", "W_shell", "W_entity", "n_k", "flux_left", "flux_right"}, {}};
    for (std::size_t n = 0; n < ent.k.size(); ++n)
        t.rows.push_back({csv_cell(std::uint64_t{n}), csv_cell(ent.k[n]), csv_cell(report.W_star.W[n]),
                          csv_cell(ent.wealth[n]), csv_cell(ent.entities[n]), csv_cell(fl.left[n]),
                          csv_cell(fl.right[n])});
    return t;
}

CsvTable finance_distribution_table(const WealthDistribution& dist) {
    CsvTable t{{"W", "n_of_W"}, {}};
    for (std::size_t i = 0; i < dist.wealth.size(); ++i)
        t.rows.push_back({csv_cell(dist.wealth[i]), csv_cell(dist.count[i])});
    return t;
}

CsvTable tree_cascade_table(const std::vector<TreeLevel>& levels) {
    CsvTable t{{"level", "nodes", "level_budget", "per_node_wealth"}, {}};
    for (const auto& l : levels)
        t.rows.push_back({csv_cell(std::uint64_t{l.level}), csv_cell(l.nodes), csv_cell(l.level_budget),
                          csv_cell(l.per_node_wealth)});
    return t;
}

CsvTable equilibrium_hist_table(const ExchangeResult& run) {
    CsvTable t{{"bin_left", "bin_right", "count", "pdf_estimate", "gibbs_reference"}, {}};
    const auto& h = run.histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        t.rows.push_back({csv_cell(h.edges[b]), csv_cell(h.edges[b + 1]), csv_cell(std::uint64_t{h.counts[b]}),
                          csv_cell(run.pdf_estimate[b]), csv_cell(run.gibbs_reference[b])});
    return t;
}

void write_fits_json(const std::filesystem::path& path, const FitTable& fits) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [name, f] : fits) {
        j[name] = {{"slope", f.slope},
                   {"intercept", f.intercept},
                   {"slope_stderr", f.slope_stderr},
                   {"r_squared", f.r_squared},
                   {"range_used", {f.range_used.first, f.range_used.second}},
                   {"n_points", f.n_points}};
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

FitTable read_fits_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    FitTable fits;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& [name, v] : j.items()) {
            FitResult f;
            f.slope = v.at("slope").get<double>();
            f.intercept = v.at("intercept").get<double>();
            f.slope_stderr = v.at("slope_stderr").is_null() ? 0.0 : v.at("slope_stderr").get<double>();
            f.r_squared = v.at("r_squared").get<double>();
            f.range_used = {v.at("range_used").at(0).get<double>(), v.at("range_used").at(1).get<double>()};
            f.n_points = v.at("n_points").get<std::size_t>();
            fits.emplace(name, f);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed fits file " + path.string() + ": " + e.what());
    }
    return fits;
}

} // namespace cascade
