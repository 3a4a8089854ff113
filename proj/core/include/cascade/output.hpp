#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cascade/equilibrium.hpp"
#include "cascade/finance.hpp"
#include "cascade/goy.hpp"
#include "cascade/pao.hpp"
#include "cascade/statfit.hpp"

namespace cascade {

/// Text cells, formatted once so that writing is a pure function of the data.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string csv_cell(double x);
std::string csv_cell(std::uint64_t x);

/// Writes with '\n' line endings and no trailing whitespace. Throws Error if
/// the file cannot be written.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
std::string to_csv_text(const CsvTable& table);

CsvTable goy_spectrum_table(const GoyRunResult& run);
CsvTable goy_energy_table(const GoyRunResult& run);
CsvTable pao_curves_table(const std::vector<PaoCurvePoint>& curves);
CsvTable finance_steady_table(const SteadyStateReport& report, const FinanceParams& params);
CsvTable finance_distribution_table(const WealthDistribution& dist);
CsvTable tree_cascade_table(const std::vector<TreeLevel>& levels);
CsvTable equilibrium_hist_table(const ExchangeResult& run);

/// Fits keyed by quantity name, e.g. "goy.spectrum.slope".
using FitTable = std::map<std::string, FitResult>;

void write_fits_json(const std::filesystem::path& path, const FitTable& fits);
FitTable read_fits_json(const std::filesystem::path& path);

} // namespace cascade
