#pragma once

#include <string>

#include "cascade/manifest.hpp"
#include "cascade/output.hpp"

namespace cascade {

/// Gnuplot script for the run described by `m`: flux against k and the
/// spectrum or distribution on log axes, with fitted slopes in the titles.
/// Reads only CSVs listed in the manifest; throws Error if one it needs is
/// missing from the list.
std::string plot_script(const RunManifest& m, const FitTable& fits);

/// File name the runner gives the script, e.g. "plot_goy.gp".
std::string plot_script_name(const std::string& model);

} // namespace cascade
