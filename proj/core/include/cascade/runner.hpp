#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/manifest.hpp"
#include "cascade/output.hpp"

namespace cascade {

struct RunOutcome {
    RunManifest manifest;
    FitTable fits;
    std::filesystem::path dir;
};

/// Runs cfg.model and writes its CSVs, fits.json, the plot script when
/// output.emit_plots is set, and manifest.json into output.dir.
RunOutcome run_and_write(const SimConfig& cfg);

struct SweepAxis {
    std::string key; // dotted config key
    std::vector<std::string> values;
};

/// Parses "section.key=v1,v2,...". Throws ConfigError on malformed text.
SweepAxis parse_sweep_axis(std::string_view text);

struct SweepPoint {
    std::string label; // subdirectory name, e.g. "finance.alpha=-1"
    SimConfig cfg;
};

/// Cartesian product of the axes over `base`, first axis varying slowest.
/// Each point's output.dir is a subdirectory of base.output.dir.
std::vector<SweepPoint> expand_sweep(const SimConfig& base, const std::vector<SweepAxis>& axes);

/// Runs every point on up to `threads` workers, then writes a top-level
/// manifest listing each point's files. Rethrows the first failure (in point
/// order) after all workers have joined.
RunOutcome run_sweep(const SimConfig& base, const std::vector<SweepAxis>& axes, unsigned threads = 0);

} // namespace cascade
