#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cascade {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    // Criterion 9 writes two runs' artifacts here.
    std::filesystem::path scratch_dir = std::filesystem::temp_directory_path() / "cascade-verify";
    std::uint64_t seed = 42;
    // Empty means all of 1..9.
    std::vector<int> only;
};

inline constexpr int kCriterionCount = 9;

CriterionResult check_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// "PASS  [4] finance scaling chain: ... (0.8 s)"
std::string format_result_line(const CriterionResult& r);

} // namespace cascade
