#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cascade {

/// Per-shell samples of a spectrum or flux over the wavenumber ladder.
struct SpectrumSeries {
    std::vector<double> k;
    std::vector<double> value;
    std::size_t n_samples = 0;
};

enum class BinScheme { linear, log };

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    BinScheme scheme = BinScheme::linear;

    std::size_t total() const;
    double width(std::size_t bin) const { return edges[bin + 1] - edges[bin]; }
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> range_used{0.0, 0.0};
    std::size_t n_points = 0;
};

/// Abscissa window [lo, hi], inclusive. An empty optional means "all points".
using FitRange = std::optional<std::pair<double, double>>;

/// Geometric bins spanning [min, max] of the samples; bins are half-open
/// except the last, which is closed.
Histogram log_binned_histogram(std::span<const double> samples, std::size_t n_bins);

/// Equal-width bins over [lo, hi], same boundary convention. Samples outside
/// the interval are dropped.
Histogram linear_histogram(std::span<const double> samples, std::size_t n_bins, double lo, double hi);

/// Ordinary least squares of y on x.
FitResult linear_fit(std::span<const double> x, std::span<const double> y, FitRange range = std::nullopt);

/// OLS on (ln x, ln y); the slope is the power-law exponent.
FitResult loglog_fit(std::span<const double> x, std::span<const double> y, FitRange range = std::nullopt);

/// OLS on (x, ln y); the slope is the exponential rate.
FitResult semilog_fit(std::span<const double> x, std::span<const double> y, FitRange range = std::nullopt);

/// Maximal contiguous window of boundary indices n where |flux_n / flux_ref - 1| < tol,
/// flux_ref being the median flux over the candidate boundaries
/// (those past the last forced shell and before the final shell). Throws
/// FitError when no window reaches four shells.
std::pair<std::size_t, std::size_t> inertial_range_select(const SpectrumSeries& flux,
                                                          std::span<const std::size_t> forced_shells,
                                                          double tol = 0.1);

} // namespace cascade
