#include "cascade/statfit.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include "cascade/error.hpp"

namespace cascade {

namespace {

std::size_t bin_index(const std::vector<double>& edges, double v) {
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    auto idx = static_cast<std::size_t>(std::distance(edges.begin(), it));
    const std::size_t n_bins = edges.size() - 1;
    return idx == 0 ? 0 : std::min(idx - 1, n_bins - 1);
}

enum class Transform { none, log, semilog };

FitResult fit_transformed(std::span<const double> x, std::span<const double> y, FitRange range, Transform t) {
    if (x.size() != y.size()) throw FitError("fit: x and y differ in length");
    std::vector<double> xs, ys;
    xs.reserve(x.size());
    ys.reserve(y.size());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (range && (x[i] < range->first || x[i] > range->second)) continue;
        double xv = x[i], yv = y[i];
        if (t == Transform::log) {
            if (!(xv > 0.0) || !(yv > 0.0)) throw FitError("fit: nonpositive data in log-log fit");
            xv = std::log(xv);
            yv = std::log(yv);
        } else if (t == Transform::semilog) {
            if (!(yv > 0.0)) throw FitError("fit: nonpositive ordinate in semi-log fit");
            yv = std::log(yv);
        }
        if (!std::isfinite(xv) || !std::isfinite(yv)) throw FitError("fit: non-finite data");
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
        xs.push_back(xv);
        ys.push_back(yv);
    }
    const std::size_t n = xs.size();
    if (n < 3) throw FitError("fit: insufficient points (" + std::to_string(n) + " in range, need 3)");

    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw FitError("fit: abscissa has zero spread in range");

    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (r.intercept + r.slope * xs[i]);
        ss_res += e * e;
    }
    r.slope_stderr = n > 2 ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;
    // A constant ordinate is fitted perfectly by a zero slope.
    r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    r.range_used = {lo, hi};
    r.n_points = n;
    return r;
}

} // namespace

std::size_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Histogram log_binned_histogram(std::span<const double> samples, std::size_t n_bins) {
    if (samples.empty()) throw FitError("histogram: empty input");
    if (n_bins < 2) throw FitError("histogram: need at least 2 bins");
    for (double s : samples)
        if (!(s > 0.0)) throw FitError("histogram: nonpositive sample with log binning");
    const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) throw FitError("histogram: degenerate range (all samples equal)");

    Histogram h;
    h.scheme = BinScheme::log;
    h.edges.resize(n_bins + 1);
    const double ratio = mx / mn;
    for (std::size_t i = 0; i <= n_bins; ++i)
        h.edges[i] = mn * std::pow(ratio, static_cast<double>(i) / static_cast<double>(n_bins));
    h.edges.front() = mn;
    h.edges.back() = mx;
    h.counts.assign(n_bins, 0);
    for (double s : samples) ++h.counts[bin_index(h.edges, s)];
    return h;
}

Histogram linear_histogram(std::span<const double> samples, std::size_t n_bins, double lo, double hi) {
    if (n_bins < 1) throw FitError("histogram: need at least 1 bin");
    if (!(hi > lo)) throw FitError("histogram: degenerate range");
    Histogram h;
    h.scheme = BinScheme::linear;
    h.edges.resize(n_bins + 1);
    const double w = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = lo + w * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(n_bins, 0);
    for (double s : samples) {
        if (s < lo || s > hi) continue;
        ++h.counts[bin_index(h.edges, s)];
    }
    return h;
}

FitResult linear_fit(std::span<const double> x, std::span<const double> y, FitRange range) {
    return fit_transformed(x, y, range, Transform::none);
}

FitResult loglog_fit(std::span<const double> x, std::span<const double> y, FitRange range) {
    return fit_transformed(x, y, range, Transform::log);
}

FitResult semilog_fit(std::span<const double> x, std::span<const double> y, FitRange range) {
    return fit_transformed(x, y, range, Transform::semilog);
}

std::pair<std::size_t, std::size_t> inertial_range_select(const SpectrumSeries& flux,
                                                          std::span<const std::size_t> forced_shells,
                                                          double tol) {
    const std::size_t n = flux.value.size();
    std::size_t first = 0;
    for (auto f : forced_shells) first = std::max(first, f + 1);
    if (n < 2 || first + 1 >= n) throw FitError("inertial range: no unforced interior shells");
    const std::size_t last = n - 2; // the final boundary closes the budget and carries no flux

    // The reference is the median over flux-carrying candidates, those at
    // or above half the largest candidate flux; dissipation-range shells
    // with vanishing flux would otherwise drag the median off the plateau.
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i <= last; ++i) peak = std::max(peak, flux.value[i]);
    if (!(peak > 0.0) || !std::isfinite(peak)) throw FitError("inertial range: no positive flux past the forcing");
    std::vector<double> sorted;
    for (std::size_t i = first; i <= last; ++i)
        if (flux.value[i] >= 0.5 * peak) sorted.push_back(flux.value[i]);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double ref = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    if (!(ref != 0.0) || !std::isfinite(ref)) throw FitError("inertial range: reference flux is zero");

    std::size_t best_lo = 0, best_len = 0, run_lo = 0, run_len = 0;
    for (std::size_t i = first; i <= last; ++i) {
        if (std::fabs(flux.value[i] / ref - 1.0) < tol) {
            if (run_len == 0) run_lo = i;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_lo = run_lo;
            }
        } else {
            run_len = 0;
        }
    }
    if (best_len < 4)
        throw FitError("inertial range: no flux plateau of at least 4 shells within tolerance " +
                       std::to_string(tol));
    return {best_lo, best_lo + best_len - 1};
}

} // namespace cascade
