#pragma once

#include <cstddef>
#include <vector>

namespace cascade {

/// Geometric wavenumber ladder k_n = k0 * lambda^n, n = 0 .. n_shells-1.
///
/// Both shell models index their amplitudes by this ladder. The constructor
/// enforces k0 > 0, lambda > 1 and n_shells >= 1; the configuration layer
/// additionally requires n_shells >= 4 for simulation runs.
class ShellGrid {
public:
    ShellGrid(double k0, double lambda, std::size_t n_shells);

    double k0() const noexcept { return k0_; }
    double lambda() const noexcept { return lambda_; }
    std::size_t size() const noexcept { return k_.size(); }

    double wavenumber(std::size_t n) const { return k_.at(n); }
    const std::vector<double>& wavenumbers() const noexcept { return k_; }

    friend bool operator==(const ShellGrid& a, const ShellGrid& b) {
        return a.k0_ == b.k0_ && a.lambda_ == b.lambda_ && a.k_.size() == b.k_.size();
    }

private:
    double k0_;
    double lambda_;
    std::vector<double> k_;
};

std::vector<double> shell_wavenumbers(const ShellGrid& grid);

} // namespace cascade
