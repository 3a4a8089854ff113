#include "cascade/grid.hpp"

#include <cmath>
#include <string>

#include "cascade/error.hpp"

namespace cascade {

ShellGrid::ShellGrid(double k0, double lambda, std::size_t n_shells)
    : k0_(k0), lambda_(lambda) {
    if (!(k0 > 0.0) || !std::isfinite(k0))
        throw ConfigError("grid.k0", "grid.k0 must be positive");
    if (!(lambda > 1.0) || !std::isfinite(lambda))
        throw ConfigError("grid.lambda", "grid.lambda must exceed 1");
    if (n_shells < 1)
        throw ConfigError("grid.n_shells", "grid.n_shells must be at least 1");

    // Repeated multiplication keeps the consecutive ratio within one ulp of
    // lambda; pow() per entry does not guarantee that.
    k_.resize(n_shells);
    k_[0] = k0;
    for (std::size_t n = 1; n < n_shells; ++n)
        k_[n] = k_[n - 1] * lambda;
}

std::vector<double> shell_wavenumbers(const ShellGrid& grid) {
    return grid.wavenumbers();
}

} // namespace cascade
