#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cascade {

/// Fixed-step fourth-order Runge-Kutta for y' = rhs(y), with scratch
/// buffers owned by the stepper so repeated steps do not allocate.
///
/// `Rhs` is called as rhs(std::span<const T> y, std::span<T> dydt).
template <class T>
class Rk4Stepper {
public:
    explicit Rk4Stepper(std::size_t n) : tmp_(n), k1_(n), k2_(n), k3_(n), k4_(n) {}

    template <class Rhs>
    void step(std::vector<T>& y, double dt, Rhs&& rhs) {
        const std::size_t n = y.size();
        const double h2 = 0.5 * dt;

        rhs(std::span<const T>(y), std::span<T>(k1_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h2 * k1_[i];

        rhs(std::span<const T>(tmp_), std::span<T>(k2_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h2 * k2_[i];

        rhs(std::span<const T>(tmp_), std::span<T>(k3_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];

        rhs(std::span<const T>(tmp_), std::span<T>(k4_));
        const double h6 = dt / 6.0;
        const double h3 = dt / 3.0;
        for (std::size_t i = 0; i < n; ++i) y[i] += h6 * (k1_[i] + k4_[i]) + h3 * (k2_[i] + k3_[i]);
    }

    /// Integrating-factor (Lawson) RK4 for y' = -rate .* y + nonlinear(y).
    /// The diagonal linear part is integrated exactly, so stiff damping
    /// (viscosity at high wavenumber) places no limit on dt.
    template <class Nonlinear>
    void step_integrating_factor(std::vector<T>& y, double dt, std::span<const double> rate, Nonlinear&& nl) {
        const std::size_t n = y.size();
        if (cached_dt_ != dt || cached_rate_.size() != n ||
            !std::equal(rate.begin(), rate.end(), cached_rate_.begin())) {
            cached_dt_ = dt;
            cached_rate_.assign(rate.begin(), rate.end());
            full_.resize(n);
            half_.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                full_[i] = std::exp(-rate[i] * dt);
                half_[i] = std::exp(-0.5 * rate[i] * dt);
            }
        }
        const double h2 = 0.5 * dt;

        nl(std::span<const T>(y), std::span<T>(k1_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = half_[i] * (y[i] + h2 * k1_[i]);

        nl(std::span<const T>(tmp_), std::span<T>(k2_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = half_[i] * y[i] + h2 * k2_[i];

        nl(std::span<const T>(tmp_), std::span<T>(k3_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = full_[i] * y[i] + dt * half_[i] * k3_[i];

        nl(std::span<const T>(tmp_), std::span<T>(k4_));
        const double h6 = dt / 6.0;
        for (std::size_t i = 0; i < n; ++i)
            y[i] = full_[i] * y[i] +
                   h6 * (full_[i] * k1_[i] + 2.0 * half_[i] * (k2_[i] + k3_[i]) + k4_[i]);
    }

private:
    std::vector<T> tmp_, k1_, k2_, k3_, k4_;
    double cached_dt_ = -1.0;
    std::vector<double> cached_rate_, full_, half_;
};

} // namespace cascade
