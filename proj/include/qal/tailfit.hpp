#pragma once

#include <cstddef>
#include <string_view>

#include "qal/grid.hpp"
#include "qal/observables.hpp"

namespace qal {

enum class FitStatus {
    ok,
    insufficient_data,  //!< fewer than min_tail_points nodes in the window
    growing_tail,       //!< non-negative slope of the log-density
};

std::string_view to_string(FitStatus status);

/// Fewest window nodes a fit will accept.
constexpr std::size_t min_tail_points = 8;

/// Density window relative to the peak: f_lo * peak <= |psi|^2 <= f_hi * peak.
struct FitWindow {
    double f_hi = 0.5;
    double f_lo = 1e-4;

    void validate() const;
};

/// |psi|^2 = amplitude * exp(-2 |x - x_p| / length) on one side of the peak.
struct ExponentialTail {
    FitStatus status = FitStatus::insufficient_data;
    double length = 0.0;
    double amplitude = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;

    bool ok() const noexcept { return status == FitStatus::ok; }
};

/// |psi|^2 = amplitude * exp(-(x - x_p)^2 / sigma^2) over both windows.
struct GaussianTail {
    FitStatus status = FitStatus::insufficient_data;
    double sigma = 0.0;
    double amplitude = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;

    bool ok() const noexcept { return status == FitStatus::ok; }
};

struct TailFit {
    ExponentialTail left;
    ExponentialTail right;
    GaussianTail gaussian;
    double delta_x = 0.0;
    //! min(l_left, l_right) over successful sides exceeds delta_x
    bool localized = false;
};

/*!
 * Least-squares fits of ln|psi|^2 on each side of the peak.
 *
 * Exponential: ln rho against |x - x_p|, l = -2 / slope.  Gaussian: ln rho
 * against (x - x_p)^2 with both windows pooled, sigma = 1 / sqrt(-slope).
 * Nodes with zero density never enter a fit.
 */
TailFit fit_tails(const WaveFunction& psi, const Diagnostics& d, const FitWindow& window = {});

enum class Regime { exponential_localized, gaussian_localized, extended };

std::string_view to_string(Regime regime);

/// Throws ClassificationUnavailableError when both exponential fits failed.
Regime classify_regime(const TailFit& fit, const Diagnostics& d);

}  // namespace qal
