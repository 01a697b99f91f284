#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qal/grid.hpp"

namespace qal {

/// Scalar summary of one density profile.
struct Diagnostics {
    double mean_x = 0.0;       //!< <x>
    double peak_x = 0.0;       //!< node of max |psi|^2 (leftmost on ties)
    double peak_height = 0.0;  //!< max |psi|^2
    double delta_x = 0.0;      //!< sqrt(<x^2> - <x>^2)
    double norm = 0.0;         //!< int |psi|^2 dx
};

Diagnostics diagnostics(const WaveFunction& psi);

/// Same, from density samples on a grid.
Diagnostics diagnostics(const Grid& grid, std::span<const double> density);

constexpr double default_fragmentation_threshold = 0.4;

/// True when the peak and the centre of mass disagree by more than threshold.
bool detect_fragmentation(const Diagnostics& d, double threshold = default_fragmentation_threshold);

using SeriesPoint = std::pair<double, double>;

/// d(value)/d(parameter): centred inside, one-sided at the two ends.
std::vector<SeriesPoint> finite_difference(std::span<const SeriesPoint> series);

}  // namespace qal
