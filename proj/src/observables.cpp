#include "qal/observables.hpp"

#include <cmath>

#include "qal/error.hpp"

namespace qal {

Diagnostics diagnostics(const WaveFunction& psi) { return diagnostics(psi.grid(), psi.density()); }

Diagnostics diagnostics(const Grid& grid, std::span<const double> density) {
    const std::size_t n = grid.size();
    if (density.size() != n)
        throw ContractError("diagnostics: " + std::to_string(density.size()) +
                            " density samples on a " + std::to_string(n) + "-node grid");
    Diagnostics d;
    d.norm = trapezoid_integrate(grid, density);
    if (!(d.norm > 0.0) || !std::isfinite(d.norm))
        throw DegenerateStateError("diagnostics of a state with norm " + format_double(d.norm));

    std::vector<double> weighted(n);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < n; ++i) {
        weighted[i] = grid.x(i) * density[i];
        if (density[i] > density[peak]) peak = i;
    }
    d.mean_x = trapezoid_integrate(grid, weighted) / d.norm;
    // Central second moment in a second pass.
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = grid.x(i) - d.mean_x;
        weighted[i] = dev * dev * density[i];
    }
    d.delta_x = std::sqrt(trapezoid_integrate(grid, weighted) / d.norm);
    d.peak_x = grid.x(peak);
    d.peak_height = density[peak];
    return d;
}

bool detect_fragmentation(const Diagnostics& d, double threshold) {
    return std::abs(d.peak_x - d.mean_x) > threshold;
}

std::vector<SeriesPoint> finite_difference(std::span<const SeriesPoint> series) {
    const std::size_t n = series.size();
    if (n < 2) throw ParameterError("finite_difference needs at least 2 points");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(series[i].first > series[i - 1].first))
            throw ParameterError("finite_difference: parameters must be strictly increasing (" +
                                 format_double(series[i - 1].first) + " then " +
                                 format_double(series[i].first) + ")");
    }
    auto slope = [&](std::size_t a, std::size_t b) {
        return (series[b].second - series[a].second) / (series[b].first - series[a].first);
    };
    std::vector<SeriesPoint> out(n);
    out.front() = {series.front().first, slope(0, 1)};
    out.back() = {series.back().first, slope(n - 2, n - 1)};
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = {series[i].first, slope(i - 1, i + 1)};
    return out;
}

}  // namespace qal
