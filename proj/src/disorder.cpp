#include "qal/disorder.hpp"

#include <algorithm>
#include <cmath>

#include "qal/error.hpp"

namespace qal {

RandomPotential::RandomPotential(double amplitude, std::uint32_t segments, double half_width,
                                 std::uint64_t seed)
    : amplitude_(amplitude), half_width_(half_width), seed_(seed) {
    if (segments == 0) throw ParameterError("S must be at least 1");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ParameterError("L must be positive, got " + format_double(half_width));
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw ParameterError("V0 must be non-negative, got " + format_double(amplitude));
    SplitMix64 rng(seed);
    draws_.resize(segments);
    for (auto& a : draws_) a = rng.uniform();
}

std::size_t RandomPotential::segment_index(double x) const noexcept {
    const double pos = (x + half_width_) * static_cast<double>(draws_.size()) / (2.0 * half_width_);
    const auto n = static_cast<std::ptrdiff_t>(std::floor(pos));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(n, 0, std::ptrdiff_t(draws_.size()) - 1));
}

double RandomPotential::operator()(double x) const noexcept {
    if (x < -half_width_ || x > half_width_) return 0.0;
    return amplitude_ * draws_[segment_index(x)];
}

RandomPotential make_potential(double amplitude, std::uint32_t segments, double half_width,
                               std::uint64_t seed) {
    return RandomPotential(amplitude, segments, half_width, seed);
}

std::vector<double> sample_on_grid(const RandomPotential& potential, const Grid& grid) {
    if (std::abs(potential.half_width() - grid.half_width()) > 1e-12 * grid.half_width())
        throw ConfigError("L", "potential spans [-" + format_double(potential.half_width()) +
                                   ", L] but the grid spans [-" +
                                   format_double(grid.half_width()) + ", L]");
    // Node i sits at -L + i*2L/(n-1): its segment is floor(i*S/(n-1)), exact in integers.
    const std::uint64_t segments = potential.segments();
    const std::uint64_t intervals = grid.size() - 1;
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto n = std::min<std::uint64_t>(i * segments / intervals, segments - 1);
        v[i] = potential.amplitude() * potential.draws()[n];
    }
    return v;
}

}  // namespace qal
