#pragma once

#include <cstdint>
#include <vector>

#include "qal/grid.hpp"

namespace qal {

//---------------------------------------------------------------------------//
/*!
 * SplitMix64 generator.
 *
 * The stream is part of the file-format contract: amplitudes drawn from a
 * given seed must be bit-identical in every implementation.
 */
class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    constexpr double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

//---------------------------------------------------------------------------//
/*!
 * Piecewise-constant random potential V(x) = V0 * A_n on S equal segments of
 * [-L, L].  Segments are half-open except the last, which includes +L.
 */
class RandomPotential {
  public:
    RandomPotential(double amplitude, std::uint32_t segments, double half_width, std::uint64_t seed);

    double amplitude() const noexcept { return amplitude_; }
    std::uint32_t segments() const noexcept { return static_cast<std::uint32_t>(draws_.size()); }
    double half_width() const noexcept { return half_width_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<double>& draws() const noexcept { return draws_; }

    /// Segment containing x; x must lie in [-L, L].
    std::size_t segment_index(double x) const noexcept;

    /// V(x), zero outside [-L, L].
    double operator()(double x) const noexcept;

  private:
    double amplitude_;
    double half_width_;
    std::uint64_t seed_;
    std::vector<double> draws_;
};

RandomPotential make_potential(double amplitude, std::uint32_t segments, double half_width,
                               std::uint64_t seed);

/// V at every grid node.  The grid must span the same interval as the potential.
std::vector<double> sample_on_grid(const RandomPotential& potential, const Grid& grid);

}  // namespace qal
