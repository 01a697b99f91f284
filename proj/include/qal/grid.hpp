#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qal {

using complex = std::complex<double>;

//---------------------------------------------------------------------------//
/*!
 * Uniform mesh over [-L, L].
 *
 * The node count is derived from the requested spacing, and the spacing is
 * then recomputed as 2L/(n-1) so that both endpoints are nodes.
 */
class Grid {
  public:
    static constexpr std::size_t min_points = 16;

    /// Build from a half-width and a target spacing (n = round(2L/dx) + 1).
    static Grid from_spacing(double half_width, double spacing);

    Grid(double half_width, std::size_t n_points);

    double half_width() const noexcept { return half_width_; }
    std::size_t size() const noexcept { return n_points_; }
    double dx() const noexcept { return dx_; }

    double x(std::size_t i) const noexcept {
        return i + 1 == n_points_ ? half_width_ : -half_width_ + static_cast<double>(i) * dx_;
    }

    std::vector<double> nodes() const;

    friend bool operator==(const Grid&, const Grid&) = default;

  private:
    double half_width_;
    std::size_t n_points_;
    double dx_;
};

/// Trapezoidal rule over the whole grid.
double trapezoid_integrate(const Grid& grid, std::span<const double> samples);

//---------------------------------------------------------------------------//
/*!
 * Complex field sampled on a Grid.
 */
class WaveFunction {
  public:
    explicit WaveFunction(Grid grid);
    WaveFunction(Grid grid, std::vector<complex> values);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const complex> values() const noexcept { return values_; }
    std::span<complex> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    complex operator[](std::size_t i) const { return values_[i]; }
    complex& operator[](std::size_t i) { return values_[i]; }

    std::vector<double> density() const;
    double norm() const;

  private:
    Grid grid_;
    std::vector<complex> values_;
};

/// Scale by a positive real constant so that the integral of |psi|^2 is one.
WaveFunction normalize(WaveFunction psi);

/// Real Gaussian exp(-x^2 / (2 sigma^2)) centred at the origin, zero at both ends.
WaveFunction gaussian(const Grid& grid, double sigma);

//---------------------------------------------------------------------------//
// Text dump: optional '#' comment lines, then "# x re im density" and one
// row per node.

void write_dump(std::ostream& os, const WaveFunction& psi, std::span<const std::string> comments = {});
WaveFunction read_dump(std::istream& is);

void write_dump_file(const std::string& path, const WaveFunction& psi,
                     std::span<const std::string> comments = {});
WaveFunction read_dump_file(const std::string& path);

/// Shortest round-trippable text for a double ("%.17g").
std::string format_double(double value);

}  // namespace qal
