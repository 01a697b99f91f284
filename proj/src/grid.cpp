#include "qal/grid.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qal/error.hpp"

namespace qal {

Grid Grid::from_spacing(double half_width, double spacing) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ParameterError("grid half-width must be positive, got " + format_double(half_width));
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ParameterError("grid spacing must be positive, got " + format_double(spacing));
    const double intervals = std::round(2.0 * half_width / spacing);
    if (intervals + 1.0 < static_cast<double>(min_points) || intervals > 1e8)
        throw ParameterError("grid would have " + format_double(intervals + 1.0) + " nodes");
    return Grid(half_width, static_cast<std::size_t>(intervals) + 1);
}

Grid::Grid(double half_width, std::size_t n_points)
    : half_width_(half_width), n_points_(n_points), dx_(0.0) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ParameterError("grid half-width must be positive, got " + format_double(half_width));
    if (n_points < min_points)
        throw ParameterError("grid needs at least " + std::to_string(min_points) + " nodes, got " +
                             std::to_string(n_points));
    dx_ = 2.0 * half_width / static_cast<double>(n_points - 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) xs[i] = x(i);
    return xs;
}

double trapezoid_integrate(const Grid& grid, std::span<const double> samples) {
    if (samples.size() != grid.size())
        throw ContractError("trapezoid_integrate: " + std::to_string(samples.size()) +
                            " samples on a " + std::to_string(grid.size()) + "-node grid");
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) interior += samples[i];
    return grid.dx() * (interior + 0.5 * (samples.front() + samples.back()));
}

//---------------------------------------------------------------------------//

WaveFunction::WaveFunction(Grid grid) : grid_(grid), values_(grid.size()) {}

WaveFunction::WaveFunction(Grid grid, std::vector<complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw ContractError("wavefunction has " + std::to_string(values_.size()) +
                            " values on a " + std::to_string(grid_.size()) + "-node grid");
}

std::vector<double> WaveFunction::density() const {
    std::vector<double> rho(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) rho[i] = std::norm(values_[i]);
    return rho;
}

double WaveFunction::norm() const { return trapezoid_integrate(grid_, density()); }

WaveFunction normalize(WaveFunction psi) {
    const double n = psi.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw DegenerateStateError("cannot normalize a state with norm " + format_double(n));
    const double scale = 1.0 / std::sqrt(n);
    for (auto& v : psi.values()) v *= scale;
    return psi;
}

WaveFunction gaussian(const Grid& grid, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("gaussian width must be positive");
    WaveFunction psi(grid);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid.x(i);
        psi[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    }
    return psi;
}

//---------------------------------------------------------------------------//

std::string format_double(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_dump(std::ostream& os, const WaveFunction& psi, std::span<const std::string> comments) {
    for (const auto& c : comments) os << "# " << c << '\n';
    os << "# x re im density\n";
    const auto& grid = psi.grid();
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const complex v = psi[i];
        os << format_double(grid.x(i)) << ' ' << format_double(v.real()) << ' '
           << format_double(v.imag()) << ' ' << format_double(std::norm(v)) << '\n';
    }
}

namespace {

double parse_field(std::string_view tok, std::size_t line_no) {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw IoError("dump line " + std::to_string(line_no) + ": malformed number '" +
                      std::string(tok) + "'");
    return v;
}

}  // namespace

WaveFunction read_dump(std::istream& is) {
    std::vector<double> xs;
    std::vector<complex> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::istringstream fields(line);
        std::string tok[4];
        std::string extra;
        if (!(fields >> tok[0] >> tok[1] >> tok[2] >> tok[3]) || (fields >> extra))
            throw IoError("dump line " + std::to_string(line_no) + ": expected 4 fields");
        xs.push_back(parse_field(tok[0], line_no));
        values.emplace_back(parse_field(tok[1], line_no), parse_field(tok[2], line_no));
    }
    if (xs.size() < Grid::min_points)
        throw IoError("dump holds " + std::to_string(xs.size()) + " rows, too few for a grid");
    const double half_width = xs.back();
    if (std::abs(xs.front() + half_width) > 1e-9 * half_width)
        throw IoError("dump grid is not symmetric about the origin");
    Grid grid(half_width, xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - grid.x(i)) > 1e-9 * grid.dx())
            throw IoError("dump grid is not uniform at row " + std::to_string(i));
    }
    return WaveFunction(grid, std::move(values));
}

void write_dump_file(const std::string& path, const WaveFunction& psi,
                     std::span<const std::string> comments) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_dump(os, psi, comments);
    if (!os) throw IoError("failed writing '" + path + "'");
}

WaveFunction read_dump_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "'");
    return read_dump(is);
}

}  // namespace qal
