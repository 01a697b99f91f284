#include "qal/tailfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qal/error.hpp"

namespace qal {

std::string_view to_string(FitStatus status) {
    switch (status) {
        case FitStatus::ok: return "ok";
        case FitStatus::insufficient_data: return "insufficient_data";
        case FitStatus::growing_tail: return "growing_tail";
    }
    return "unknown";
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::exponential_localized: return "exponential-localized";
        case Regime::gaussian_localized: return "gaussian-localized";
        case Regime::extended: return "extended";
    }
    return "unknown";
}

void FitWindow::validate() const {
    if (!(f_lo > 0.0 && f_lo < f_hi && f_hi <= 1.0))
        throw ParameterError("fit window needs 0 < f_lo < f_hi <= 1, got (" + format_double(f_hi) +
                             ", " + format_double(f_lo) + ")");
}

namespace {

struct LineFit {
    bool valid = false;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& u, const std::vector<double>& y) {
    const auto n = static_cast<double>(u.size());
    double mu = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        mu += u[k];
        my += y[k];
    }
    mu /= n;
    my /= n;
    double suu = 0.0;
    double suy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double du = u[k] - mu;
        const double dy = y[k] - my;
        suu += du * du;
        suy += du * dy;
        syy += dy * dy;
    }
    LineFit fit;
    if (!(suu > 0.0)) return fit;
    fit.valid = true;
    fit.slope = suy / suu;
    fit.intercept = my - fit.slope * mu;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double r = y[k] - (fit.intercept + fit.slope * u[k]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

// Offsets |x - x_p| (in units of dx) and log-density of the window nodes on one side.
struct Samples {
    std::vector<double> offset;
    std::vector<double> log_density;
};

ExponentialTail fit_side(const Samples& s, double dx) {
    ExponentialTail tail;
    tail.points = s.offset.size();
    if (tail.points < min_tail_points) return tail;
    std::vector<double> u(s.offset.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = s.offset[k] * dx;
    const LineFit line = fit_line(u, s.log_density);
    if (!line.valid) return tail;
    if (!(line.slope < 0.0)) {
        tail.status = FitStatus::growing_tail;
        return tail;
    }
    tail.status = FitStatus::ok;
    tail.length = -2.0 / line.slope;
    tail.amplitude = std::exp(line.intercept);
    tail.r2 = line.r2;
    return tail;
}

}  // namespace

TailFit fit_tails(const WaveFunction& psi, const Diagnostics& d, const FitWindow& window) {
    window.validate();
    const Grid& grid = psi.grid();
    const auto rho = psi.density();
    const double dx = grid.dx();
    const double peak_pos = (d.peak_x + grid.half_width()) / dx;
    const auto peak = static_cast<std::size_t>(std::llround(std::clamp(peak_pos, 0.0, double(grid.size() - 1))));
    if (std::abs(peak_pos - static_cast<double>(peak)) > 1e-6)
        throw ContractError("fit_tails: peak position is not a grid node");

    const double hi = window.f_hi * d.peak_height;
    const double lo = window.f_lo * d.peak_height;
    Samples left;
    Samples right;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0) || rho[i] < lo || rho[i] > hi) continue;
        const double y = std::log(rho[i]);
        if (i <= peak) {
            left.offset.push_back(static_cast<double>(peak - i));
            left.log_density.push_back(y);
        }
        if (i >= peak) {
            right.offset.push_back(static_cast<double>(i - peak));
            right.log_density.push_back(y);
        }
    }

    TailFit fit;
    fit.delta_x = d.delta_x;
    fit.left = fit_side(left, dx);
    fit.right = fit_side(right, dx);

    std::vector<double> u2;
    std::vector<double> y;
    for (const Samples* side : {&left, &right}) {
        for (std::size_t k = 0; k < side->offset.size(); ++k) {
            if (side == &right && side->offset[k] == 0.0) continue;  // peak node counted once
            const double u = side->offset[k] * dx;
            u2.push_back(u * u);
            y.push_back(side->log_density[k]);
        }
    }
    fit.gaussian.points = u2.size();
    if (u2.size() >= min_tail_points) {
        const LineFit line = fit_line(u2, y);
        if (line.valid && line.slope < 0.0) {
            fit.gaussian.status = FitStatus::ok;
            fit.gaussian.sigma = 1.0 / std::sqrt(-line.slope);
            fit.gaussian.amplitude = std::exp(line.intercept);
            fit.gaussian.r2 = line.r2;
        } else if (line.valid) {
            fit.gaussian.status = FitStatus::growing_tail;
        }
    }

    double shortest = std::numeric_limits<double>::infinity();
    if (fit.left.ok()) shortest = std::min(shortest, fit.left.length);
    if (fit.right.ok()) shortest = std::min(shortest, fit.right.length);
    fit.localized = std::isfinite(shortest) && shortest > d.delta_x;
    return fit;
}

Regime classify_regime(const TailFit& fit, const Diagnostics& d) {
    if (!fit.left.ok() && !fit.right.ok())
        throw ClassificationUnavailableError("both tail fits failed (left: " +
                                             std::string(to_string(fit.left.status)) + ", right: " +
                                             std::string(to_string(fit.right.status)) + ")");
    double shortest = std::numeric_limits<double>::infinity();
    bool exp_beats_gauss = true;
    bool gauss_beats_exp = fit.gaussian.ok();
    for (const ExponentialTail* side : {&fit.left, &fit.right}) {
        if (!side->ok()) continue;
        shortest = std::min(shortest, side->length);
        if (fit.gaussian.ok() && side->r2 < fit.gaussian.r2) exp_beats_gauss = false;
        if (fit.gaussian.ok() && !(fit.gaussian.r2 > side->r2)) gauss_beats_exp = false;
    }
    if (!(shortest > d.delta_x)) return Regime::extended;
    if (exp_beats_gauss) return Regime::exponential_localized;
    if (gauss_beats_exp) return Regime::gaussian_localized;
    return Regime::extended;
}

}  // namespace qal
