#include "qal/propagator.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Core>

#include "qal/error.hpp"

namespace qal {

void SolverParams::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
    if (!std::isfinite(g5)) throw ParameterError("g5 must be finite");
    if (max_steps < 1) throw ParameterError("max_steps must be at least 1");
    if (!(energy_tol > 0.0)) throw ParameterError("energy_tol must be positive");
    if (!(initial_sigma > 0.0) || !std::isfinite(initial_sigma))
        throw ParameterError("initial_sigma must be positive");
    if (check_interval < 1) throw ParameterError("check_interval must be at least 1");
}

EnergyValues energy_functionals(const WaveFunction& psi, std::span<const double> potential, double g5) {
    const auto& grid = psi.grid();
    const std::size_t n = grid.size();
    if (potential.size() != n)
        throw ContractError("potential has " + std::to_string(potential.size()) +
                            " samples on a " + std::to_string(n) + "-node grid");
    const auto v = psi.values();
    const double h = grid.dx();
    std::vector<double> kinetic_plus_potential(n);
    std::vector<double> sextic(n);
    for (std::size_t i = 0; i < n; ++i) {
        complex deriv;
        if (i == 0)
            deriv = (v[1] - v[0]) / h;
        else if (i + 1 == n)
            deriv = (v[n - 1] - v[n - 2]) / h;
        else
            deriv = (v[i + 1] - v[i - 1]) / (2.0 * h);
        const double rho = std::norm(v[i]);
        kinetic_plus_potential[i] = 0.5 * std::norm(deriv) + potential[i] * rho;
        sextic[i] = rho * rho * rho;
    }
    const double base = trapezoid_integrate(grid, kinetic_plus_potential);
    const double nonlinear = g5 * trapezoid_integrate(grid, sextic);
    return {base + nonlinear / 3.0, base + nonlinear};
}

//---------------------------------------------------------------------------//

std::vector<complex> thomas_solve(std::span<const double> lower, std::span<const complex> diag,
                                  std::span<const double> upper, std::span<const complex> rhs) {
    const std::size_t n = diag.size();
    if (n == 0 || rhs.size() != n || lower.size() + 1 != n || upper.size() + 1 != n)
        throw ContractError("thomas_solve: inconsistent band sizes");
    std::vector<complex> sweep(n);
    std::vector<complex> x(n);
    complex pivot = diag[0];
    for (std::size_t i = 0;; ++i) {
        if (pivot == complex(0.0))
            throw SingularSystemError("zero pivot at row " + std::to_string(i));
        const complex inv = 1.0 / pivot;
        x[i] = (i == 0 ? rhs[0] : rhs[i] - lower[i - 1] * x[i - 1]) * inv;
        if (i + 1 == n) break;
        sweep[i] = upper[i] * inv;
        pivot = diag[i + 1] - lower[i] * sweep[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= sweep[i] * x[i + 1];
    return x;
}

//---------------------------------------------------------------------------//

KineticCrankNicolson::KineticCrankNicolson(const Grid& grid, double dt, TimeMode mode)
    : n_(grid.size()), mode_(mode), coupling_(dt / (4.0 * grid.dx() * grid.dx())) {
    const double a = coupling_;
    diag_ = mode == TimeMode::imaginary ? complex(1.0 + 2.0 * a, 0.0) : complex(2.0 * a, -1.0);
    const std::size_t m = n_ - 2;
    sweep_.resize(m);
    inv_pivot_.resize(m);
    complex pivot = diag_;
    for (std::size_t i = 0; i < m; ++i) {
        if (pivot == complex(0.0)) throw SingularSystemError("zero pivot in kinetic system");
        inv_pivot_[i] = 1.0 / pivot;
        sweep_[i] = -a * inv_pivot_[i];
        pivot = diag_ + a * sweep_[i];
    }
    if (mode == TimeMode::imaginary) {
        sweep_real_.resize(m);
        inv_pivot_real_.resize(m);
        carry_real_.resize(m);
        scratch_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            sweep_real_[i] = sweep_[i].real();
            inv_pivot_real_[i] = inv_pivot_[i].real();
            carry_real_[i] = a * inv_pivot_real_[i];
        }
    }
}

KineticCrankNicolson::System KineticCrankNicolson::system() const {
    const std::size_t m = n_ - 2;
    return {std::vector<double>(m - 1, -coupling_), std::vector<complex>(m, diag_),
            std::vector<double>(m - 1, -coupling_)};
}

std::vector<complex> KineticCrankNicolson::explicit_half(std::span<const complex> psi) const {
    const std::size_t m = n_ - 2;
    const complex self = mode_ == TimeMode::imaginary ? complex(1.0) : complex(0.0, -1.0);
    std::vector<complex> rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = k + 1;
        rhs[k] = self * psi[i] + coupling_ * (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]);
    }
    return rhs;
}

void KineticCrankNicolson::apply(std::span<complex> psi) const {
    if (psi.size() != n_) throw ContractError("kinetic step: size mismatch");
    const std::size_t m = n_ - 2;
    const double a = coupling_;
    const complex self = mode_ == TimeMode::imaginary ? complex(1.0) : complex(0.0, -1.0);
    psi[0] = psi[n_ - 1] = 0.0;

    // Forward elimination in place; `prev` keeps the overwritten left neighbour.
    complex prev = 0.0;
    complex y_prev = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = k + 1;
        const complex cur = psi[i];
        const complex rhs = self * cur + a * (psi[i + 1] - 2.0 * cur + prev);
        const complex y = (rhs + a * y_prev) * inv_pivot_[k];
        prev = cur;
        psi[i] = y_prev = y;
    }
    for (std::size_t k = m - 1; k-- > 0;) psi[k + 1] -= sweep_[k] * psi[k + 2];
}

void KineticCrankNicolson::apply(std::span<double> psi) const {
    if (mode_ != TimeMode::imaginary)
        throw ContractError("real-valued kinetic step requires imaginary time");
    if (psi.size() != n_) throw ContractError("kinetic step: size mismatch");
    const std::size_t m = n_ - 2;
    const double a = coupling_;
    psi[0] = psi[n_ - 1] = 0.0;

    // Scaled right-hand side r_k / pivot_k, then the two recurrences.
    double* rhs = scratch_.data();
    const double* v = psi.data();
    for (std::size_t k = 0; k < m; ++k)
        rhs[k] = (v[k + 1] + a * (v[k + 2] - 2.0 * v[k + 1] + v[k])) * inv_pivot_real_[k];
    double y = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        y = rhs[k] + carry_real_[k] * y;
        rhs[k] = y;
    }
    double x = 0.0;
    for (std::size_t k = m; k-- > 0;) {
        x = rhs[k] - sweep_real_[k] * x;
        psi[k + 1] = x;
    }
}

//---------------------------------------------------------------------------//

SplitStepper::SplitStepper(const Grid& grid, std::span<const double> potential,
                           const SolverParams& params)
    : grid_(grid),
      params_(params),
      potential_(potential.begin(), potential.end()),
      kinetic_(grid, params.dt, params.mode) {
    params_.validate();
    if (potential_.size() != grid.size())
        throw ContractError("potential has " + std::to_string(potential_.size()) +
                            " samples on a " + std::to_string(grid.size()) + "-node grid");
    if (params_.mode == TimeMode::imaginary) {
        decay_.resize(potential_.size());
        for (std::size_t i = 0; i < potential_.size(); ++i)
            decay_[i] = std::exp(-0.5 * params_.dt * potential_[i]);
    }
}

void SplitStepper::local_half(std::span<complex> psi) const {
    const double half = 0.5 * params_.dt;
    const double g5 = params_.g5;
    if (params_.mode == TimeMode::real) {
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double rho = std::norm(psi[i]);
            const double phase = -half * (potential_[i] + g5 * rho * rho);
            psi[i] *= complex(std::cos(phase), std::sin(phase));
        }
    } else {
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double rho = std::norm(psi[i]);
            psi[i] *= g5 == 0.0 ? decay_[i] : std::exp(-half * (potential_[i] + g5 * rho * rho));
        }
    }
}

void SplitStepper::local_half(std::span<double> psi) const {
    Eigen::Map<Eigen::ArrayXd> f(psi.data(), static_cast<Eigen::Index>(psi.size()));
    if (params_.g5 == 0.0) {
        f *= Eigen::Map<const Eigen::ArrayXd>(decay_.data(), f.size());
        return;
    }
    const Eigen::Map<const Eigen::ArrayXd> v(potential_.data(), f.size());
    f *= (-0.5 * params_.dt * (v + params_.g5 * f.square().square())).exp();
}

void SplitStepper::advance(WaveFunction& psi, std::int64_t step_index) const {
    if (!(psi.grid() == grid_)) throw ContractError("step: wavefunction is on a different grid");
    auto v = psi.values();
    local_half(v);
    kinetic_.apply(v);
    local_half(v);
    if (params_.mode == TimeMode::imaginary) {
        const double n = psi.norm();
        if (!std::isfinite(n)) throw NumericalBlowupError(step_index);
        if (!(n > 0.0)) throw DegenerateStateError("state decayed to zero norm");
        const double scale = 1.0 / std::sqrt(n);
        for (auto& x : v) x *= scale;
    } else {
        for (const auto& x : v)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                throw NumericalBlowupError(step_index);
    }
}

void SplitStepper::advance(std::span<double> psi, std::int64_t step_index) const {
    if (params_.mode != TimeMode::imaginary)
        throw ContractError("real-valued step requires imaginary time");
    if (psi.size() != grid_.size()) throw ContractError("step: size mismatch");
    local_half(psi);
    kinetic_.apply(psi);
    local_half(psi);
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) interior += psi[i] * psi[i];
    const double n = grid_.dx() * (interior + 0.5 * (psi.front() * psi.front() + psi.back() * psi.back()));
    if (!std::isfinite(n)) throw NumericalBlowupError(step_index);
    if (!(n > 0.0)) throw DegenerateStateError("state decayed to zero norm");
    const double scale = 1.0 / std::sqrt(n);
    for (auto& x : psi) x *= scale;
}

WaveFunction step(WaveFunction psi, std::span<const double> potential, const SolverParams& params,
                  std::int64_t step_index) {
    SplitStepper(psi.grid(), potential, params).advance(psi, step_index);
    return psi;
}

//---------------------------------------------------------------------------//

namespace {

WaveFunction to_wavefunction(const Grid& grid, std::span<const double> field) {
    std::vector<complex> values(field.begin(), field.end());
    return WaveFunction(grid, std::move(values));
}

double energy_of(const Grid& grid, std::span<const double> field, std::span<const double> potential,
                 double g5) {
    return energy_functionals(to_wavefunction(grid, field), potential, g5).energy;
}

}  // namespace

GroundStateResult ground_state(std::span<const double> potential, const SolverParams& params,
                               const Grid& grid, const EnergyObserver& observer) {
    if (params.mode != TimeMode::imaginary)
        throw ParameterError("ground_state requires imaginary-time mode");
    const auto start = std::chrono::steady_clock::now();
    SplitStepper stepper(grid, potential, params);

    // The imaginary-time flow keeps a real seed real, so relax a real field.
    const WaveFunction seed = normalize(gaussian(grid, params.initial_sigma));
    std::vector<double> field(grid.size());
    for (std::size_t i = 0; i < field.size(); ++i) field[i] = seed[i].real();

    double previous = energy_of(grid, field, potential, params.g5);
    if (observer) observer(0, previous);
    bool converged = false;
    std::int64_t k = 0;
    while (k < params.max_steps) {
        ++k;
        stepper.advance(std::span<double>(field), k);
        if (k % params.check_interval != 0 && k != params.max_steps) continue;
        const double current = energy_of(grid, field, potential, params.g5);
        if (observer) observer(k, current);
        const double change = std::abs(current - previous) / std::abs(current);
        previous = current;
        if (change <= params.energy_tol) {
            converged = true;
            break;
        }
    }

    GroundStateResult result{to_wavefunction(grid, field), 0.0, 0.0, k, converged, 0.0};
    const auto e = energy_functionals(result.psi, potential, params.g5);
    result.energy = e.energy;
    result.chemical_potential = e.chemical_potential;
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

WaveFunction evolve_real(WaveFunction psi, std::span<const double> potential,
                         const SolverParams& params, double t_final) {
    if (params.mode != TimeMode::real) throw ParameterError("evolve_real requires real-time mode");
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw ParameterError("t_final must be positive");
    const SplitStepper stepper(psi.grid(), potential, params);
    const auto steps = static_cast<std::int64_t>(std::ceil(t_final / params.dt - 1e-9));
    for (std::int64_t k = 1; k <= steps; ++k) stepper.advance(psi, k);
    return psi;
}

}  // namespace qal
