#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qal/grid.hpp"

namespace qal {

enum class TimeMode { real, imaginary };

//---------------------------------------------------------------------------//
/*!
 * Integration parameters for
 *
 *     i psi_t = -1/2 psi_xx + V psi + g5 |psi|^4 psi
 *
 * with homogeneous Dirichlet conditions at x = +-L.
 */
struct SolverParams {
    double dt = 1e-3;
    double g5 = 0.0;
    TimeMode mode = TimeMode::imaginary;
    std::int64_t max_steps = 2'000'000;
    //! Relative energy change between checks that counts as converged
    double energy_tol = 1e-10;
    //! Width of the Gaussian seed for ground-state relaxation
    double initial_sigma = 1.0;
    //! Steps between energy evaluations
    std::int64_t check_interval = 10;

    void validate() const;
};

struct GroundStateResult {
    WaveFunction psi;
    double energy = 0.0;
    double chemical_potential = 0.0;
    std::int64_t steps_taken = 0;
    bool converged = false;
    double wall_time = 0.0;  //!< seconds
};

struct EnergyValues {
    double energy = 0.0;              //!< int 1/2|psi_x|^2 + V|psi|^2 + g5/3 |psi|^6
    double chemical_potential = 0.0;  //!< int 1/2|psi_x|^2 + V|psi|^2 + g5 |psi|^6
};

/// Energy and chemical potential by trapezoid quadrature with centred differences.
EnergyValues energy_functionals(const WaveFunction& psi, std::span<const double> potential, double g5);

//---------------------------------------------------------------------------//
/*!
 * Solve a tridiagonal system by forward elimination and back substitution.
 *
 * lower[i] couples row i+1 to column i and upper[i] couples row i to column
 * i+1, so both have size n-1.
 */
std::vector<complex> thomas_solve(std::span<const double> lower, std::span<const complex> diag,
                                  std::span<const double> upper, std::span<const complex> rhs);

//---------------------------------------------------------------------------//
/*!
 * Crank-Nicolson step for the kinetic operator K = -1/2 d^2/dx^2 on the
 * interior nodes of a grid.
 *
 * Real time solves (1 + i dt/2 K) psi' = (1 - i dt/2 K) psi; imaginary time
 * solves (1 + dt/2 K) psi' = (1 - dt/2 K) psi.  The constant matrix is
 * factored once; each apply is one Thomas sweep.  In real time the system is
 * multiplied through by -i so its off-diagonals are real.
 */
class KineticCrankNicolson {
  public:
    KineticCrankNicolson(const Grid& grid, double dt, TimeMode mode);

    TimeMode mode() const noexcept { return mode_; }

    /// Advance in place.  Boundary values are set to zero.
    void apply(std::span<complex> psi) const;
    /// Imaginary-time only: the operator is real.  Uses an internal scratch
    /// buffer, so one instance must not be applied from two threads at once.
    void apply(std::span<double> psi) const;

    /// The implicit matrix in thomas_solve form (interior nodes only).
    struct System {
        std::vector<double> lower;
        std::vector<complex> diag;
        std::vector<double> upper;
    };
    System system() const;

    /// Right-hand side (explicit half) for the interior nodes of psi.
    std::vector<complex> explicit_half(std::span<const complex> psi) const;

  private:
    std::size_t n_;
    TimeMode mode_;
    double coupling_;  // dt / (4 dx^2)
    complex diag_;
    std::vector<complex> sweep_;      // modified upper coefficients c'_i
    std::vector<complex> inv_pivot_;  // 1 / (d_i - l c'_{i-1})
    std::vector<double> sweep_real_;
    std::vector<double> inv_pivot_real_;
    std::vector<double> carry_real_;  // dt/(4 dx^2) / pivot
    mutable std::vector<double> scratch_;
};

//---------------------------------------------------------------------------//
/*!
 * Strang-split stepper holding the factored kinetic system.
 *
 * One step is: local half step exp(-i dt/2 (V + g5 |psi|^4)) (imaginary time:
 * exp(-dt/2 (...))), a full Crank-Nicolson kinetic step, and a second local
 * half step using the post-kinetic density.  Imaginary-time steps finish by
 * renormalizing.
 */
class SplitStepper {
  public:
    SplitStepper(const Grid& grid, std::span<const double> potential, const SolverParams& params);

    const Grid& grid() const noexcept { return grid_; }
    const SolverParams& params() const noexcept { return params_; }
    std::span<const double> potential() const noexcept { return potential_; }

    /// Advance one step; step_index is reported if values become non-finite.
    void advance(WaveFunction& psi, std::int64_t step_index = 0) const;
    /// Imaginary-time step on a real field (exact restriction of the complex step).
    void advance(std::span<double> psi, std::int64_t step_index = 0) const;

  private:
    void local_half(std::span<complex> psi) const;
    void local_half(std::span<double> psi) const;

    Grid grid_;
    SolverParams params_;
    std::vector<double> potential_;
    std::vector<double> decay_;  // exp(-dt/2 V), imaginary time
    KineticCrankNicolson kinetic_;
};

/// One step of the split-step scheme.
WaveFunction step(WaveFunction psi, std::span<const double> potential, const SolverParams& params,
                  std::int64_t step_index = 0);

/// Observer for ground-state relaxation: called at every energy check.
using EnergyObserver = std::function<void(std::int64_t step, double energy)>;

/// Imaginary-time relaxation of a normalized Gaussian seed.
GroundStateResult ground_state(std::span<const double> potential, const SolverParams& params,
                               const Grid& grid, const EnergyObserver& observer = {});

/// Real-time evolution over ceil(t_final / dt) steps.
WaveFunction evolve_real(WaveFunction psi, std::span<const double> potential,
                         const SolverParams& params, double t_final);

}  // namespace qal
