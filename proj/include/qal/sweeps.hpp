#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qal/observables.hpp"
#include "qal/propagator.hpp"
#include "qal/tailfit.hpp"

namespace qal {

/// Everything needed for one disorder realization except the seed.
struct ModelParams {
    double half_width = 30.0;
    double dx = 0.04;
    double dt = 1e-3;
    double g5 = 0.0;
    double V0 = 1.0;
    std::uint32_t S = 300;
    double sigma0 = 1.0;
    double energy_tol = 1e-10;
    std::int64_t max_steps = 2'000'000;
    FitWindow window;

    SolverParams solver() const;
    void validate() const;
};

enum class SweepVariable { g5, V0, S };

std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view text);

/// One (value, seed) run.  Failed stages leave their optionals empty and are named in status.
struct SweepRow {
    SweepVariable variable = SweepVariable::g5;
    double g5 = 0.0;
    double V0 = 0.0;
    std::uint32_t S = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    std::int64_t steps = 0;
    double energy = 0.0;
    double wall_time = 0.0;
    std::optional<Diagnostics> diagnostics;
    std::optional<TailFit> tailfit;
    std::optional<Regime> regime;
    std::string status = "ok";

    double value() const;
};

/// Relax, diagnose and fit a single realization; never throws for numerical failures.
SweepRow run_single(const ModelParams& params, std::uint64_t seed,
                    SweepVariable variable = SweepVariable::g5,
                    GroundStateResult* ground = nullptr);

struct SweepSpec {
    SweepVariable variable = SweepVariable::g5;
    std::vector<double> values;
    ModelParams fixed;
    std::vector<std::uint64_t> seeds;
    //! Upper bound on |values| * |seeds|
    std::size_t max_runs = 100'000;

    void validate() const;
    /// Parameters of the run at values[index].
    ModelParams at(std::size_t index) const;
};

/// seed_k = base + k for k < count.
std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base, std::size_t count);

/*!
 * Run every (value, seed) pair on up to `workers` threads.
 *
 * Rows come back ordered by value index, then seed index, whatever the
 * schedule.  workers == 0 means one per hardware thread.
 */
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t workers = 0);

constexpr double default_jump_factor = 5.0;

/*!
 * Locate an abrupt rise in delta_x along an increasing g5 mesh.
 *
 * With jumps J_i = dx_{i+1} - dx_i, returns the midpoint of the interval
 * holding the largest J_i when it exceeds jump_factor * median(|J|).
 */
std::optional<double> critical_g5(std::span<const SeriesPoint> delta_x_vs_g5,
                                  double jump_factor = default_jump_factor);

/// Same, on the per-g5 median delta_x of a g5 sweep.
std::optional<double> critical_g5(std::span<const SweepRow> rows, double jump_factor = default_jump_factor);

/// Relative standard deviation of peak height below and at/above S_split.
std::pair<double, double> stabilization_check(std::span<const SweepRow> rows, std::uint32_t S_split);

struct Summary {
    std::size_t count = 0;
    double median = 0.0;
    double iqr = 0.0;
};

/// Median and interquartile range with linear interpolation between order statistics.
Summary summarize(std::vector<double> values);

struct AggregateRow {
    double value = 0.0;
    std::size_t runs = 0;
    std::size_t failed_runs = 0;  //!< no diagnostics (blowup)
    std::size_t failed_fits = 0;  //!< at least one side without a length
    Summary delta_x;
    Summary l_left;
    Summary l_right;
    Summary peak_height;
};

/// Per-value ensemble statistics, ordered by value.
std::vector<AggregateRow> aggregate(std::span<const SweepRow> rows);

/// Per-value median delta_x, ordered by value.
std::vector<SeriesPoint> median_delta_x(std::span<const SweepRow> rows);

//---------------------------------------------------------------------------//
// CSV output

extern const char* const sweep_csv_header;
extern const char* const aggregate_csv_header;

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows,
                     std::span<const std::string> comments = {});
void write_aggregate_csv(std::ostream& os, SweepVariable variable, std::span<const AggregateRow> rows,
                         std::span<const std::string> comments = {});

}  // namespace qal
