#include "qal/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "qal/disorder.hpp"
#include "qal/error.hpp"

namespace qal {

SolverParams ModelParams::solver() const {
    SolverParams p;
    p.dt = dt;
    p.g5 = g5;
    p.mode = TimeMode::imaginary;
    p.max_steps = max_steps;
    p.energy_tol = energy_tol;
    p.initial_sigma = sigma0;
    return p;
}

void ModelParams::validate() const {
    if (!(half_width > 0.0)) throw ConfigError("L", "must be positive");
    if (!(dx > 0.0)) throw ConfigError("dx", "must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (!(g5 >= 0.0) || !std::isfinite(g5)) throw ConfigError("g5", "must be finite and >= 0");
    if (!(V0 >= 0.0) || !std::isfinite(V0)) throw ConfigError("V0", "must be finite and >= 0");
    if (S == 0) throw ConfigError("S", "must be at least 1");
    if (!(sigma0 > 0.0)) throw ConfigError("sigma0", "must be positive");
    if (!(energy_tol > 0.0)) throw ConfigError("energy_tol", "must be positive");
    if (max_steps < 1) throw ConfigError("max_steps", "must be at least 1");
    if (!(window.f_lo > 0.0 && window.f_lo < window.f_hi)) throw ConfigError("f_lo", "must satisfy 0 < f_lo < f_hi");
    if (!(window.f_hi <= 1.0)) throw ConfigError("f_hi", "must be at most 1");
}

std::string_view to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::g5: return "g5";
        case SweepVariable::V0: return "V0";
        case SweepVariable::S: return "S";
    }
    return "?";
}

SweepVariable parse_sweep_variable(std::string_view text) {
    if (text == "g5") return SweepVariable::g5;
    if (text == "V0") return SweepVariable::V0;
    if (text == "S") return SweepVariable::S;
    throw ConfigError("sweep_var", "expected one of g5, V0, S; got '" + std::string(text) + "'");
}

double SweepRow::value() const {
    switch (variable) {
        case SweepVariable::g5: return g5;
        case SweepVariable::V0: return V0;
        case SweepVariable::S: return static_cast<double>(S);
    }
    return 0.0;
}

SweepRow run_single(const ModelParams& params, std::uint64_t seed, SweepVariable variable,
                    GroundStateResult* ground) {
    params.validate();
    SweepRow row;
    row.variable = variable;
    row.g5 = params.g5;
    row.V0 = params.V0;
    row.S = params.S;
    row.seed = seed;

    std::vector<std::string> notes;
    try {
        const Grid grid = Grid::from_spacing(params.half_width, params.dx);
        const auto potential = sample_on_grid(make_potential(params.V0, params.S, params.half_width, seed), grid);
        GroundStateResult result = ground_state(potential, params.solver(), grid);
        row.converged = result.converged;
        row.steps = result.steps_taken;
        row.energy = result.energy;
        row.wall_time = result.wall_time;
        row.diagnostics = diagnostics(result.psi);
        row.tailfit = fit_tails(result.psi, *row.diagnostics, params.window);
        if (!row.tailfit->left.ok()) notes.push_back("fit_left=" + std::string(to_string(row.tailfit->left.status)));
        if (!row.tailfit->right.ok())
            notes.push_back("fit_right=" + std::string(to_string(row.tailfit->right.status)));
        if (!row.tailfit->gaussian.ok())
            notes.push_back("fit_gauss=" + std::string(to_string(row.tailfit->gaussian.status)));
        try {
            row.regime = classify_regime(*row.tailfit, *row.diagnostics);
        } catch (const ClassificationUnavailableError&) {
            notes.emplace_back("regime=unavailable");
        }
        if (!row.converged) notes.emplace_back("not_converged");
        if (ground) *ground = std::move(result);
    } catch (const NumericalBlowupError& e) {
        notes.push_back("blowup@step=" + std::to_string(e.step_index()));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        notes.push_back("error=" + std::string(to_string(e.kind())));
    }
    if (!notes.empty()) {
        row.status.clear();
        for (std::size_t i = 0; i < notes.size(); ++i) row.status += (i ? ";" : "") + notes[i];
    }
    return row;
}

//---------------------------------------------------------------------------//

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("sweep_values", "must not be empty");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1])) throw ConfigError("sweep_values", "must be strictly increasing");
    if (seeds.empty()) throw ConfigError("n_seeds", "must be at least 1");
    if (values.size() * seeds.size() > max_runs)
        throw ConfigError("sweep_values", std::to_string(values.size() * seeds.size()) +
                                              " runs exceed the budget of " + std::to_string(max_runs));
    if (variable == SweepVariable::S) {
        for (double v : values)
            if (!(v >= 1.0) || v != std::floor(v) || v > 4.0e9)
                throw ConfigError("sweep_values", "S values must be positive integers");
    }
    for (std::size_t i = 0; i < values.size(); ++i) at(i).validate();
}

ModelParams SweepSpec::at(std::size_t index) const {
    ModelParams p = fixed;
    const double v = values.at(index);
    switch (variable) {
        case SweepVariable::g5: p.g5 = v; break;
        case SweepVariable::V0: p.V0 = v; break;
        case SweepVariable::S: p.S = static_cast<std::uint32_t>(v); break;
    }
    return p;
}

std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t k = 0; k < count; ++k) seeds[k] = base + k;
    return seeds;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t workers) {
    spec.validate();
    const std::size_t n_seeds = spec.seeds.size();
    const std::size_t total = spec.values.size() * n_seeds;
    std::vector<SweepRow> rows(total);

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t job; (job = next.fetch_add(1)) < total;) {
            try {
                rows[job] = run_single(spec.at(job / n_seeds), spec.seeds[job % n_seeds], spec.variable);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

//---------------------------------------------------------------------------//

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

}  // namespace

Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        s.median = s.iqr = std::nan("");
        return s;
    }
    std::sort(values.begin(), values.end());
    s.median = quantile_sorted(values, 0.5);
    s.iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
    return s;
}

std::vector<AggregateRow> aggregate(std::span<const SweepRow> rows) {
    if (rows.empty()) throw ParameterError("aggregate: no rows");
    std::map<double, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) groups[r.value()].push_back(&r);

    std::vector<AggregateRow> out;
    out.reserve(groups.size());
    for (const auto& [value, members] : groups) {
        AggregateRow agg;
        agg.value = value;
        agg.runs = members.size();
        std::vector<double> dx, ll, lr, peak;
        for (const SweepRow* r : members) {
            if (!r->diagnostics) {
                ++agg.failed_runs;
                continue;
            }
            dx.push_back(r->diagnostics->delta_x);
            peak.push_back(r->diagnostics->peak_height);
            const bool left = r->tailfit && r->tailfit->left.ok();
            const bool right = r->tailfit && r->tailfit->right.ok();
            if (left) ll.push_back(r->tailfit->left.length);
            if (right) lr.push_back(r->tailfit->right.length);
            if (!left || !right) ++agg.failed_fits;
        }
        if (dx.empty())
            throw ParameterError("aggregate: every run at value " + format_double(value) + " failed");
        agg.delta_x = summarize(std::move(dx));
        agg.l_left = summarize(std::move(ll));
        agg.l_right = summarize(std::move(lr));
        agg.peak_height = summarize(std::move(peak));
        out.push_back(agg);
    }
    return out;
}

std::vector<SeriesPoint> median_delta_x(std::span<const SweepRow> rows) {
    std::vector<SeriesPoint> series;
    for (const auto& agg : aggregate(rows)) series.emplace_back(agg.value, agg.delta_x.median);
    return series;
}

std::optional<double> critical_g5(std::span<const SeriesPoint> series, double jump_factor) {
    if (series.size() < 4) throw ParameterError("critical_g5 needs at least 4 g5 values");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].first > series[i - 1].first))
            throw ParameterError("critical_g5: g5 values must be strictly increasing");
    std::vector<double> magnitudes;
    std::size_t best = 0;
    double best_jump = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double jump = series[i + 1].second - series[i].second;
        magnitudes.push_back(std::abs(jump));
        if (jump > best_jump) {
            best_jump = jump;
            best = i;
        }
    }
    if (!(best_jump > jump_factor * median_of(std::move(magnitudes)))) return std::nullopt;
    return 0.5 * (series[best].first + series[best + 1].first);
}

std::optional<double> critical_g5(std::span<const SweepRow> rows, double jump_factor) {
    for (const auto& r : rows)
        if (r.variable != SweepVariable::g5) throw ParameterError("critical_g5 needs rows from a g5 sweep");
    const auto series = median_delta_x(rows);
    return critical_g5(std::span<const SeriesPoint>(series), jump_factor);
}

std::pair<double, double> stabilization_check(std::span<const SweepRow> rows, std::uint32_t S_split) {
    std::vector<double> low;
    std::vector<double> high;
    for (const auto& r : rows) {
        if (!r.diagnostics) continue;
        (r.S < S_split ? low : high).push_back(r.diagnostics->peak_height);
    }
    if (low.empty() || high.empty())
        throw ParameterError("stabilization_check: S values must lie on both sides of " + std::to_string(S_split));
    auto relative_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) return 0.0;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<double>(v.size() - 1)) / mean;
    };
    return {relative_std(low), relative_std(high)};
}

//---------------------------------------------------------------------------//

const char* const sweep_csv_header =
    "variable,g5,V0,S,seed,converged,steps,mean_x,peak_x,peak_height,delta_x,l_left,l_right,"
    "r2_exp_left,r2_exp_right,sigma_gauss,r2_gauss,localized,regime,status";

const char* const aggregate_csv_header =
    "variable,value,runs,failed_runs,failed_fits,delta_x_median,delta_x_iqr,l_left_median,l_left_iqr,"
    "l_right_median,l_right_iqr,peak_height_median,peak_height_iqr";

namespace {

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

template <class T>
std::string maybe(bool present, T v) {
    return present ? num(v) : std::string();
}

}  // namespace

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows, std::span<const std::string> comments) {
    for (const auto& c : comments) os << "# " << c << '\n';
    os << sweep_csv_header << '\n';
    for (const auto& r : rows) {
        const auto* d = r.diagnostics ? &*r.diagnostics : nullptr;
        const auto* f = r.tailfit ? &*r.tailfit : nullptr;
        os << to_string(r.variable) << ',' << num(r.g5) << ',' << num(r.V0) << ',' << r.S << ',' << r.seed << ','
           << (r.converged ? "true" : "false") << ',' << r.steps << ',' << maybe(d, d ? d->mean_x : 0.0) << ','
           << maybe(d, d ? d->peak_x : 0.0) << ',' << maybe(d, d ? d->peak_height : 0.0) << ','
           << maybe(d, d ? d->delta_x : 0.0) << ',' << maybe(f && f->left.ok(), f ? f->left.length : 0.0) << ','
           << maybe(f && f->right.ok(), f ? f->right.length : 0.0) << ','
           << maybe(f && f->left.ok(), f ? f->left.r2 : 0.0) << ','
           << maybe(f && f->right.ok(), f ? f->right.r2 : 0.0) << ','
           << maybe(f && f->gaussian.ok(), f ? f->gaussian.sigma : 0.0) << ','
           << maybe(f && f->gaussian.ok(), f ? f->gaussian.r2 : 0.0) << ','
           << (f ? (f->localized ? "true" : "false") : "") << ','
           << (r.regime ? std::string(to_string(*r.regime)) : std::string()) << ',' << r.status << '\n';
    }
}

void write_aggregate_csv(std::ostream& os, SweepVariable variable, std::span<const AggregateRow> rows,
                         std::span<const std::string> comments) {
    for (const auto& c : comments) os << "# " << c << '\n';
    os << aggregate_csv_header << '\n';
    for (const auto& a : rows) {
        os << to_string(variable) << ',' << num(a.value) << ',' << a.runs << ',' << a.failed_runs << ','
           << a.failed_fits << ',' << num(a.delta_x.median) << ',' << num(a.delta_x.iqr) << ','
           << num(a.l_left.median) << ',' << num(a.l_left.iqr) << ',' << num(a.l_right.median) << ','
           << num(a.l_right.iqr) << ',' << num(a.peak_height.median) << ',' << num(a.peak_height.iqr) << '\n';
    }
}

}  // namespace qal
