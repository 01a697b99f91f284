#include "qal/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "qal/disorder.hpp"
#include "qal/error.hpp"

namespace qal {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError(std::string(key), "malformed number '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw ConfigError(std::string(key), "malformed non-negative integer '" + std::string(text) + "'");
    return v;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"L", [](RunConfig& c, std::string_view v) { c.model.half_width = parse_real("L", v); }},
        {"dx", [](RunConfig& c, std::string_view v) { c.model.dx = parse_real("dx", v); }},
        {"dt", [](RunConfig& c, std::string_view v) { c.model.dt = parse_real("dt", v); }},
        {"g5", [](RunConfig& c, std::string_view v) { c.model.g5 = parse_real("g5", v); }},
        {"V0", [](RunConfig& c, std::string_view v) { c.model.V0 = parse_real("V0", v); }},
        {"S",
         [](RunConfig& c, std::string_view v) {
             const auto s = parse_unsigned("S", v);
             if (s > 0xFFFFFFFFu) throw ConfigError("S", "too large");
             c.model.S = static_cast<std::uint32_t>(s);
         }},
        {"seed", [](RunConfig& c, std::string_view v) { c.seed = parse_unsigned("seed", v); }},
        {"sigma0", [](RunConfig& c, std::string_view v) { c.model.sigma0 = parse_real("sigma0", v); }},
        {"energy_tol", [](RunConfig& c, std::string_view v) { c.model.energy_tol = parse_real("energy_tol", v); }},
        {"max_steps",
         [](RunConfig& c, std::string_view v) {
             const auto n = parse_unsigned("max_steps", v);
             if (n > 4'000'000'000'000ULL) throw ConfigError("max_steps", "too large");
             c.model.max_steps = static_cast<std::int64_t>(n);
         }},
        {"f_hi", [](RunConfig& c, std::string_view v) { c.model.window.f_hi = parse_real("f_hi", v); }},
        {"f_lo", [](RunConfig& c, std::string_view v) { c.model.window.f_lo = parse_real("f_lo", v); }},
        {"frag_threshold",
         [](RunConfig& c, std::string_view v) { c.frag_threshold = parse_real("frag_threshold", v); }},
        {"t_final", [](RunConfig& c, std::string_view v) { c.t_final = parse_real("t_final", v); }},
        {"sweep_var",
         [](RunConfig& c, std::string_view v) {
             v = trim(v);
             if (v.empty() || v == "none")
                 c.sweep_var.reset();
             else
                 c.sweep_var = parse_sweep_variable(v);
         }},
        {"sweep_values",
         [](RunConfig& c, std::string_view v) { c.sweep_values = parse_value_list("sweep_values", v); }},
        {"n_seeds", [](RunConfig& c, std::string_view v) { c.n_seeds = parse_unsigned("n_seeds", v); }},
        {"jump_factor", [](RunConfig& c, std::string_view v) { c.jump_factor = parse_real("jump_factor", v); }},
        {"S_split",
         [](RunConfig& c, std::string_view v) {
             const auto s = parse_unsigned("S_split", v);
             if (s > 0xFFFFFFFFu) throw ConfigError("S_split", "too large");
             c.S_split = static_cast<std::uint32_t>(s);
         }},
        {"max_runs", [](RunConfig& c, std::string_view v) { c.max_runs = parse_unsigned("max_runs", v); }},
        {"out_dir", [](RunConfig& c, std::string_view v) { c.out_dir = std::string(trim(v)); }},
        {"input", [](RunConfig& c, std::string_view v) { c.input = std::string(trim(v)); }},
    };
    return table;
}

void apply(RunConfig& c, std::string_view key, std::string_view value) {
    for (const auto& [name, set] : setters()) {
        if (name == key) {
            set(c, value);
            return;
        }
    }
    throw ConfigError(std::string(key), "unknown key");
}

void validate(const RunConfig& c) {
    c.model.validate();
    if (c.model.window.f_lo >= c.model.window.f_hi) throw ConfigError("f_lo", "must be below f_hi");
    // The grid must be constructible.
    try {
        (void)Grid::from_spacing(c.model.half_width, c.model.dx);
    } catch (const ParameterError& e) {
        throw ConfigError("dx", e.what());
    }
    if (!(c.frag_threshold > 0.0)) throw ConfigError("frag_threshold", "must be positive");
    if (!(c.t_final > 0.0)) throw ConfigError("t_final", "must be positive");
    if (c.n_seeds < 1) throw ConfigError("n_seeds", "must be at least 1");
    if (!(c.jump_factor > 0.0)) throw ConfigError("jump_factor", "must be positive");
    if (c.S_split < 1) throw ConfigError("S_split", "must be at least 1");
    for (std::size_t i = 1; i < c.sweep_values.size(); ++i)
        if (!(c.sweep_values[i] > c.sweep_values[i - 1]))
            throw ConfigError("sweep_values", "must be strictly increasing");
    if (c.sweep_var && !c.sweep_values.empty()) c.sweep_spec().validate();
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& entry : setters()) k.push_back(entry.first);
        return k;
    }();
    return keys;
}

std::vector<double> parse_value_list(std::string_view key, std::string_view text) {
    text = trim(text);
    std::vector<double> values;
    if (text.empty()) return values;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
            throw ConfigError(std::string(key), "range must be start:stop:step");
        const double start = parse_real(key, text.substr(0, a));
        const double stop = parse_real(key, text.substr(a + 1, b - a - 1));
        const double step = parse_real(key, text.substr(b + 1));
        if (!(step > 0.0) || stop < start) throw ConfigError(std::string(key), "range needs step > 0 and stop >= start");
        const double count = std::floor((stop - start) / step + 1e-9);
        if (count > 1e6) throw ConfigError(std::string(key), "range is too long");
        for (std::int64_t k = 0; k <= static_cast<std::int64_t>(count); ++k) {
            // Snap to 12 significant digits so 0.1-steps land on 0.3, not 0.30000000000000004.
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", start + static_cast<double>(k) * step);
            values.push_back(std::strtod(buf, nullptr));
        }
        return values;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        values.push_back(parse_real(key, item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return values;
}

RunConfig parse_config(std::string_view text, const std::vector<Override>& overrides) {
    RunConfig c;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not key=value");
        apply(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    for (const auto& [key, value] : overrides) apply(c, key, value);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path, const std::vector<Override>& overrides) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::vector<std::string> RunConfig::describe() const {
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
        return s;
    };
    return {
        "L=" + format_double(model.half_width),
        "dx=" + format_double(model.dx),
        "dt=" + format_double(model.dt),
        "g5=" + format_double(model.g5),
        "V0=" + format_double(model.V0),
        "S=" + std::to_string(model.S),
        "seed=" + std::to_string(seed),
        "sigma0=" + format_double(model.sigma0),
        "energy_tol=" + format_double(model.energy_tol),
        "max_steps=" + std::to_string(model.max_steps),
        "f_hi=" + format_double(model.window.f_hi),
        "f_lo=" + format_double(model.window.f_lo),
        "frag_threshold=" + format_double(frag_threshold),
        "t_final=" + format_double(t_final),
        "sweep_var=" + std::string(sweep_var ? to_string(*sweep_var) : "none"),
        "sweep_values=" + list(sweep_values),
        "n_seeds=" + std::to_string(n_seeds),
        "jump_factor=" + format_double(jump_factor),
        "S_split=" + std::to_string(S_split),
        "max_runs=" + std::to_string(max_runs),
        "out_dir=" + out_dir,
        "input=" + input,
    };
}

SweepSpec RunConfig::sweep_spec() const {
    if (!sweep_var) throw ConfigError("sweep_var", "required for a sweep");
    if (sweep_values.empty()) throw ConfigError("sweep_values", "required for a sweep");
    SweepSpec spec;
    spec.variable = *sweep_var;
    spec.values = sweep_values;
    spec.fixed = model;
    spec.seeds = ensemble_seeds(seed, n_seeds);
    spec.max_runs = max_runs;
    return spec;
}

//---------------------------------------------------------------------------//

std::optional<Command> parse_command(std::string_view name) {
    if (name == "ground") return Command::ground;
    if (name == "evolve") return Command::evolve;
    if (name == "potential") return Command::potential;
    if (name == "fit") return Command::fit;
    if (name == "sweep") return Command::sweep;
    return std::nullopt;
}

std::size_t workers_from_environment() {
    const char* env = std::getenv("QAL_WORKERS");
    if (!env || !*env) return 0;
    try {
        return static_cast<std::size_t>(parse_unsigned("QAL_WORKERS", env));
    } catch (const ConfigError&) {
        return 0;
    }
}

namespace {

std::vector<std::string> file_header(std::string_view command, const RunConfig& config) {
    std::vector<std::string> lines{"qal " + std::string(command)};
    for (auto& kv : config.describe()) lines.push_back(std::move(kv));
    return lines;
}

std::string output_path(const RunConfig& config, std::string_view name) {
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / std::string(name)).string();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

std::vector<double> configured_potential(const RunConfig& config, const Grid& grid) {
    return sample_on_grid(make_potential(config.model.V0, config.model.S, grid.half_width(), config.seed), grid);
}

const char* const fit_csv_header = "l_left,l_right,r2_exp_left,r2_exp_right,sigma_gauss,r2_gauss,delta_x,localized,regime";

std::string fit_csv_row(const TailFit& f, const std::optional<Regime>& regime) {
    auto field = [](bool ok, double v) { return ok ? format_double(v) : std::string(); };
    return field(f.left.ok(), f.left.length) + ',' + field(f.right.ok(), f.right.length) + ',' +
           field(f.left.ok(), f.left.r2) + ',' + field(f.right.ok(), f.right.r2) + ',' +
           field(f.gaussian.ok(), f.gaussian.sigma) + ',' + field(f.gaussian.ok(), f.gaussian.r2) + ',' +
           format_double(f.delta_x) + ',' + (f.localized ? "true" : "false") + ',' +
           (regime ? std::string(to_string(*regime)) : std::string());
}

void run_ground(const RunConfig& config, std::ostream& out) {
    GroundStateResult ground{WaveFunction(Grid(1.0, Grid::min_points))};
    const SweepRow row = run_single(config.model, config.seed, SweepVariable::g5, &ground);
    if (!row.diagnostics) throw NumericalBlowupError(row.steps);
    auto header = file_header("ground", config);
    header.push_back("energy=" + format_double(ground.energy));
    header.push_back("chemical_potential=" + format_double(ground.chemical_potential));
    header.push_back("steps=" + std::to_string(ground.steps_taken));
    header.push_back(std::string("converged=") + (ground.converged ? "true" : "false"));
    const auto dump_path = output_path(config, "ground.dump");
    write_dump_file(dump_path, ground.psi, header);
    const auto csv_path = output_path(config, "ground.csv");
    auto csv = open_output(csv_path);
    write_sweep_csv(csv, std::span(&row, 1), file_header("ground", config));
    const auto& d = *row.diagnostics;
    out << "energy=" << format_double(ground.energy) << " chemical_potential="
        << format_double(ground.chemical_potential) << " steps=" << ground.steps_taken
        << " converged=" << (ground.converged ? "true" : "false") << " delta_x=" << format_double(d.delta_x)
        << " peak_x=" << format_double(d.peak_x) << " fragmented="
        << (detect_fragmentation(d, config.frag_threshold) ? "true" : "false") << '\n';
    out << "wrote " << dump_path << " and " << csv_path << '\n';
}

void run_evolve(const RunConfig& config, std::ostream& out) {
    if (config.input.empty()) throw ConfigError("input", "evolve needs an input dump");
    WaveFunction psi = read_dump_file(config.input);
    const auto potential = configured_potential(config, psi.grid());
    SolverParams params = config.model.solver();
    params.mode = TimeMode::real;
    psi = evolve_real(std::move(psi), potential, params, config.t_final);
    const auto path = output_path(config, "evolve.dump");
    write_dump_file(path, psi, file_header("evolve", config));
    out << "norm=" << format_double(psi.norm()) << " delta_x=" << format_double(diagnostics(psi).delta_x) << '\n';
    out << "wrote " << path << '\n';
}

void run_potential(const RunConfig& config, std::ostream& out) {
    const Grid grid = Grid::from_spacing(config.model.half_width, config.model.dx);
    const auto v = configured_potential(config, grid);
    const auto path = output_path(config, "potential.txt");
    auto os = open_output(path);
    for (const auto& line : file_header("potential", config)) os << "# " << line << '\n';
    os << "# x V\n";
    for (std::size_t i = 0; i < grid.size(); ++i) os << format_double(grid.x(i)) << ' ' << format_double(v[i]) << '\n';
    if (!os) throw IoError("failed writing '" + path + "'");
    out << "wrote " << path << '\n';
}

void run_fit(const RunConfig& config, std::ostream& out) {
    if (config.input.empty()) throw ConfigError("input", "fit needs an input dump");
    const WaveFunction psi = read_dump_file(config.input);
    const Diagnostics d = diagnostics(psi);
    const TailFit fit = fit_tails(psi, d, config.model.window);
    std::optional<Regime> regime;
    try {
        regime = classify_regime(fit, d);
    } catch (const ClassificationUnavailableError&) {
    }
    out << fit_csv_header << '\n' << fit_csv_row(fit, regime) << '\n';
}

void run_sweep_command(const RunConfig& config, std::ostream& out, std::size_t workers) {
    const SweepSpec spec = config.sweep_spec();
    const auto rows = run_sweep(spec, workers);
    const auto header = file_header("sweep", config);
    const auto path = output_path(config, "sweep.csv");
    {
        auto os = open_output(path);
        write_sweep_csv(os, rows, header);
    }
    const auto agg_path = output_path(config, "sweep-agg.csv");
    try {
        const auto agg = aggregate(rows);
        auto os = open_output(agg_path);
        write_aggregate_csv(os, spec.variable, agg, header);
    } catch (const ParameterError& e) {
        out << "aggregate unavailable: " << e.what() << '\n';
    }
    out << "wrote " << path << " and " << agg_path << " (" << rows.size() << " runs)\n";
    if (spec.variable == SweepVariable::g5 && spec.values.size() >= 4) {
        const auto g5c = critical_g5(std::span<const SweepRow>(rows), config.jump_factor);
        out << "critical_g5=" << (g5c ? format_double(*g5c) : std::string("none"))
            << (spec.seeds.size() == 1 ? " (single seed)" : " (ensemble median)") << '\n';
    }
    if (spec.variable == SweepVariable::S && spec.values.front() < config.S_split &&
        spec.values.back() >= config.S_split) {
        const auto [low, high] = stabilization_check(rows, config.S_split);
        out << "peak_rel_std S<" << config.S_split << ": " << format_double(low) << "  S>=" << config.S_split
            << ": " << format_double(high) << '\n';
    }
}

}  // namespace

int dispatch(Command command, const RunConfig& config, std::ostream& out, std::ostream& err, std::size_t workers) {
    try {
        switch (command) {
            case Command::ground: run_ground(config, out); break;
            case Command::evolve: run_evolve(config, out); break;
            case Command::potential: run_potential(config, out); break;
            case Command::fit: run_fit(config, out); break;
            case Command::sweep: run_sweep_command(config, out, workers); break;
        }
    } catch (const Error& e) {
        err << "qal: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        err << "qal: " << to_string(ErrorKind::io) << ": " << e.what() << '\n';
        return static_cast<int>(ErrorKind::io);
    }
    return 0;
}

}  // namespace qal
