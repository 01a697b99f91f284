#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qal/config.hpp"
#include "qal/disorder.hpp"
#include "qal/error.hpp"
#include "qal/sweeps.hpp"

namespace py = pybind11;
using namespace qal;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

WaveFunction make_wavefunction(const Grid& grid, const py::array_t<complex, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
    return WaveFunction(grid, std::vector<complex>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_qal, m) {
    m.doc() = "Ground states and localization diagnostics for the quintic NLSE in a random potential";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<DegenerateStateError>(m, "DegenerateStateError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NumericalBlowupError>(m, "NumericalBlowupError", base.ptr());
    py::register_exception<SingularSystemError>(m, "SingularSystemError", base.ptr());
    py::register_exception<ClassificationUnavailableError>(m, "ClassificationUnavailableError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<Grid>(m, "Grid")
        .def(py::init<double, std::size_t>(), py::arg("half_width"), py::arg("n_points"))
        .def_static("from_spacing", &Grid::from_spacing, py::arg("half_width"), py::arg("dx"))
        .def_property_readonly("half_width", &Grid::half_width)
        .def_property_readonly("dx", &Grid::dx)
        .def("__len__", &Grid::size)
        .def_property_readonly("x", [](const Grid& g) { return to_array(g.nodes()); })
        .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
        .def("__repr__", [](const Grid& g) {
            return "Grid(half_width=" + format_double(g.half_width()) + ", n_points=" + std::to_string(g.size()) + ")";
        });

    py::class_<WaveFunction>(m, "WaveFunction")
        .def(py::init<Grid>(), py::arg("grid"))
        .def(py::init(&make_wavefunction), py::arg("grid"), py::arg("values"))
        .def_property_readonly("grid", &WaveFunction::grid)
        .def_property_readonly("values", [](const WaveFunction& w) { return to_array(std::vector<complex>(w.values().begin(), w.values().end())); })
        .def_property_readonly("density", [](const WaveFunction& w) { return to_array(w.density()); })
        .def("norm", &WaveFunction::norm)
        .def("__len__", &WaveFunction::size);

    m.def("normalize", &normalize, py::arg("psi"));
    m.def("gaussian", &gaussian, py::arg("grid"), py::arg("sigma"));
    m.def("read_dump", &read_dump_file, py::arg("path"));
    m.def("write_dump", &write_dump_file, py::arg("path"), py::arg("psi"),
          py::arg("comments") = std::vector<std::string>{});

    m.def(
        "potential",
        [](double V0, std::uint32_t S, std::uint64_t seed, const Grid& grid) {
            return to_array(sample_on_grid(make_potential(V0, S, grid.half_width(), seed), grid));
        },
        py::arg("V0"), py::arg("S"), py::arg("seed"), py::arg("grid"),
        "Piecewise-constant random potential V0*A_n sampled on the grid nodes.");

    py::enum_<TimeMode>(m, "TimeMode").value("real", TimeMode::real).value("imaginary", TimeMode::imaginary);

    py::class_<SolverParams>(m, "SolverParams")
        .def(py::init<>())
        .def_readwrite("dt", &SolverParams::dt)
        .def_readwrite("g5", &SolverParams::g5)
        .def_readwrite("mode", &SolverParams::mode)
        .def_readwrite("max_steps", &SolverParams::max_steps)
        .def_readwrite("energy_tol", &SolverParams::energy_tol)
        .def_readwrite("initial_sigma", &SolverParams::initial_sigma)
        .def_readwrite("check_interval", &SolverParams::check_interval);

    py::class_<GroundStateResult>(m, "GroundStateResult")
        .def_readonly("psi", &GroundStateResult::psi)
        .def_readonly("energy", &GroundStateResult::energy)
        .def_readonly("chemical_potential", &GroundStateResult::chemical_potential)
        .def_readonly("steps_taken", &GroundStateResult::steps_taken)
        .def_readonly("converged", &GroundStateResult::converged)
        .def_readonly("wall_time", &GroundStateResult::wall_time);

    m.def(
        "energy_functionals",
        [](const WaveFunction& psi, const py::array_t<double>& v, double g5) {
            const auto e = energy_functionals(psi, to_vector(v), g5);
            return py::make_tuple(e.energy, e.chemical_potential);
        },
        py::arg("psi"), py::arg("potential"), py::arg("g5"), "(energy, chemical_potential)");
    m.def(
        "ground_state",
        [](const py::array_t<double>& v, const SolverParams& params, const Grid& grid) {
            const auto potential = to_vector(v);
            py::gil_scoped_release release;
            return ground_state(potential, params, grid);
        },
        py::arg("potential"), py::arg("params"), py::arg("grid"));
    m.def(
        "step",
        [](const WaveFunction& psi, const py::array_t<double>& v, const SolverParams& params) {
            return step(psi, to_vector(v), params);
        },
        py::arg("psi"), py::arg("potential"), py::arg("params"));
    m.def(
        "evolve_real",
        [](const WaveFunction& psi, const py::array_t<double>& v, const SolverParams& params, double t_final) {
            const auto potential = to_vector(v);
            py::gil_scoped_release release;
            return evolve_real(psi, potential, params, t_final);
        },
        py::arg("psi"), py::arg("potential"), py::arg("params"), py::arg("t_final"));

    py::class_<Diagnostics>(m, "Diagnostics")
        .def_readonly("mean_x", &Diagnostics::mean_x)
        .def_readonly("peak_x", &Diagnostics::peak_x)
        .def_readonly("peak_height", &Diagnostics::peak_height)
        .def_readonly("delta_x", &Diagnostics::delta_x)
        .def_readonly("norm", &Diagnostics::norm);
    m.def("diagnostics", py::overload_cast<const WaveFunction&>(&diagnostics), py::arg("psi"));
    m.def("detect_fragmentation", &detect_fragmentation, py::arg("diagnostics"),
          py::arg("threshold") = default_fragmentation_threshold);
    m.def("finite_difference", [](const std::vector<SeriesPoint>& s) { return finite_difference(s); },
          py::arg("series"));

    py::enum_<FitStatus>(m, "FitStatus")
        .value("ok", FitStatus::ok)
        .value("insufficient_data", FitStatus::insufficient_data)
        .value("growing_tail", FitStatus::growing_tail);
    py::class_<FitWindow>(m, "FitWindow")
        .def(py::init([](double f_hi, double f_lo) { return FitWindow{f_hi, f_lo}; }), py::arg("f_hi") = 0.5,
             py::arg("f_lo") = 1e-4)
        .def_readwrite("f_hi", &FitWindow::f_hi)
        .def_readwrite("f_lo", &FitWindow::f_lo);
    py::class_<ExponentialTail>(m, "ExponentialTail")
        .def_readonly("status", &ExponentialTail::status)
        .def_readonly("length", &ExponentialTail::length)
        .def_readonly("amplitude", &ExponentialTail::amplitude)
        .def_readonly("r2", &ExponentialTail::r2)
        .def_readonly("points", &ExponentialTail::points)
        .def("ok", &ExponentialTail::ok);
    py::class_<GaussianTail>(m, "GaussianTail")
        .def_readonly("status", &GaussianTail::status)
        .def_readonly("sigma", &GaussianTail::sigma)
        .def_readonly("amplitude", &GaussianTail::amplitude)
        .def_readonly("r2", &GaussianTail::r2)
        .def_readonly("points", &GaussianTail::points)
        .def("ok", &GaussianTail::ok);
    py::class_<TailFit>(m, "TailFit")
        .def_readonly("left", &TailFit::left)
        .def_readonly("right", &TailFit::right)
        .def_readonly("gaussian", &TailFit::gaussian)
        .def_readonly("delta_x", &TailFit::delta_x)
        .def_readonly("localized", &TailFit::localized);
    m.def("fit_tails", &fit_tails, py::arg("psi"), py::arg("diagnostics"), py::arg("window") = FitWindow{});
    m.def(
        "classify_regime",
        [](const TailFit& fit, const Diagnostics& d) { return std::string(to_string(classify_regime(fit, d))); },
        py::arg("fit"), py::arg("diagnostics"),
        "'exponential-localized', 'gaussian-localized' or 'extended'");

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("L", &ModelParams::half_width)
        .def_readwrite("dx", &ModelParams::dx)
        .def_readwrite("dt", &ModelParams::dt)
        .def_readwrite("g5", &ModelParams::g5)
        .def_readwrite("V0", &ModelParams::V0)
        .def_readwrite("S", &ModelParams::S)
        .def_readwrite("sigma0", &ModelParams::sigma0)
        .def_readwrite("energy_tol", &ModelParams::energy_tol)
        .def_readwrite("max_steps", &ModelParams::max_steps)
        .def_readwrite("window", &ModelParams::window)
        .def("solver", &ModelParams::solver)
        .def("validate", &ModelParams::validate);

    py::class_<SweepRow>(m, "SweepRow")
        .def_property_readonly("variable", [](const SweepRow& r) { return std::string(to_string(r.variable)); })
        .def_readonly("g5", &SweepRow::g5)
        .def_readonly("V0", &SweepRow::V0)
        .def_readonly("S", &SweepRow::S)
        .def_readonly("seed", &SweepRow::seed)
        .def_readonly("converged", &SweepRow::converged)
        .def_readonly("steps", &SweepRow::steps)
        .def_readonly("energy", &SweepRow::energy)
        .def_readonly("wall_time", &SweepRow::wall_time)
        .def_readonly("diagnostics", &SweepRow::diagnostics)
        .def_readonly("tailfit", &SweepRow::tailfit)
        .def_property_readonly("regime", [](const SweepRow& r) -> std::optional<std::string> {
            if (!r.regime) return std::nullopt;
            return std::string(to_string(*r.regime));
        })
        .def_readonly("status", &SweepRow::status)
        .def_property_readonly("value", &SweepRow::value);

    m.def(
        "run_single",
        [](const ModelParams& p, std::uint64_t seed) {
            py::gil_scoped_release release;
            return run_single(p, seed);
        },
        py::arg("params"), py::arg("seed"));
    m.def(
        "run_sweep",
        [](const std::string& variable, std::vector<double> values, const ModelParams& fixed,
           std::vector<std::uint64_t> seeds, std::size_t workers, std::size_t max_runs) {
            SweepSpec spec;
            spec.variable = parse_sweep_variable(variable);
            spec.values = std::move(values);
            spec.fixed = fixed;
            spec.seeds = std::move(seeds);
            spec.max_runs = max_runs;
            py::gil_scoped_release release;
            return run_sweep(spec, workers);
        },
        py::arg("variable"), py::arg("values"), py::arg("fixed"), py::arg("seeds"), py::arg("workers") = 0,
        py::arg("max_runs") = 100'000);
    m.def("ensemble_seeds", &ensemble_seeds, py::arg("base"), py::arg("count"));
    m.def(
        "critical_g5",
        [](const std::vector<SeriesPoint>& series, double jump_factor) { return critical_g5(series, jump_factor); },
        py::arg("series"), py::arg("jump_factor") = default_jump_factor);
    m.def(
        "critical_g5_rows",
        [](const std::vector<SweepRow>& rows, double jump_factor) {
            return critical_g5(std::span<const SweepRow>(rows), jump_factor);
        },
        py::arg("rows"), py::arg("jump_factor") = default_jump_factor);
    m.def(
        "stabilization_check",
        [](const std::vector<SweepRow>& rows, std::uint32_t S_split) { return stabilization_check(rows, S_split); },
        py::arg("rows"), py::arg("S_split") = 200);
    m.def(
        "median_delta_x", [](const std::vector<SweepRow>& rows) { return median_delta_x(rows); }, py::arg("rows"));
    m.def(
        "summarize",
        [](std::vector<double> v) {
            const auto s = summarize(std::move(v));
            return py::make_tuple(s.count, s.median, s.iqr);
        },
        py::arg("values"), "(count, median, iqr)");
    m.def(
        "sweep_csv",
        [](const std::vector<SweepRow>& rows) {
            std::ostringstream os;
            write_sweep_csv(os, rows);
            return os.str();
        },
        py::arg("rows"));
}
