#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdlsd/autocov.hpp"
#include "hdlsd/harness.hpp"
#include "hdlsd/inversion.hpp"
#include "hdlsd/io.hpp"
#include "hdlsd/lsd_solver.hpp"
#include "hdlsd/simulate.hpp"
#include "hdlsd/spectra.hpp"

namespace py = pybind11;
using namespace hdlsd;

namespace {

// Models, tapers and configs cross the boundary as JSON text.
ProcessModel parse_model(const std::string& text) { return model_from_json(Json::parse(text)); }

SolverConfig solver_config(std::size_t grid, double tol, const std::string& method) {
    SolverConfig cfg;
    cfg.nu_grid_size = grid;
    cfg.tol = tol;
    if (method == "newton") cfg.method = SolverMethod::Newton;
    else if (method == "fixed_point") cfg.method = SolverMethod::FixedPoint;
    else throw std::invalid_argument("unknown solver method '" + method + "'");
    cfg.validate();
    return cfg;
}

py::object to_numpy(const DenseMatrix& m) {
    return std::visit([](const auto& mat) -> py::object { return py::cast(mat); }, m);
}

PathMatrix path_from_numpy(py::array array) {
    if (array.ndim() != 2) throw std::invalid_argument("expected a 2-d array (p x n)");
    PathMatrix path;
    path.meta.p = static_cast<std::size_t>(array.shape(0));
    path.meta.n = static_cast<std::size_t>(array.shape(1));
    if (py::isinstance<py::array_t<std::complex<double>>>(array) || array.dtype().kind() == 'c')
        path.entries = array.cast<ComplexMatrix>();
    else
        path.entries = array.cast<RealMatrix>();
    return path;
}

DenseMatrix matrix_from_numpy(py::array array) {
    if (array.dtype().kind() == 'c') return array.cast<ComplexMatrix>();
    return array.cast<RealMatrix>();
}

py::dict curve_dict(const SpectralCurve& curve) {
    py::dict d;
    d["x"] = py::array(py::cast(curve.x));
    d["density"] = py::array(py::cast(curve.density));
    d["cdf"] = py::array(py::cast(curve.cdf));
    d["atom0"] = curve.atom_at_zero;
    d["total_mass"] = curve.total_mass;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hdlsd, m) {
    m.doc() = "Spectra of symmetrized autocovariance matrices and their limits";

    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "validate_model",
        [](const std::string& model) { return validation_json(validate_assumptions(parse_model(model))).dump(); },
        py::arg("model"));

    m.def(
        "simulate",
        [](const std::string& model, std::size_t p, std::size_t n, std::optional<std::size_t> q, std::uint64_t seed,
           std::uint64_t replicate, bool circulant) {
            const auto mdl = parse_model(model);
            const std::size_t order = q.value_or(default_truncation(mdl.family, p));
            const auto path = circulant ? simulate_circulant_path(mdl, p, n, order, seed, replicate)
                                        : simulate_path(mdl, p, n, order, seed, replicate);
            return to_numpy(path.entries);
        },
        py::arg("model"), py::arg("p"), py::arg("n"), py::arg("q") = py::none(), py::arg("seed") = 0,
        py::arg("replicate") = 0, py::arg("circulant") = false);

    m.def(
        "sym_autocov", [](py::array x, std::size_t tau) { return to_numpy(sym_autocov(path_from_numpy(x), tau).matrix); },
        py::arg("x"), py::arg("tau"));

    m.def(
        "tapered_spectral",
        [](py::array x, const std::string& taper, double eta) {
            return to_numpy(tapered_spectral(path_from_numpy(x), taper_from_json(Json::parse(taper)), eta).matrix);
        },
        py::arg("x"), py::arg("taper"), py::arg("eta"));

    m.def(
        "eigenvalues", [](py::array a) { return eigenvalues(matrix_from_numpy(a)); }, py::arg("matrix"));

    m.def(
        "ks_distance",
        [](std::vector<double> a, std::vector<double> b) {
            return ks_distance(Esd::from_values(std::move(a)), Esd::from_values(std::move(b)));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "stieltjes_lsd",
        [](const std::string& model, double c, std::size_t tau, std::complex<double> z, std::size_t grid, double tol,
           const std::string& method) {
            const auto mdl = parse_model(model);
            const auto kernel = solve_kernel(mdl, c, tau, z, solver_config(grid, tol, method));
            return stieltjes_lsd(mdl, c, tau, z, kernel);
        },
        py::arg("model"), py::arg("c"), py::arg("tau"), py::arg("z"), py::arg("grid") = 512, py::arg("tol") = 1e-10,
        py::arg("method") = "newton");

    m.def(
        "solve_kernel",
        [](const std::string& model, double c, std::size_t tau, std::complex<double> z, std::size_t grid, double tol,
           const std::string& method) {
            const auto k = solve_kernel(parse_model(model), c, tau, z, solver_config(grid, tol, method));
            py::dict d;
            d["nu"] = py::array(py::cast(k.nu));
            d["K"] = py::array(py::cast(k.values));
            d["converged"] = k.converged;
            d["residual"] = k.residual;
            d["iterations"] = k.iterations;
            return d;
        },
        py::arg("model"), py::arg("c"), py::arg("tau"), py::arg("z"), py::arg("grid") = 512, py::arg("tol") = 1e-10,
        py::arg("method") = "newton");

    m.def(
        "stieltjes_tapered",
        [](const std::string& model, double c, const std::string& taper, double eta, std::complex<double> z,
           std::size_t grid, double tol) {
            const auto mdl = parse_model(model);
            const auto tp = taper_from_json(Json::parse(taper));
            const auto kernel = solve_tapered_kernel(mdl, c, tp, eta, z, solver_config(grid, tol, "newton"));
            return stieltjes_tapered(mdl, c, tp, eta, z, kernel);
        },
        py::arg("model"), py::arg("c"), py::arg("taper"), py::arg("eta"), py::arg("z"), py::arg("grid") = 512,
        py::arg("tol") = 1e-10);

    m.def(
        "lsd_curve",
        [](const std::string& model, double c, std::size_t tau, std::size_t x_points, std::size_t grid) {
            SolverConfig cfg;
            cfg.nu_grid_size = grid;
            return curve_dict(lsd_curve(parse_model(model), c, tau, cfg, {}, x_points));
        },
        py::arg("model"), py::arg("c"), py::arg("tau"), py::arg("x_points") = 1024, py::arg("grid") = 512);

    m.def(
        "run_experiment",
        [](const std::string& config, const std::string& mode, const std::string& out) {
            auto cfg = config_from_json(Json::parse(config));
            if (!mode.empty()) cfg.mode = run_mode_from(mode);
            py::gil_scoped_release release;
            return run_experiment(cfg, out).summary().dump();
        },
        py::arg("config"), py::arg("mode"), py::arg("out"));
}
