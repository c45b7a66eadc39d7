#include "hdlsd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "hdlsd/autocov.hpp"
#include "hdlsd/simulate.hpp"

namespace hdlsd {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must be written
// into per-index slots so the outcome is independent of scheduling.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void finish_ks(CellReport& cell) {
    if (cell.ks.empty()) return;
    cell.ks_median = median(cell.ks);
    cell.ks_max = *std::max_element(cell.ks.begin(), cell.ks.end());
}

std::ofstream open_out(const fs::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    return os;
}

std::ifstream open_in(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    return is;
}

std::vector<double> parse_row(const std::string& line, std::size_t expected, const fs::path& file) {
    std::vector<double> out;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
        const char* comma = std::find(p, end, ',');
        double x = 0.0;
        const auto res = std::from_chars(p, comma, x);
        if (res.ec != std::errc() || res.ptr != comma) throw std::runtime_error(file.string() + ": bad number in '" + line + "'");
        out.push_back(x);
        if (comma == end) break;
        p = comma + 1;
    }
    if (out.size() != expected) throw std::runtime_error(file.string() + ": wrong column count");
    return out;
}

void write_json(const fs::path& file, const Json& doc) {
    auto os = open_out(file);
    os << doc.dump(2) << '\n';
}

std::string cell_name(std::size_t tau, std::size_t p) {
    return "tau" + std::to_string(tau) + "_p" + std::to_string(p);
}

void prepare_output(const ExperimentConfig& config, const fs::path& out) {
    fs::create_directories(out);
    write_json(out / "config.json", to_json(config));
}

RunReport finalize(RunReport report, const fs::path& out) {
    write_json(out / "summary.json", report.summary());
    write_json(out / "timing.json", report.timing());
    return report;
}

std::size_t truncation_for(const ExperimentConfig& config, std::size_t p) {
    return config.q.value_or(default_truncation(config.model.family, p));
}

// Simulates every (p, replicate) once and hands the path to `consume`.
// Errors are recorded per (p, replicate) slot.
struct PathJob {
    std::size_t p_index;
    std::size_t replicate;
};

std::vector<PathJob> path_jobs(const ExperimentConfig& config) {
    std::vector<PathJob> jobs;
    for (std::size_t i = 0; i < config.p_list.size(); ++i)
        for (std::size_t r = 0; r < config.replicates; ++r) jobs.push_back({i, r});
    return jobs;
}

// ESDs of C_tau for every (p, tau, replicate); failures land in `errors`.
struct EsdTable {
    // [p_index][tau_index][replicate]
    std::vector<std::vector<std::vector<std::optional<Esd>>>> esd;
    std::vector<std::vector<std::string>> errors;  // [p_index][tau_index]
    std::vector<std::vector<double>> seconds;      // [p_index][tau_index]
};

EsdTable simulate_esds(const ExperimentConfig& config, const fs::path& out, bool write_files) {
    const auto& taus = config.taus;
    EsdTable table;
    table.esd.assign(config.p_list.size(),
                     std::vector<std::vector<std::optional<Esd>>>(taus.size(),
                                                                  std::vector<std::optional<Esd>>(config.replicates)));
    table.errors.assign(config.p_list.size(), std::vector<std::string>(taus.size()));
    table.seconds.assign(config.p_list.size(), std::vector<double>(taus.size(), 0.0));
    std::mutex mu;

    const auto jobs = path_jobs(config);
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const auto [pi, r] = jobs[j];
        const std::size_t p = config.p_list[pi];
        const auto start = Clock::now();
        try {
            const auto path = simulate_path(config.model, p, config.n_for(p), truncation_for(config, p), config.seed, r);
            for (std::size_t ti = 0; ti < taus.size(); ++ti) {
                try {
                    Esd esd = Esd::of(sym_autocov(path, taus[ti]).matrix);
                    if (write_files)
                        write_esd_csv(out / ("esd_" + cell_name(taus[ti], p) + "_r" + std::to_string(r) + ".csv"), esd);
                    table.esd[pi][ti][r] = std::move(esd);
                } catch (const std::exception& e) {
                    std::lock_guard lock(mu);
                    if (table.errors[pi][ti].empty()) table.errors[pi][ti] = e.what();
                }
            }
        } catch (const std::exception& e) {
            std::lock_guard lock(mu);
            for (auto& err : table.errors[pi])
                if (err.empty()) err = e.what();
        }
        std::lock_guard lock(mu);
        for (auto& s : table.seconds[pi]) s += seconds_since(start);
    });
    return table;
}

}  // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Simulate: return "simulate";
        case RunMode::Esd: return "esd";
        case RunMode::Lsd: return "lsd";
        case RunMode::Compare: return "compare";
        case RunMode::Taper: return "taper";
    }
    return "unknown";
}

RunMode run_mode_from(const std::string& name) {
    if (name == "simulate") return RunMode::Simulate;
    if (name == "esd") return RunMode::Esd;
    if (name == "lsd") return RunMode::Lsd;
    if (name == "compare") return RunMode::Compare;
    if (name == "taper") return RunMode::Taper;
    throw ConfigError("unknown mode '" + name + "'");
}

std::size_t ExperimentConfig::n_for(std::size_t p) const {
    return static_cast<std::size_t>(std::llround(static_cast<double>(p) / c));
}

void ExperimentConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("c must be positive");
    for (double x : c_list)
        if (!(x > 0.0)) throw ConfigError("c_list entries must be positive");
    if (taus.empty() && mode != RunMode::Taper && mode != RunMode::Simulate) throw ConfigError("taus must not be empty");
    if (replicates == 0) throw ConfigError("replicates must be >= 1");
    if (x_points < 2) throw ConfigError("x_points must be >= 2");
    if (mode != RunMode::Lsd) {
        if (p_list.empty()) throw ConfigError("p_list must not be empty");
        const std::size_t max_tau = taus.empty() ? 0 : *std::max_element(taus.begin(), taus.end());
        for (std::size_t p : p_list) {
            if (p == 0) throw ConfigError("p must be >= 1");
            if (n_for(p) < max_tau + 1) throw ConfigError("n = round(p/c) must exceed the largest lag");
        }
    }
    if (mode == RunMode::Taper && !taper) throw ConfigError("taper mode needs a 'taper' block");
    try {
        solver.validate();
        require_valid(model);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig config_from_json(const Json& doc) {
    try {
        ExperimentConfig cfg;
        cfg.model = model_from_json(doc.at("model"));
        cfg.c = doc.at("c").get<double>();
        if (doc.contains("c_list")) cfg.c_list = doc["c_list"].get<std::vector<double>>();
        if (doc.contains("p_list")) cfg.p_list = doc["p_list"].get<std::vector<std::size_t>>();
        if (doc.contains("taus")) cfg.taus = doc["taus"].get<std::vector<std::size_t>>();
        cfg.replicates = doc.value("replicates", std::size_t{1});
        cfg.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("q")) cfg.q = doc["q"].get<std::size_t>();
        if (doc.contains("solver")) {
            const auto& s = doc["solver"];
            cfg.solver.nu_grid_size = s.value("nu_grid_size", cfg.solver.nu_grid_size);
            cfg.solver.tol = s.value("tol", cfg.solver.tol);
            cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
            cfg.solver.damping = s.value("damping", cfg.solver.damping);
            cfg.solver.continuation_factor = s.value("continuation_factor", cfg.solver.continuation_factor);
            cfg.solver.v_start_multiplier = s.value("v_start_multiplier", cfg.solver.v_start_multiplier);
            const auto method = s.value("method", std::string("newton"));
            if (method == "newton") cfg.solver.method = SolverMethod::Newton;
            else if (method == "fixed_point") cfg.solver.method = SolverMethod::FixedPoint;
            else throw ConfigError("unknown solver method '" + method + "'");
        }
        cfg.mode = run_mode_from(doc.value("mode", std::string("compare")));
        if (doc.contains("taper")) cfg.taper = taper_from_json(doc["taper"]);
        if (doc.contains("etas")) cfg.etas = doc["etas"].get<std::vector<double>>();
        if (doc.contains("inversion")) {
            const auto& inv = doc["inversion"];
            cfg.x_points = inv.value("x_points", cfg.x_points);
            if (inv.contains("v")) cfg.inversion.v = inv["v"].get<std::vector<double>>();
            cfg.inversion.extrapolation_points =
                inv.value("extrapolation_points", cfg.inversion.extrapolation_points);
        }
        cfg.threads = doc.value("threads", std::size_t{1});
        return cfg;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Json to_json(const ExperimentConfig& config) {
    Json solver{{"nu_grid_size", config.solver.nu_grid_size},
                {"tol", config.solver.tol},
                {"max_iter", config.solver.max_iter},
                {"damping", config.solver.damping},
                {"continuation_factor", config.solver.continuation_factor},
                {"v_start_multiplier", config.solver.v_start_multiplier},
                {"method", config.solver.method == SolverMethod::Newton ? "newton" : "fixed_point"}};
    Json doc{{"model", to_json(config.model)},
             {"c", config.c},
             {"p_list", config.p_list},
             {"taus", config.taus},
             {"replicates", config.replicates},
             {"seed", config.seed},
             {"solver", solver},
             {"mode", to_string(config.mode)},
             {"etas", config.etas},
             {"inversion",
              {{"x_points", config.x_points},
               {"v", config.inversion.v},
               {"extrapolation_points", config.inversion.extrapolation_points}}}};
    if (!config.c_list.empty()) doc["c_list"] = config.c_list;
    if (config.q) doc["q"] = *config.q;
    if (config.taper) doc["taper"] = to_json(*config.taper);
    return doc;
}

ExperimentConfig load_config(const fs::path& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot open config " + file.string());
    Json doc;
    try {
        is >> doc;
    } catch (const Json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

ProcessModel model_for_dimension(const ProcessModel& model, std::size_t p) {
    ProcessModel out = model;
    if (model.family.is_truncated()) {
        const auto cube = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(p)) - 1e-12));
        out.family = model.family.with_q_max(std::max(model.family.q_max, cube));
    }
    return out;
}

SpectralCurve lsd_curve(const ProcessModel& model, double c, std::size_t tau, const SolverConfig& solver,
                        const InversionOptions& inversion, std::size_t x_points, double* max_residual) {
    LimitTransform transform(lag_problem(model, c, tau, solver.nu_grid_size), solver);
    const auto& pb = transform.problem();
    const auto grid = default_x_grid(c, pb.h_bound * pb.gamma_bound, x_points);
    auto curve = density_curve(std::ref(transform), grid, inversion);
    if (max_residual) *max_residual = transform.max_residual();
    return curve;
}

SpectralCurve tapered_curve(const ProcessModel& model, double c, const TaperSpec& taper, double eta,
                            const SolverConfig& solver, const InversionOptions& inversion, std::size_t x_points,
                            double* max_residual) {
    LimitTransform transform(tapered_problem(model, c, taper, eta, solver.nu_grid_size), solver);
    const auto& pb = transform.problem();
    const auto grid = default_x_grid(c, pb.h_bound * pb.gamma_bound, x_points);
    auto curve = density_curve(std::ref(transform), grid, inversion);
    if (max_residual) *max_residual = transform.max_residual();
    return curve;
}

void write_esd_csv(const fs::path& file, const Esd& esd) {
    auto os = open_out(file);
    os << "sigma\n";
    for (double s : esd.eigenvalues) os << format_double(s) << '\n';
}

Esd read_esd_csv(const fs::path& file) {
    auto is = open_in(file);
    std::string line;
    std::getline(is, line);
    if (line != "sigma") throw std::runtime_error(file.string() + ": expected header 'sigma'");
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        values.push_back(parse_row(line, 1, file)[0]);
    }
    return Esd::from_values(std::move(values));
}

void write_curve_csv(const fs::path& file, const SpectralCurve& curve) {
    auto os = open_out(file);
    os << "# atom0=" << format_double(curve.atom_at_zero) << '\n';
    os << "x,density,cdf\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        os << format_double(curve.x[i]) << ',' << format_double(curve.density[i]) << ',' << format_double(curve.cdf[i])
           << '\n';
}

SpectralCurve read_curve_csv(const fs::path& file) {
    auto is = open_in(file);
    SpectralCurve curve;
    std::string line;
    std::getline(is, line);
    const std::string prefix = "# atom0=";
    if (line.rfind(prefix, 0) != 0) throw std::runtime_error(file.string() + ": missing atom0 comment");
    curve.atom_at_zero = parse_row(line.substr(prefix.size()), 1, file)[0];
    std::getline(is, line);
    if (line != "x,density,cdf") throw std::runtime_error(file.string() + ": expected header 'x,density,cdf'");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto row = parse_row(line, 3, file);
        curve.x.push_back(row[0]);
        curve.density.push_back(row[1]);
        curve.cdf.push_back(row[2]);
    }
    if (curve.x.size() < 2) throw std::runtime_error(file.string() + ": curve needs at least two rows");
    curve.total_mass = curve.cdf.back();
    return curve;
}

void write_kernel_csv(const fs::path& file, const StieltjesKernelGrid& kernel) {
    auto os = open_out(file);
    os << "nu,re_K,im_K\n";
    for (std::size_t i = 0; i < kernel.values.size(); ++i)
        os << format_double(kernel.nu[i]) << ',' << format_double(kernel.values[i].real()) << ','
           << format_double(kernel.values[i].imag()) << '\n';
}

void write_transform_csv(const fs::path& file, const std::vector<Complex>& z, const std::vector<Complex>& s) {
    if (z.size() != s.size()) throw std::invalid_argument("z and s tables differ in length");
    auto os = open_out(file);
    os << "re_z,im_z,re_s,im_s\n";
    for (std::size_t i = 0; i < z.size(); ++i)
        os << format_double(z[i].real()) << ',' << format_double(z[i].imag()) << ',' << format_double(s[i].real())
           << ',' << format_double(s[i].imag()) << '\n';
}

bool RunReport::all_ok() const {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.ok; });
}

Json RunReport::summary() const {
    Json cells_json = Json::array();
    for (const auto& cell : cells) {
        Json j{{"name", cell.name}, {"c", cell.c}, {"status", cell.ok ? "ok" : "failed"}};
        if (cell.p) {
            j["p"] = cell.p;
            j["n"] = cell.n;
        }
        if (cell.eta) j["eta"] = *cell.eta;
        else j["tau"] = cell.tau;
        if (!cell.ok) j["error"] = cell.error;
        if (!cell.ks.empty()) j["ks"] = {{"values", cell.ks}, {"median", cell.ks_median}, {"max", cell.ks_max}};
        if (mode == RunMode::Compare || mode == RunMode::Lsd || mode == RunMode::Taper)
            j["lsd"] = {{"max_residual", cell.max_residual},
                        {"atom_at_zero", cell.atom_at_zero},
                        {"total_mass", cell.total_mass}};
        cells_json.push_back(std::move(j));
    }
    return Json{{"mode", to_string(mode)}, {"all_ok", all_ok()}, {"cells", cells_json}};
}

Json RunReport::timing() const {
    Json cells_json = Json::array();
    for (const auto& cell : cells) cells_json.push_back({{"name", cell.name}, {"seconds", cell.seconds}});
    return Json{{"mode", to_string(mode)}, {"cells", cells_json}};
}

RunReport run_experiment(const ExperimentConfig& config, const fs::path& out) {
    switch (config.mode) {
        case RunMode::Simulate: return run_simulate(config, out);
        case RunMode::Esd: return run_esd(config, out);
        case RunMode::Lsd: return run_lsd(config, out);
        case RunMode::Compare: return run_compare(config, out);
        case RunMode::Taper: return run_taper(config, out);
    }
    throw ConfigError("unknown mode");
}

RunReport run_simulate(const ExperimentConfig& config, const fs::path& out) {
    config.validate();
    prepare_output(config, out);
    RunReport report;
    report.mode = RunMode::Simulate;
    const auto jobs = path_jobs(config);
    report.cells.resize(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const auto [pi, r] = jobs[j];
        const std::size_t p = config.p_list[pi];
        auto& cell = report.cells[j];
        cell.name = "p" + std::to_string(p) + "_r" + std::to_string(r);
        cell.c = config.c;
        cell.p = p;
        cell.n = config.n_for(p);
        const auto start = Clock::now();
        try {
            const auto path = simulate_path(config.model, p, cell.n, truncation_for(config, p), config.seed, r);
            write_path(out / ("path_" + cell.name + ".bin"), path);
            for (std::size_t tau : config.taus) {
                const auto cov = sym_autocov(path, tau);
                ContainerHeader h{p, p, tau, "autocov", path.is_complex(), path.meta.seed, path.meta.model_hash};
                write_container(out / ("autocov_tau" + std::to_string(tau) + "_" + cell.name + ".bin"), h, cov.matrix);
            }
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        cell.seconds = seconds_since(start);
    });
    return finalize(std::move(report), out);
}

RunReport run_esd(const ExperimentConfig& config, const fs::path& out) {
    config.validate();
    prepare_output(config, out);
    const auto table = simulate_esds(config, out, true);
    RunReport report;
    report.mode = RunMode::Esd;
    for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        for (std::size_t ti = 0; ti < config.taus.size(); ++ti) {
            CellReport cell;
            cell.p = config.p_list[pi];
            cell.n = config.n_for(cell.p);
            cell.c = config.c;
            cell.tau = config.taus[ti];
            cell.name = cell_name(cell.tau, cell.p);
            cell.ok = table.errors[pi][ti].empty();
            cell.error = table.errors[pi][ti];
            cell.seconds = table.seconds[pi][ti];
            report.cells.push_back(std::move(cell));
        }
    }
    return finalize(std::move(report), out);
}

RunReport run_lsd(const ExperimentConfig& config, const fs::path& out) {
    config.validate();
    prepare_output(config, out);
    const std::vector<double> cs = config.c_list.empty() ? std::vector<double>{config.c} : config.c_list;
    RunReport report;
    report.mode = RunMode::Lsd;
    for (double c : cs) {
        for (std::size_t tau : config.taus) {
            CellReport cell;
            cell.c = c;
            cell.tau = tau;
            cell.name = "tau" + std::to_string(tau) + "_c" + format_double(c);
            report.cells.push_back(std::move(cell));
        }
    }
    parallel_for(report.cells.size(), config.threads, [&](std::size_t i) {
        auto& cell = report.cells[i];
        const auto start = Clock::now();
        try {
            const auto curve = lsd_curve(config.model, cell.c, cell.tau, config.solver, config.inversion,
                                         config.x_points, &cell.max_residual);
            cell.atom_at_zero = curve.atom_at_zero;
            cell.total_mass = curve.total_mass;
            write_curve_csv(out / ("curve_" + cell.name + ".csv"), curve);
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        cell.seconds = seconds_since(start);
    });
    return finalize(std::move(report), out);
}

RunReport run_compare(const ExperimentConfig& config, const fs::path& out) {
    config.validate();
    prepare_output(config, out);
    const auto table = simulate_esds(config, out, true);

    RunReport report;
    report.mode = RunMode::Compare;
    std::vector<std::pair<std::size_t, std::size_t>> index;
    for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        for (std::size_t ti = 0; ti < config.taus.size(); ++ti) {
            CellReport cell;
            cell.p = config.p_list[pi];
            cell.n = config.n_for(cell.p);
            cell.c = config.c;
            cell.tau = config.taus[ti];
            cell.name = cell_name(cell.tau, cell.p);
            cell.seconds = table.seconds[pi][ti];
            report.cells.push_back(std::move(cell));
            index.emplace_back(pi, ti);
        }
    }
    parallel_for(report.cells.size(), config.threads, [&](std::size_t i) {
        auto& cell = report.cells[i];
        const auto [pi, ti] = index[i];
        const auto start = Clock::now();
        try {
            if (!table.errors[pi][ti].empty()) throw std::runtime_error(table.errors[pi][ti]);
            const auto model = model_for_dimension(config.model, cell.p);
            const auto curve = lsd_curve(model, config.c, cell.tau, config.solver, config.inversion, config.x_points,
                                         &cell.max_residual);
            cell.atom_at_zero = curve.atom_at_zero;
            cell.total_mass = curve.total_mass;
            write_curve_csv(out / ("curve_" + cell.name + ".csv"), curve);
            const auto curve_view = cdf_view(curve);
            for (const auto& esd : table.esd[pi][ti]) cell.ks.push_back(ks_distance(cdf_view(*esd), curve_view));
            finish_ks(cell);
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        cell.seconds += seconds_since(start);
    });
    return finalize(std::move(report), out);
}

RunReport run_taper(const ExperimentConfig& config, const fs::path& out) {
    config.validate();
    prepare_output(config, out);
    const auto& taper = *config.taper;
    RunReport report;
    report.mode = RunMode::Taper;

    struct Slot {
        std::size_t pi, ei;
    };
    std::vector<Slot> slots;
    for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        for (std::size_t ei = 0; ei < config.etas.size(); ++ei) {
            CellReport cell;
            cell.p = config.p_list[pi];
            cell.n = config.n_for(cell.p);
            cell.c = config.c;
            cell.eta = config.etas[ei];
            cell.name = "taper_eta" + std::to_string(ei) + "_p" + std::to_string(cell.p);
            report.cells.push_back(std::move(cell));
            slots.push_back({pi, ei});
        }
    }

    // ESDs: [cell][replicate]
    std::vector<std::vector<std::optional<Esd>>> esds(report.cells.size(),
                                                      std::vector<std::optional<Esd>>(config.replicates));
    std::vector<std::string> errors(report.cells.size());
    std::mutex mu;
    const auto jobs = path_jobs(config);
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const auto [pi, r] = jobs[j];
        const std::size_t p = config.p_list[pi];
        try {
            const auto path = simulate_path(config.model, p, config.n_for(p), truncation_for(config, p), config.seed, r);
            for (std::size_t i = 0; i < slots.size(); ++i) {
                if (slots[i].pi != pi) continue;
                Esd esd = Esd::of(tapered_spectral(path, taper, config.etas[slots[i].ei]).matrix);
                write_esd_csv(out / ("esd_" + report.cells[i].name + "_r" + std::to_string(r) + ".csv"), esd);
                esds[i][r] = std::move(esd);
            }
        } catch (const std::exception& e) {
            std::lock_guard lock(mu);
            for (std::size_t i = 0; i < slots.size(); ++i)
                if (slots[i].pi == pi && errors[i].empty()) errors[i] = e.what();
        }
    });

    parallel_for(report.cells.size(), config.threads, [&](std::size_t i) {
        auto& cell = report.cells[i];
        const auto start = Clock::now();
        try {
            if (!errors[i].empty()) throw std::runtime_error(errors[i]);
            const auto model = model_for_dimension(config.model, cell.p);
            const auto curve = tapered_curve(model, config.c, taper, *cell.eta, config.solver, config.inversion,
                                             config.x_points, &cell.max_residual);
            cell.atom_at_zero = curve.atom_at_zero;
            cell.total_mass = curve.total_mass;
            write_curve_csv(out / ("curve_" + cell.name + ".csv"), curve);
            const auto curve_view = cdf_view(curve);
            for (const auto& esd : esds[i]) cell.ks.push_back(ks_distance(cdf_view(*esd), curve_view));
            finish_ks(cell);
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        cell.seconds = seconds_since(start);
    });
    return finalize(std::move(report), out);
}

Json validation_json(const ValidationReport& report) {
    Json checks = Json::array();
    for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return Json{{"passed", report.passed()},
                {"checks", checks},
                {"bounds", {{"sum_sup", report.bounds.sum_sup}, {"lag_weighted_sum", report.bounds.lag_weighted_sum}}}};
}

}  // namespace hdlsd
