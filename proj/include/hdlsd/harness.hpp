#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hdlsd/inversion.hpp"
#include "hdlsd/io.hpp"
#include "hdlsd/lsd_solver.hpp"
#include "hdlsd/model.hpp"
#include "hdlsd/spectra.hpp"

namespace hdlsd {

enum class RunMode { Simulate, Esd, Lsd, Compare, Taper };

std::string to_string(RunMode mode);
RunMode run_mode_from(const std::string& name);

/// Thrown for malformed or inconsistent experiment configurations (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ProcessModel model;
    double c = 0.5;
    std::vector<double> c_list;  // lsd mode only; defaults to {c}
    std::vector<std::size_t> p_list;
    std::vector<std::size_t> taus = {0};
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    std::optional<std::size_t> q;
    SolverConfig solver;
    RunMode mode = RunMode::Compare;
    std::optional<TaperSpec> taper;
    std::vector<double> etas = {0.0};
    std::size_t x_points = 1024;
    InversionOptions inversion;
    std::size_t threads = 1;

    /// n = round(p / c).
    std::size_t n_for(std::size_t p) const;

    /// Throws ConfigError when the configuration is unusable for its mode.
    void validate() const;
};

ExperimentConfig config_from_json(const Json& doc);
Json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Model used for the limit at dimension p: ARMA truncation raised to max(q_max, ceil(p^{1/3})).
ProcessModel model_for_dimension(const ProcessModel& model, std::size_t p);

/// Limiting spectral curve of C_tau on the default x grid.
SpectralCurve lsd_curve(const ProcessModel& model, double c, std::size_t tau, const SolverConfig& solver,
                        const InversionOptions& inversion, std::size_t x_points = 1024,
                        double* max_residual = nullptr);

/// Limiting spectral curve of the tapered estimator at frequency eta.
SpectralCurve tapered_curve(const ProcessModel& model, double c, const TaperSpec& taper, double eta,
                            const SolverConfig& solver, const InversionOptions& inversion,
                            std::size_t x_points = 1024, double* max_residual = nullptr);

// CSV files: '.' decimal, ',' separator, LF endings, round-trip precision.
void write_esd_csv(const std::filesystem::path& file, const Esd& esd);
Esd read_esd_csv(const std::filesystem::path& file);
void write_curve_csv(const std::filesystem::path& file, const SpectralCurve& curve);
SpectralCurve read_curve_csv(const std::filesystem::path& file);
void write_kernel_csv(const std::filesystem::path& file, const StieltjesKernelGrid& kernel);
void write_transform_csv(const std::filesystem::path& file, const std::vector<Complex>& z,
                         const std::vector<Complex>& s);

struct CellReport {
    std::string name;
    double c = 0.0;
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t tau = 0;
    std::optional<double> eta;
    bool ok = true;
    std::string error;
    std::vector<double> ks;
    double ks_median = 0.0;
    double ks_max = 0.0;
    double max_residual = 0.0;
    double atom_at_zero = 0.0;
    double total_mass = 0.0;
    double seconds = 0.0;
};

struct RunReport {
    RunMode mode = RunMode::Compare;
    std::vector<CellReport> cells;

    bool all_ok() const;
    /// Deterministic summary (no timings).
    Json summary() const;
    /// Wall-clock timings per cell.
    Json timing() const;
};

/// Runs the configured mode into `out` (created if needed), writing config.json,
/// the per-cell CSV/binary files, summary.json and timing.json.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out);

RunReport run_compare(const ExperimentConfig& config, const std::filesystem::path& out);
RunReport run_esd(const ExperimentConfig& config, const std::filesystem::path& out);
RunReport run_lsd(const ExperimentConfig& config, const std::filesystem::path& out);
RunReport run_taper(const ExperimentConfig& config, const std::filesystem::path& out);
RunReport run_simulate(const ExperimentConfig& config, const std::filesystem::path& out);

/// Validation report as JSON.
Json validation_json(const ValidationReport& report);

}  // namespace hdlsd
