#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdlsd/model.hpp"

namespace hdlsd {

enum class SolverMethod {
    Newton,      // Newton on the atom resolvents, damped iteration as fallback
    FixedPoint,  // damped fixed-point iteration only
};

struct SolverConfig {
    std::size_t nu_grid_size = 512;
    double tol = 1e-10;
    std::size_t max_iter = 5000;
    double damping = 0.5;
    double continuation_factor = 0.7;
    double v_start_multiplier = 1.0;
    SolverMethod method = SolverMethod::Newton;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Raised when a solve fails to reach the tolerance after continuation.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Stieltjes kernel K(z, nu) tabulated on the frequency grid of its problem.
struct StieltjesKernelGrid {
    Complex z;
    std::vector<double> nu;
    std::vector<Complex> values;
    /// r_a = w_a / (U_a - z) per atom; K(nu) = sum_a h_a(nu) r_a.
    std::vector<Complex> atom_resolvents;
    bool converged = false;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool projected = false;  // Im K clipped to 0 during damped iteration
    std::size_t continuation_steps = 0;
};

/**
 * Discretized kernel equation
 *
 *   K(nu) = sum_a w_a h_a(nu) / (U_a(K) - z),
 *   U_a(K) = (1/N) sum_{nu'} gamma(nu') h_a(nu') / (1 + c gamma(nu') K(nu')),
 *
 * with gamma = cos(tau nu) for lag-tau autocovariances and gamma = f_T(eta - nu)
 * for tapered spectral estimators. The F^A integral is the exact atom sum, the
 * frequency integral an equal-weight rule on `nu`.
 */
struct KernelProblem {
    std::vector<double> nu;
    Eigen::VectorXd gamma;         // N
    Eigen::VectorXd atom_weight;   // A
    Eigen::MatrixXd h;             // A x N effective power transfer
    double c = 1.0;
    double h_bound = 1.0;          // sup h
    double gamma_bound = 1.0;      // sup |gamma|

    std::size_t grid_size() const { return nu.size(); }
    std::size_t atoms() const { return static_cast<std::size_t>(atom_weight.size()); }

    /// m_nu = sum_a w_a h_a(nu) on the grid.
    std::vector<double> mass() const;

    /// 4 B G max{c^{3/4}, sqrt(c)}: above this height the kernel map is a contraction.
    double uniqueness_threshold() const;
};

/// Midpoints (k + 1/2) 2 pi / N, k = 0..N-1.
std::vector<double> midpoint_grid(std::size_t n);

KernelProblem lag_problem(const ProcessModel& model, double c, std::size_t tau, std::size_t grid_size);
KernelProblem tapered_problem(const ProcessModel& model, double c, const TaperSpec& taper, double eta,
                              std::size_t grid_size);

/// Finite-n problem on the Fourier frequencies nu_t = 2 pi t / n (t = 1..n) with the
/// empirical distribution of the assigned atoms and c_n = p / n.
KernelProblem fourier_problem(const ProcessModel& model, std::span<const std::size_t> atom_of_row,
                              std::size_t n, std::size_t tau);

/// m_nu = sum_atoms w effective_h(model, atom, nu).
double mass_mnu(const ProcessModel& model, double nu);

/// Kernel map Phi(K) on the grid.
std::vector<Complex> kernel_map(const KernelProblem& problem, Complex z, std::span<const Complex> kernel);

/// sup_nu |Phi(K) - K|.
double kernel_residual(const KernelProblem& problem, Complex z, std::span<const Complex> kernel);

/// Solve with continuation in Im z starting inside the uniqueness region.
/// Never throws on nonconvergence; inspect `converged` and `residual`.
StieltjesKernelGrid solve_problem(const KernelProblem& problem, Complex z, const SolverConfig& config);

/// Solve starting from a nearby solution; falls back to full continuation on failure.
StieltjesKernelGrid solve_problem_from(const KernelProblem& problem, Complex z, const SolverConfig& config,
                                       const StieltjesKernelGrid& start);

/// Plain iteration K <- (1-d) K + d Phi(K) from an explicit starting kernel, no continuation
/// and no projection.
StieltjesKernelGrid iterate_fixed_point(const KernelProblem& problem, Complex z, std::vector<Complex> start,
                                        double damping, std::size_t max_iter, double tol);

/// s(z) = sum_a w_a / (U_a(K) - z). Throws ConvergenceError for an unconverged kernel.
Complex stieltjes_from_kernel(const KernelProblem& problem, const StieltjesKernelGrid& kernel);

// Operation-level entry points.

StieltjesKernelGrid solve_kernel(const ProcessModel& model, double c, std::size_t tau, Complex z,
                                 const SolverConfig& config = {});
Complex stieltjes_lsd(const ProcessModel& model, double c, std::size_t tau, Complex z,
                      const StieltjesKernelGrid& kernel);

StieltjesKernelGrid solve_tapered_kernel(const ProcessModel& model, double c, const TaperSpec& taper,
                                         double eta, Complex z, const SolverConfig& config = {});
Complex stieltjes_tapered(const ProcessModel& model, double c, const TaperSpec& taper, double eta,
                          Complex z, const StieltjesKernelGrid& kernel);

/// Diagonal of H_{tau,p}(z) = -(1/zn) sum_t cos(tau nu_t) h(lambda_j, nu_t) / (1 + c_n cos(tau nu_t) K(nu_t)).
std::vector<Complex> deterministic_equivalent_Hn(const ProcessModel& model,
                                                 std::span<const std::size_t> atom_of_row, std::size_t n,
                                                 std::size_t tau, Complex z, const SolverConfig& config = {});

/// (1/p) sum_j -1 / (z (1 + H_jj)).
Complex deterministic_equivalent_stieltjes(std::span<const Complex> h_diag, Complex z);

/// Stateful evaluator z -> s(z) that warm-starts from the previous solve.
class LimitTransform {
public:
    LimitTransform(KernelProblem problem, SolverConfig config);

    /// Throws ConvergenceError when the solve does not converge.
    Complex operator()(Complex z);

    const KernelProblem& problem() const { return problem_; }
    const SolverConfig& config() const { return config_; }
    double max_residual() const { return max_residual_; }
    std::size_t solves() const { return solves_; }

private:
    KernelProblem problem_;
    SolverConfig config_;
    std::optional<StieltjesKernelGrid> last_;
    double max_residual_ = 0.0;
    std::size_t solves_ = 0;
};

}  // namespace hdlsd
