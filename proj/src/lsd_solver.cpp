#include "hdlsd/lsd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hdlsd {

namespace {

using VectorXc = Eigen::VectorXcd;

std::vector<Complex> kernel_from_resolvents(const KernelProblem& pb, const VectorXc& r) {
    const auto n = static_cast<Eigen::Index>(pb.grid_size());
    std::vector<Complex> k(pb.grid_size(), Complex{0.0, 0.0});
    for (Eigen::Index a = 0; a < pb.h.rows(); ++a) {
        const Complex ra = r[a];
        for (Eigen::Index j = 0; j < n; ++j) k[static_cast<std::size_t>(j)] += pb.h(a, j) * ra;
    }
    return k;
}

// U_a = (1/N) sum gamma h_a / (1 + c gamma K); also returns 1/D when requested.
VectorXc u_values(const KernelProblem& pb, std::span<const Complex> kernel, std::vector<Complex>* inv_d = nullptr) {
    const auto n = static_cast<Eigen::Index>(pb.grid_size());
    std::vector<Complex> scratch;
    std::vector<Complex>& g = inv_d ? *inv_d : scratch;
    g.resize(pb.grid_size());
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        g[jj] = 1.0 / (1.0 + pb.c * pb.gamma[j] * kernel[jj]);
    }
    VectorXc u = VectorXc::Zero(pb.h.rows());
    for (Eigen::Index a = 0; a < pb.h.rows(); ++a) {
        Complex acc{0.0, 0.0};
        for (Eigen::Index j = 0; j < n; ++j) acc += pb.gamma[j] * pb.h(a, j) * g[static_cast<std::size_t>(j)];
        u[a] = acc / static_cast<double>(n);
    }
    return u;
}

VectorXc resolvents(const KernelProblem& pb, Complex z, const VectorXc& u) {
    VectorXc r(u.size());
    for (Eigen::Index a = 0; a < u.size(); ++a) r[a] = pb.atom_weight[a] / (u[a] - z);
    return r;
}

double sup_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double min_imag(std::span<const Complex> k) {
    double m = 0.0;
    for (const auto& x : k) m = std::min(m, x.imag());
    return m;
}

bool finite(std::span<const Complex> k) {
    return std::all_of(k.begin(), k.end(), [](const Complex& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

StieltjesKernelGrid make_grid(const KernelProblem& pb, Complex z, std::vector<Complex> kernel) {
    StieltjesKernelGrid g;
    g.z = z;
    g.nu = pb.nu;
    g.atom_resolvents.resize(pb.atoms());
    const VectorXc r = resolvents(pb, z, u_values(pb, kernel));
    for (std::size_t a = 0; a < pb.atoms(); ++a) g.atom_resolvents[a] = r[static_cast<Eigen::Index>(a)];
    g.residual = kernel_residual(pb, z, kernel);
    g.values = std::move(kernel);
    return g;
}

VectorXc to_vector(std::span<const Complex> r) {
    VectorXc v(static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) v[static_cast<Eigen::Index>(i)] = r[i];
    return v;
}

struct StepResult {
    bool ok = false;
    StieltjesKernelGrid grid;
};

// Newton on F_a(r) = r_a (U_a(r) - z) - w_a with backtracking on the grid residual.
StepResult newton(const KernelProblem& pb, Complex z, VectorXc r, double tol, std::size_t max_steps) {
    const auto A = static_cast<Eigen::Index>(pb.atoms());
    const auto n = static_cast<Eigen::Index>(pb.grid_size());
    std::vector<Complex> k = kernel_from_resolvents(pb, r);
    double res = kernel_residual(pb, z, k);
    std::size_t steps = 0;
    while (std::isfinite(res) && res > tol && steps < max_steps) {
        ++steps;
        std::vector<Complex> inv_d;
        const VectorXc u = u_values(pb, k, &inv_d);
        VectorXc f(A);
        Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(A, A);
        for (Eigen::Index a = 0; a < A; ++a) {
            f[a] = r[a] * (u[a] - z) - pb.atom_weight[a];
            jac(a, a) = u[a] - z;
        }
        // dU_a/dr_b = -(c/N) sum gamma^2 h_a h_b / D^2
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const Complex common = -pb.c * pb.gamma[j] * pb.gamma[j] * inv_d[jj] * inv_d[jj] / static_cast<double>(n);
            if (common == Complex{0.0, 0.0}) continue;
            for (Eigen::Index a = 0; a < A; ++a) {
                const double ha = pb.h(a, j);
                if (ha == 0.0) continue;
                const Complex ra = r[a] * common * ha;
                for (Eigen::Index b = 0; b < A; ++b) jac(a, b) += ra * pb.h(b, j);
            }
        }
        const VectorXc delta = jac.fullPivLu().solve(-f);
        if (!delta.allFinite()) break;
        double step = 1.0;
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries, step *= 0.5) {
            const VectorXc trial = r + step * delta;
            auto kt = kernel_from_resolvents(pb, trial);
            if (!finite(kt) || min_imag(kt) < -tol) continue;
            const double rt = kernel_residual(pb, z, kt);
            if (rt < res) {
                r = trial;
                k = std::move(kt);
                res = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    StepResult out;
    out.ok = std::isfinite(res) && res <= tol && min_imag(k) >= -tol;
    out.grid = make_grid(pb, z, std::move(k));
    out.grid.iterations = steps;
    return out;
}

// K <- (1-d) K + d Phi(K), Im K clipped at 0 when it drops below -tol.
StepResult damped(const KernelProblem& pb, Complex z, std::vector<Complex> k, double damping, std::size_t max_iter,
                  double tol, bool project) {
    bool projected = false;
    std::size_t it = 0;
    double res = 0.0;
    for (; it < max_iter; ++it) {
        const auto phi = kernel_map(pb, z, k);
        res = sup_diff(phi, k);
        if (!std::isfinite(res) || res <= tol) break;
        for (std::size_t j = 0; j < k.size(); ++j) {
            k[j] = (1.0 - damping) * k[j] + damping * phi[j];
            if (project && k[j].imag() < -tol) {
                k[j].imag(0.0);
                projected = true;
            }
        }
    }
    StepResult out;
    out.grid = make_grid(pb, z, std::move(k));
    out.grid.iterations = it;
    out.grid.projected = projected;
    out.ok = std::isfinite(out.grid.residual) && out.grid.residual <= tol && min_imag(out.grid.values) >= -tol;
    return out;
}

StepResult solve_step(const KernelProblem& pb, Complex z, const VectorXc& start, const SolverConfig& cfg) {
    StepResult best;
    std::size_t used = 0;
    if (cfg.method == SolverMethod::Newton) {
        best = newton(pb, z, start, cfg.tol, 100);
        used = best.grid.iterations;
        if (best.ok) return best;
    }
    auto fp = damped(pb, z, kernel_from_resolvents(pb, start), cfg.damping, cfg.max_iter, cfg.tol, true);
    fp.grid.iterations += used;
    return fp;
}

VectorXc initial_resolvents(const KernelProblem& pb, Complex z) {
    const std::vector<Complex> zero(pb.grid_size(), Complex{0.0, 0.0});
    return resolvents(pb, z, u_values(pb, zero));
}

StieltjesKernelGrid continuation(const KernelProblem& pb, Complex z, const SolverConfig& cfg) {
    const double target = z.imag();
    const double v0 = cfg.v_start_multiplier * pb.uniqueness_threshold();
    double v = std::max(target, v0);
    VectorXc r = initial_resolvents(pb, Complex(z.real(), v));
    auto first = solve_step(pb, Complex(z.real(), v), r, cfg);
    std::size_t total_iter = first.grid.iterations;
    std::size_t steps = 1;
    if (!first.ok) {
        first.grid.continuation_steps = steps;
        return first.grid;
    }
    StieltjesKernelGrid current = std::move(first.grid);
    while (v > target) {
        double next = std::max(target, v * cfg.continuation_factor);
        for (int refine = 0; refine < 12; ++refine) {
            auto step = solve_step(pb, Complex(z.real(), next), to_vector(current.atom_resolvents), cfg);
            total_iter += step.grid.iterations;
            ++steps;
            if (step.ok) {
                current = std::move(step.grid);
                v = next;
                break;
            }
            if (refine == 11) {
                step.grid.iterations = total_iter;
                step.grid.continuation_steps = steps;
                return step.grid;
            }
            next = std::sqrt(v * next);
        }
    }
    current.converged = true;
    current.iterations = total_iter;
    current.continuation_steps = steps;
    return current;
}

}  // namespace

void SolverConfig::validate() const {
    if (nu_grid_size < 8 || nu_grid_size % 2 != 0)
        throw std::invalid_argument("nu_grid_size must be even and >= 8");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
    if (!(continuation_factor > 0.0 && continuation_factor < 1.0))
        throw std::invalid_argument("continuation_factor must lie in (0, 1)");
    if (!(v_start_multiplier >= 1.0)) throw std::invalid_argument("v_start_multiplier must be >= 1");
}

std::vector<double> KernelProblem::mass() const {
    std::vector<double> m(grid_size(), 0.0);
    for (Eigen::Index a = 0; a < h.rows(); ++a)
        for (Eigen::Index j = 0; j < h.cols(); ++j) m[static_cast<std::size_t>(j)] += atom_weight[a] * h(a, j);
    return m;
}

double KernelProblem::uniqueness_threshold() const {
    return 4.0 * h_bound * gamma_bound * std::max(std::pow(c, 0.75), std::sqrt(c));
}

std::vector<double> midpoint_grid(std::size_t n) {
    std::vector<double> nu(n);
    for (std::size_t k = 0; k < n; ++k) nu[k] = (static_cast<double>(k) + 0.5) * kTwoPi / static_cast<double>(n);
    return nu;
}

namespace {

KernelProblem base_problem(const ProcessModel& model, double c, std::vector<double> nu) {
    if (!(c > 0.0)) throw std::invalid_argument("aspect ratio c must be positive");
    require_valid(model);
    KernelProblem pb;
    pb.c = c;
    pb.nu = std::move(nu);
    const auto n = static_cast<Eigen::Index>(pb.nu.size());
    const auto a_count = static_cast<Eigen::Index>(model.fa.size());
    pb.atom_weight.resize(a_count);
    pb.h.resize(a_count, n);
    const double total = model.fa.weight_sum();
    for (Eigen::Index a = 0; a < a_count; ++a) {
        pb.atom_weight[a] = model.fa.atoms()[static_cast<std::size_t>(a)].weight / total;
        for (Eigen::Index j = 0; j < n; ++j)
            pb.h(a, j) = effective_h(model, static_cast<std::size_t>(a), pb.nu[static_cast<std::size_t>(j)]);
    }
    pb.h_bound = effective_h_bound(model);
    pb.gamma.resize(n);
    return pb;
}

}  // namespace

KernelProblem lag_problem(const ProcessModel& model, double c, std::size_t tau, std::size_t grid_size) {
    auto pb = base_problem(model, c, midpoint_grid(grid_size));
    for (std::size_t j = 0; j < grid_size; ++j)
        pb.gamma[static_cast<Eigen::Index>(j)] = std::cos(static_cast<double>(tau) * pb.nu[j]);
    pb.gamma_bound = 1.0;
    return pb;
}

KernelProblem tapered_problem(const ProcessModel& model, double c, const TaperSpec& taper, double eta,
                              std::size_t grid_size) {
    auto pb = base_problem(model, c, midpoint_grid(grid_size));
    for (std::size_t j = 0; j < grid_size; ++j)
        pb.gamma[static_cast<Eigen::Index>(j)] = taper_symbol(taper, eta - pb.nu[j]);
    pb.gamma_bound = taper_symbol_bound(taper);
    return pb;
}

KernelProblem fourier_problem(const ProcessModel& model, std::span<const std::size_t> atom_of_row, std::size_t n,
                              std::size_t tau) {
    if (atom_of_row.empty() || n == 0) throw std::invalid_argument("fourier_problem needs p, n >= 1");
    std::map<std::size_t, std::size_t> counts;
    for (auto a : atom_of_row) {
        if (a >= model.fa.size()) throw std::out_of_range("atom index out of range");
        ++counts[a];
    }
    std::vector<Atom> atoms;
    std::vector<double> scaling;
    const double p = static_cast<double>(atom_of_row.size());
    for (const auto& [a, count] : counts) {
        atoms.push_back({model.fa.atoms()[a].lambda, static_cast<double>(count) / p});
        scaling.push_back(model.scaling_at(a));
    }
    ProcessModel empirical = model;
    empirical.fa = SpectralParamDistribution(std::move(atoms));
    if (model.scaling) empirical.scaling = std::move(scaling);

    std::vector<double> nu(n);
    for (std::size_t t = 1; t <= n; ++t) nu[t - 1] = kTwoPi * static_cast<double>(t) / static_cast<double>(n);
    auto pb = base_problem(empirical, p / static_cast<double>(n), std::move(nu));
    for (std::size_t j = 0; j < n; ++j)
        pb.gamma[static_cast<Eigen::Index>(j)] = std::cos(static_cast<double>(tau) * pb.nu[j]);
    pb.gamma_bound = 1.0;
    return pb;
}

double mass_mnu(const ProcessModel& model, double nu) {
    double m = 0.0;
    const double total = model.fa.weight_sum();
    for (std::size_t a = 0; a < model.fa.size(); ++a) m += model.fa.atoms()[a].weight / total * effective_h(model, a, nu);
    return m;
}

std::vector<Complex> kernel_map(const KernelProblem& problem, Complex z, std::span<const Complex> kernel) {
    return kernel_from_resolvents(problem, resolvents(problem, z, u_values(problem, kernel)));
}

double kernel_residual(const KernelProblem& problem, Complex z, std::span<const Complex> kernel) {
    const auto phi = kernel_map(problem, z, kernel);
    return sup_diff(phi, kernel);
}

StieltjesKernelGrid solve_problem(const KernelProblem& problem, Complex z, const SolverConfig& config) {
    config.validate();
    if (!(z.imag() > 0.0)) throw std::invalid_argument("kernel solve needs Im z > 0");
    return continuation(problem, z, config);
}

StieltjesKernelGrid solve_problem_from(const KernelProblem& problem, Complex z, const SolverConfig& config,
                                       const StieltjesKernelGrid& start) {
    config.validate();
    if (!(z.imag() > 0.0)) throw std::invalid_argument("kernel solve needs Im z > 0");
    if (start.converged && start.atom_resolvents.size() == problem.atoms()) {
        auto step = solve_step(problem, z, to_vector(start.atom_resolvents), config);
        if (step.ok) {
            step.grid.converged = true;
            step.grid.continuation_steps = 1;
            return step.grid;
        }
    }
    return continuation(problem, z, config);
}

StieltjesKernelGrid iterate_fixed_point(const KernelProblem& problem, Complex z, std::vector<Complex> start,
                                        double damping, std::size_t max_iter, double tol) {
    if (start.size() != problem.grid_size()) throw std::invalid_argument("starting kernel has wrong grid size");
    auto result = damped(problem, z, std::move(start), damping, max_iter, tol, false);
    result.grid.converged = result.ok;
    return result.grid;
}

Complex stieltjes_from_kernel(const KernelProblem& problem, const StieltjesKernelGrid& kernel) {
    if (!kernel.converged) {
        std::ostringstream os;
        os << "kernel at z = " << kernel.z << " did not converge (residual " << kernel.residual << ")";
        throw ConvergenceError(os.str(), kernel.residual);
    }
    if (kernel.values.size() != problem.grid_size())
        throw std::invalid_argument("kernel grid does not match the problem");
    const VectorXc r = resolvents(problem, kernel.z, u_values(problem, kernel.values));
    return r.sum();
}

StieltjesKernelGrid solve_kernel(const ProcessModel& model, double c, std::size_t tau, Complex z,
                                 const SolverConfig& config) {
    config.validate();
    return solve_problem(lag_problem(model, c, tau, config.nu_grid_size), z, config);
}

Complex stieltjes_lsd(const ProcessModel& model, double c, std::size_t tau, Complex z,
                      const StieltjesKernelGrid& kernel) {
    if (kernel.z != z) throw std::invalid_argument("kernel was solved at a different z");
    return stieltjes_from_kernel(lag_problem(model, c, tau, kernel.nu.size()), kernel);
}

StieltjesKernelGrid solve_tapered_kernel(const ProcessModel& model, double c, const TaperSpec& taper, double eta,
                                         Complex z, const SolverConfig& config) {
    config.validate();
    return solve_problem(tapered_problem(model, c, taper, eta, config.nu_grid_size), z, config);
}

Complex stieltjes_tapered(const ProcessModel& model, double c, const TaperSpec& taper, double eta, Complex z,
                          const StieltjesKernelGrid& kernel) {
    if (kernel.z != z) throw std::invalid_argument("kernel was solved at a different z");
    return stieltjes_from_kernel(tapered_problem(model, c, taper, eta, kernel.nu.size()), kernel);
}

std::vector<Complex> deterministic_equivalent_Hn(const ProcessModel& model, std::span<const std::size_t> atom_of_row,
                                                 std::size_t n, std::size_t tau, Complex z, const SolverConfig& config) {
    const auto pb = fourier_problem(model, atom_of_row, n, tau);
    const auto kernel = solve_problem(pb, z, config);
    if (!kernel.converged) {
        std::ostringstream os;
        os << "finite-n kernel at z = " << z << " did not converge (residual " << kernel.residual << ")";
        throw ConvergenceError(os.str(), kernel.residual);
    }
    // H_jj = -U_{a(j)} / z where a(j) is row j's atom; rows are mapped back through the
    // sorted atom order used by fourier_problem.
    const VectorXc u = u_values(pb, kernel.values);
    std::map<std::size_t, Eigen::Index> slot;
    for (auto a : atom_of_row) slot.emplace(a, 0);
    Eigen::Index next = 0;
    for (auto& [a, idx] : slot) idx = next++;
    std::vector<Complex> diag;
    diag.reserve(atom_of_row.size());
    for (auto a : atom_of_row) diag.push_back(-u[slot.at(a)] / z);
    return diag;
}

Complex deterministic_equivalent_stieltjes(std::span<const Complex> h_diag, Complex z) {
    if (h_diag.empty()) throw std::invalid_argument("empty deterministic equivalent");
    Complex sum{0.0, 0.0};
    for (const auto& h : h_diag) sum += -1.0 / (z * (1.0 + h));
    return sum / static_cast<double>(h_diag.size());
}

LimitTransform::LimitTransform(KernelProblem problem, SolverConfig config)
    : problem_(std::move(problem)), config_(config) {
    config_.validate();
}

Complex LimitTransform::operator()(Complex z) {
    StieltjesKernelGrid kernel;
    if (last_ && std::abs(z - last_->z) < 0.5)
        kernel = solve_problem_from(problem_, z, config_, *last_);
    else
        kernel = solve_problem(problem_, z, config_);
    ++solves_;
    if (!kernel.converged) {
        std::ostringstream os;
        os << "kernel at z = " << z << " did not converge (residual " << kernel.residual << ")";
        throw ConvergenceError(os.str(), kernel.residual);
    }
    max_residual_ = std::max(max_residual_, kernel.residual);
    const Complex s = stieltjes_from_kernel(problem_, kernel);
    last_ = std::move(kernel);
    return s;
}

}  // namespace hdlsd
