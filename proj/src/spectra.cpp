#include "hdlsd/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "hdlsd/autocov.hpp"

namespace hdlsd {

namespace {

template <typename M>
std::vector<double> solve_hermitian(const M& h, const EigenOptions& options) {
    const auto mode = options.verify_residuals ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    Eigen::SelfAdjointEigenSolver<M> solver(h, mode);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver did not converge");
    const auto& values = solver.eigenvalues();
    std::vector<double> out(values.data(), values.data() + values.size());
    if (options.verify_residuals) {
        const double norm = std::max(std::abs(out.front()), std::abs(out.back()));
        const auto& vecs = solver.eigenvectors();
        for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
            const double r = (h * vecs.col(k) - values[k] * vecs.col(k)).norm();
            if (r > 1e-8 * std::max(norm, 1e-300)) {
                std::ostringstream os;
                os << "eigenpair " << k << " residual " << r << " exceeds 1e-8 ||H||";
                throw std::runtime_error(os.str());
            }
        }
    }
    return out;
}

}  // namespace

std::vector<double> eigenvalues(const DenseMatrix& h, const EigenOptions& options) {
    const auto r = rows(h);
    if (r != cols(h)) throw std::invalid_argument("eigenvalues: matrix is not square");
    if (static_cast<std::size_t>(r) > options.max_dim)
        throw std::invalid_argument("eigenvalues: dimension exceeds configured cap");
    if (r == 0) return {};
    if (hermitian_defect(h) > options.hermitian_tol)
        throw std::invalid_argument("eigenvalues: matrix is not Hermitian");
    auto out = std::visit([&](const auto& m) { return solve_hermitian(m, options); }, h);
    std::sort(out.begin(), out.end());
    return out;
}

Esd Esd::from_values(std::vector<double> values) {
    for (double x : values)
        if (!std::isfinite(x)) throw std::invalid_argument("ESD eigenvalues must be finite");
    std::sort(values.begin(), values.end());
    return Esd{std::move(values)};
}

Esd Esd::of(const DenseMatrix& h, const EigenOptions& options) { return Esd{hdlsd::eigenvalues(h, options)}; }

double esd_cdf(const Esd& esd, double x) {
    if (esd.eigenvalues.empty()) return 0.0;
    const auto it = std::upper_bound(esd.eigenvalues.begin(), esd.eigenvalues.end(), x);
    return static_cast<double>(it - esd.eigenvalues.begin()) / static_cast<double>(esd.p());
}

double esd_cdf_left(const Esd& esd, double x) {
    if (esd.eigenvalues.empty()) return 0.0;
    const auto it = std::lower_bound(esd.eigenvalues.begin(), esd.eigenvalues.end(), x);
    return static_cast<double>(it - esd.eigenvalues.begin()) / static_cast<double>(esd.p());
}

Complex empirical_stieltjes(const Esd& esd, Complex z) {
    if (!(z.imag() > 0.0)) throw std::invalid_argument("Stieltjes transform needs Im z > 0");
    if (esd.eigenvalues.empty()) throw std::invalid_argument("empty ESD");
    Complex sum{0.0, 0.0};
    for (double s : esd.eigenvalues) sum += 1.0 / (s - z);
    return sum / static_cast<double>(esd.p());
}

CdfView cdf_view(const Esd& esd) {
    auto shared = std::make_shared<Esd>(esd);
    CdfView view;
    view.value = [shared](double x) { return esd_cdf(*shared, x); };
    view.left_limit = [shared](double x) { return esd_cdf_left(*shared, x); };
    view.jumps = esd.eigenvalues;
    view.jumps.erase(std::unique(view.jumps.begin(), view.jumps.end()), view.jumps.end());
    if (!esd.eigenvalues.empty()) {
        view.lo = esd.eigenvalues.front();
        view.hi = esd.eigenvalues.back();
    }
    return view;
}

std::vector<double> ks_grid(const CdfView& f, const CdfView& g, std::size_t uniform_points) {
    std::vector<double> grid;
    grid.reserve(f.jumps.size() + g.jumps.size() + uniform_points);
    grid.insert(grid.end(), f.jumps.begin(), f.jumps.end());
    grid.insert(grid.end(), g.jumps.begin(), g.jumps.end());
    double lo = std::min(f.lo, g.lo);
    double hi = std::max(f.hi, g.hi);
    if (hi <= lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double span = hi - lo;
    lo -= 0.01 * span;
    hi += 0.01 * span;
    for (std::size_t k = 0; k < uniform_points; ++k)
        grid.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(uniform_points - 1));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

double ks_distance(const CdfView& f, const CdfView& g, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("ks_distance: empty evaluation grid");
    double worst = 0.0;
    auto probe = [&](double x) {
        worst = std::max(worst, std::abs(f.value(x) - g.value(x)));
        worst = std::max(worst, std::abs(f.left_limit(x) - g.left_limit(x)));
    };
    for (double x : grid) probe(x);
    for (double x : f.jumps) probe(x);
    for (double x : g.jumps) probe(x);
    return worst;
}

double ks_distance(const CdfView& f, const CdfView& g) {
    const auto grid = ks_grid(f, g);
    return ks_distance(f, g, grid);
}

double ks_distance(const Esd& a, const Esd& b) { return ks_distance(cdf_view(a), cdf_view(b)); }

}  // namespace hdlsd
