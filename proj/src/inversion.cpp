#include "hdlsd/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hdlsd/lsd_solver.hpp"

namespace hdlsd {

namespace {

Complex evaluate(const TransformEvaluator& transform, Complex z) {
    try {
        return transform(z);
    } catch (const ConvergenceError& e) {
        std::ostringstream os;
        os << "inversion failed at z = (" << z.real() << ", " << z.imag() << "): " << e.what();
        throw ConvergenceError(os.str(), e.residual());
    }
}

// Value at v = 0 of the polynomial through (v_i, y_i).
double extrapolate_to_zero(std::span<const double> v, std::span<const double> y) {
    double out = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double basis = 1.0;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (j != i) basis *= (0.0 - v[j]) / (v[i] - v[j]);
        out += basis * y[i];
    }
    return out;
}

}  // namespace

SpectralCurve density_curve(const TransformEvaluator& transform, std::span<const double> x_grid,
                            const InversionOptions& options) {
    if (x_grid.size() < 2) throw std::invalid_argument("x grid needs at least two points");
    if (!std::is_sorted(x_grid.begin(), x_grid.end())) throw std::invalid_argument("x grid must be sorted");
    std::vector<double> v = options.v;
    if (v.empty()) throw std::invalid_argument("need at least one height v");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) throw std::invalid_argument("heights v must be positive");
        if (i > 0 && !(v[i] < v[i - 1])) throw std::invalid_argument("heights v must be decreasing");
    }
    const std::size_t k = std::clamp<std::size_t>(options.extrapolation_points, 1, v.size());
    const std::vector<double> used(v.end() - static_cast<std::ptrdiff_t>(k), v.end());

    SpectralCurve curve;
    curve.x.assign(x_grid.begin(), x_grid.end());
    curve.v_used = used;

    // Atom at zero: v Im s(iv) plateaus at the mass for a genuine atom.
    const double v_min = v.back();
    const double m1 = v_min * evaluate(transform, Complex(0.0, v_min)).imag();
    if (m1 > 3.0 * v_min) {
        bool plateau = true;
        if (v.size() >= 2) {
            const double v2 = v[v.size() - 2];
            const double m2 = v2 * evaluate(transform, Complex(0.0, v2)).imag();
            plateau = std::abs(m1 - m2) <= 0.25 * m1;
        }
        if (plateau) curve.atom_at_zero = m1;
    }

    // Density: (1/pi) Im s(x + iv) at each height, atom term removed, extrapolated to v = 0.
    // CDF: the Poisson-smoothed measure at each height keeps its mass, so its running integral
    // (adaptive Simpson per cell) is extrapolated to v = 0 the same way. Hard edges where the
    // density blows up then cost no mass.
    const std::size_t n = x_grid.size();
    std::vector<std::vector<double>> im(k, std::vector<double>(n));
    std::vector<std::vector<double>> cum(k, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        const double height = used[i];
        auto f = [&](double x) {
            double value = evaluate(transform, Complex(x, height)).imag();
            value -= curve.atom_at_zero * height / (x * x + height * height);
            return value / std::numbers::pi;
        };
        const double min_width = height / 16.0;
        std::function<double(double, double, double, double, double, double)> simpson =
            [&](double a, double b, double fa, double fm, double fb, double whole) {
                const double m = 0.5 * (a + b);
                const double flm = f(0.5 * (a + m));
                const double frm = f(0.5 * (m + b));
                const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
                const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
                const double delta = left + right - whole;
                if (std::abs(delta) <= 1.5e-8 || (b - a) <= min_width) return left + right + delta / 15.0;
                return simpson(a, m, fa, flm, fm, left) + simpson(m, b, fm, frm, fb, right);
            };
        im[i][0] = f(x_grid[0]);
        for (std::size_t j = 1; j < n; ++j) {
            const double a = x_grid[j - 1], b = x_grid[j];
            const double fm = f(0.5 * (a + b));
            im[i][j] = f(b);
            const double whole = (b - a) / 6.0 * (im[i][j - 1] + 4.0 * fm + im[i][j]);
            cum[i][j] = cum[i][j - 1] + simpson(a, b, im[i][j - 1], fm, im[i][j], whole);
        }
    }

    curve.density.resize(n);
    curve.cdf.resize(n);
    std::vector<double> ys(k);
    double running = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < k; ++i) ys[i] = im[i][j];
        curve.density[j] = std::max(0.0, extrapolate_to_zero(used, ys));
        for (std::size_t i = 0; i < k; ++i) ys[i] = cum[i][j];
        running = std::max(running, extrapolate_to_zero(used, ys));
        curve.cdf[j] = running + (x_grid[j] >= 0.0 ? curve.atom_at_zero : 0.0);
    }
    curve.total_mass = running + curve.atom_at_zero;
    return curve;
}

std::vector<double> default_x_grid(double c, double h_bound, std::size_t points) {
    if (points < 2) throw std::invalid_argument("x grid needs at least two points");
    const double root = 1.0 + std::sqrt(c);
    const double m = 1.2 * root * root * h_bound;
    std::vector<double> x(points);
    for (std::size_t i = 0; i < points; ++i)
        x[i] = -m + 2.0 * m * static_cast<double>(i) / static_cast<double>(points - 1);
    return x;
}

double cdf_at(const SpectralCurve& curve, double x, bool* clamped) {
    if (curve.x.empty()) throw std::invalid_argument("empty spectral curve");
    if (clamped) *clamped = false;
    if (x <= curve.x.front()) {
        if (clamped && x < curve.x.front()) *clamped = true;
        return curve.cdf.front();
    }
    if (x >= curve.x.back()) {
        if (clamped && x > curve.x.back()) *clamped = true;
        return curve.cdf.back();
    }
    // interpolate the continuous part; the atom at zero stays a jump
    const auto it = std::upper_bound(curve.x.begin(), curve.x.end(), x);
    const auto j = static_cast<std::size_t>(it - curve.x.begin());
    const double x0 = curve.x[j - 1];
    const double x1 = curve.x[j];
    const double c0 = curve.cdf[j - 1] - (x0 >= 0.0 ? curve.atom_at_zero : 0.0);
    const double c1 = curve.cdf[j] - (x1 >= 0.0 ? curve.atom_at_zero : 0.0);
    const double t = (x - x0) / (x1 - x0);
    return c0 + t * (c1 - c0) + (x >= 0.0 ? curve.atom_at_zero : 0.0);
}

CdfView cdf_view(const SpectralCurve& curve) {
    auto shared = std::make_shared<SpectralCurve>(curve);
    CdfView view;
    view.value = [shared](double x) { return cdf_at(*shared, x); };
    view.left_limit = view.value;
    view.lo = curve.x.front();
    view.hi = curve.x.back();
    return view;
}

}  // namespace hdlsd
