#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hdlsd/model.hpp"
#include "hdlsd/spectra.hpp"

namespace hdlsd {

/// Tabulated limiting spectral distribution recovered from its Stieltjes transform.
struct SpectralCurve {
    std::vector<double> x;
    std::vector<double> density;
    std::vector<double> cdf;
    double atom_at_zero = 0.0;
    std::vector<double> v_used;
    double total_mass = 0.0;  // atom + integral of the density
};

struct InversionOptions {
    std::vector<double> v = {0.02, 0.01, 0.005};
    /// Number of smallest heights used for polynomial extrapolation to v = 0 (2 = linear, 3 = quadratic).
    std::size_t extrapolation_points = 3;
};

using TransformEvaluator = std::function<Complex(Complex)>;

/// density(x) = (1/pi) Im s(x + iv) extrapolated to v = 0. The cdf integrates the smoothed
/// density at each height (adaptive Simpson per grid cell) and extrapolates those running
/// integrals the same way, then adds the atom at zero. Solver failures are rethrown with the
/// offending z.
SpectralCurve density_curve(const TransformEvaluator& transform, std::span<const double> x_grid,
                            const InversionOptions& options = {});

/// `points` equispaced points on [-M, M], M = 1.2 (1 + sqrt c)^2 B, B the bound on h times
/// the weight bound.
std::vector<double> default_x_grid(double c, double h_bound, std::size_t points = 1024);

/// Linear interpolation of the CDF; x outside the grid clamps to the end values and sets
/// *clamped when provided.
double cdf_at(const SpectralCurve& curve, double x, bool* clamped = nullptr);

CdfView cdf_view(const SpectralCurve& curve);

}  // namespace hdlsd
