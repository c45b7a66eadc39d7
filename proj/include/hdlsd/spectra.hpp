#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hdlsd/model.hpp"
#include "hdlsd/simulate.hpp"

namespace hdlsd {

struct EigenOptions {
    std::size_t max_dim = 4096;
    double hermitian_tol = 1e-10;  // relative
    bool verify_residuals = false; // check ||Hv - sigma v|| <= 1e-8 ||H|| per pair
};

/// All eigenvalues of a Hermitian (or real symmetric) matrix, ascending.
/// Throws std::invalid_argument for non-square, oversized or non-Hermitian input and
/// std::runtime_error when the eigensolver fails to converge.
std::vector<double> eigenvalues(const DenseMatrix& h, const EigenOptions& options = {});

/// Empirical spectral distribution: sorted eigenvalues.
struct Esd {
    std::vector<double> eigenvalues;

    static Esd from_values(std::vector<double> values);
    static Esd of(const DenseMatrix& h, const EigenOptions& options = {});
    std::size_t p() const { return eigenvalues.size(); }
};

/// Right-continuous (1/p) #{sigma_j <= x}.
double esd_cdf(const Esd& esd, double x);

/// (1/p) #{sigma_j < x}.
double esd_cdf_left(const Esd& esd, double x);

/// (1/p) sum_j 1/(sigma_j - z); throws for Im z <= 0.
Complex empirical_stieltjes(const Esd& esd, Complex z);

/// Anything with a CDF: value, left limit, jump locations and a support range.
struct CdfView {
    std::function<double(double)> value;
    std::function<double(double)> left_limit;
    std::vector<double> jumps;
    double lo = 0.0;
    double hi = 0.0;
};

CdfView cdf_view(const Esd& esd);

/// Union of both jump sets and `uniform_points` equispaced points over the joint support.
std::vector<double> ks_grid(const CdfView& f, const CdfView& g, std::size_t uniform_points = 2048);

/// sup |F - G| over grid points and jump points, comparing both one-sided limits.
/// Throws std::invalid_argument on an empty grid.
double ks_distance(const CdfView& f, const CdfView& g, std::span<const double> grid);

/// KS distance on the default grid.
double ks_distance(const CdfView& f, const CdfView& g);
double ks_distance(const Esd& a, const Esd& b);

}  // namespace hdlsd
