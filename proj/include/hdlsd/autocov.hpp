#pragma once

#include <cstddef>

#include "hdlsd/model.hpp"
#include "hdlsd/simulate.hpp"

namespace hdlsd {

/// Symmetrized lag-tau sample autocovariance
///   C_tau = (1/2n) sum_{t=1}^{n-tau} (X_t X_{t+tau}^* + X_{t+tau} X_t^*).
/// Real symmetric for real paths, complex Hermitian otherwise.
struct SymAutocov {
    DenseMatrix matrix;
    std::size_t lag = 0;
    PathMetadata source;
};

/// Tapered spectral density estimator at frequency eta.
struct TaperedSpectralMatrix {
    DenseMatrix matrix;
    double frequency = 0.0;
    TaperSpec taper;
    PathMetadata source;
};

/// Throws std::invalid_argument when tau >= n.
SymAutocov sym_autocov(const PathMatrix& path, std::size_t tau);

/// sum_{|tau| < min(horizon, n)} T_n(tau) e^{i tau eta} (1/n) sum_t X_t X_{t+tau}^*,
/// with the negative lags taken as adjoints of the positive ones.
TaperedSpectralMatrix tapered_spectral(const PathMatrix& path, const TaperSpec& taper, double eta);

/// Largest |M_ij - conj(M_ji)| relative to max |M_ij|.
double hermitian_defect(const DenseMatrix& m);

}  // namespace hdlsd
