#include "hdlsd/autocov.hpp"

#include <cmath>
#include <stdexcept>

namespace hdlsd {

namespace {

// (1/n) sum_{t=1}^{n-tau} X_t X_{t+tau}^*
template <typename M>
M lagged_product(const M& x, std::size_t tau) {
    const auto n = x.cols();
    const auto len = n - static_cast<Eigen::Index>(tau);
    M out = x.leftCols(len) * x.rightCols(len).adjoint();
    out /= static_cast<double>(n);
    return out;
}

}  // namespace

SymAutocov sym_autocov(const PathMatrix& path, std::size_t tau) {
    if (tau >= path.n()) throw std::invalid_argument("lag tau must be smaller than n");
    SymAutocov out;
    out.lag = tau;
    out.source = path.meta;
    out.matrix = std::visit(
        [&](const auto& x) -> DenseMatrix {
            using M = std::decay_t<decltype(x)>;
            const M a = lagged_product(x, tau);
            M c = a + a.adjoint();
            c *= 0.5;
            return c;
        },
        path.entries);
    return out;
}

TaperedSpectralMatrix tapered_spectral(const PathMatrix& path, const TaperSpec& taper, double eta) {
    TaperedSpectralMatrix out;
    out.frequency = eta;
    out.taper = taper;
    out.source = path.meta;

    DenseMatrix base = sym_autocov(path, 0).matrix;
    const std::size_t max_lag = std::min(taper.horizon, path.n());
    bool any = false;
    for (std::size_t tau = 1; tau < max_lag; ++tau) any = any || taper.weight(static_cast<long long>(tau)) != 0.0;
    if (!any) {
        out.matrix = std::move(base);
        return out;
    }

    const bool stay_real = !path.is_complex() && eta == 0.0;
    if (stay_real) {
        RealMatrix acc = std::get<RealMatrix>(base);
        const auto& x = std::get<RealMatrix>(path.entries);
        for (std::size_t tau = 1; tau < max_lag; ++tau) {
            const double w = taper.weight(static_cast<long long>(tau));
            if (w == 0.0) continue;
            const RealMatrix m = lagged_product(x, tau);
            acc += w * (m + m.transpose());
        }
        out.matrix = std::move(acc);
        return out;
    }

    ComplexMatrix acc = std::visit([](const auto& b) -> ComplexMatrix { return b.template cast<Complex>(); }, base);
    const ComplexMatrix x =
        std::visit([](const auto& m) -> ComplexMatrix { return m.template cast<Complex>(); }, path.entries);
    for (std::size_t tau = 1; tau < max_lag; ++tau) {
        const double w = taper.weight(static_cast<long long>(tau));
        if (w == 0.0) continue;
        const double arg = static_cast<double>(tau) * eta;
        const ComplexMatrix b = (w * Complex(std::cos(arg), std::sin(arg))) * lagged_product(x, tau);
        acc += b + b.adjoint();
    }
    out.matrix = std::move(acc);
    return out;
}

double hermitian_defect(const DenseMatrix& m) {
    return std::visit(
        [](const auto& a) {
            const double scale = a.cwiseAbs().maxCoeff();
            if (scale == 0.0) return 0.0;
            return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
        },
        m);
}

}  // namespace hdlsd
