#pragma once
// Reference values computed independently of the library code paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

// Marchenko-Pastur Stieltjes transform: root of c z s^2 + (z + c - 1) s + 1 = 0 with Im s > 0.
inline Complex mp_stieltjes(double c, Complex z) {
    const Complex a = c * z;
    const Complex b = z + c - 1.0;
    const Complex disc = std::sqrt(b * b - 4.0 * a);
    const Complex r1 = (-b + disc) / (2.0 * a);
    const Complex r2 = (-b - disc) / (2.0 * a);
    return r1.imag() > r2.imag() ? r1 : r2;
}

inline double mp_lower(double c) { return (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c)); }
inline double mp_upper(double c) { return (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c)); }

inline double mp_density(double c, double x) {
    const double a = mp_lower(c), b = mp_upper(c);
    if (x <= a || x >= b) return 0.0;
    return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * c * x);
}

// CDF of the absolutely continuous part (c <= 1). Integrates with x = a + (b-a)(1-cos t)/2,
// which removes the square-root edges, by composite Simpson.
inline double mp_cdf(double c, double x) {
    const double a = mp_lower(c), b = mp_upper(c);
    if (x <= a) return 0.0;
    const double xe = std::min(x, b);
    const double t_end = std::acos(1.0 - 2.0 * (xe - a) / (b - a));
    const int m = 4000;
    const double h = t_end / m;
    auto g = [&](double t) {
        const double xx = a + 0.5 * (b - a) * (1.0 - std::cos(t));
        return mp_density(c, xx) * 0.5 * (b - a) * std::sin(t);
    };
    double s = g(0.0) + g(t_end);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
    return s * h / 3.0;
}

// h(lambda, nu) = 1 + 2 cos(nu) lambda + lambda^2 for X_t = Z_t + lambda Z_{t-1}.
inline double ma1_h(double lambda, double nu) { return 1.0 + 2.0 * std::cos(nu) * lambda + lambda * lambda; }

// Direct transfer function sum_l f_l e^{i l nu}.
inline Complex transfer(const std::vector<double>& f, double nu) {
    Complex s = 0.0;
    for (std::size_t l = 0; l < f.size(); ++l) s += f[l] * std::polar(1.0, static_cast<double>(l) * nu);
    return s;
}

// Plain symmetrized lag-tau autocovariance of a real p x n row-major-by-hand matrix, direct sums.
inline std::vector<std::vector<double>> sym_autocov(const std::vector<std::vector<double>>& x, std::size_t tau) {
    const std::size_t p = x.size(), n = x[0].size();
    std::vector<std::vector<double>> c(p, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t + tau < n; ++t) s += x[i][t] * x[j][t + tau] + x[i][t + tau] * x[j][t];
            c[i][j] = s / (2.0 * static_cast<double>(n));
        }
    return c;
}

}  // namespace oracle
