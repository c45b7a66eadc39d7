#include <doctest.h>

#include <cmath>

#include "hdlsd/harness.hpp"
#include "hdlsd/inversion.hpp"
#include "oracles.hpp"

using namespace hdlsd;
using doctest::Approx;

namespace {

ProcessModel identity_model() {
    ProcessModel m;
    m.fa = SpectralParamDistribution::point_mass({});
    return m;
}

const SpectralCurve& mp_curve() {
    static const SpectralCurve curve = lsd_curve(identity_model(), 0.5, 0, SolverConfig{}, InversionOptions{}, 1024);
    return curve;
}

}  // namespace

TEST_SUITE("inversion") {

TEST_CASE("MP density at c = 0.5") {
    const auto& curve = mp_curve();
    const double a = oracle::mp_lower(0.5), b = oracle::mp_upper(0.5);
    CHECK(a == Approx(0.0858).epsilon(1e-3));
    CHECK(b == Approx(2.9142).epsilon(1e-4));
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        const double x = curve.x[i];
        if (x < a - 0.1 || x > b + 0.1) CHECK(curve.density[i] <= 1e-3);
        if (x > a + 0.05 && x < b - 0.05) CHECK(std::abs(curve.density[i] - oracle::mp_density(0.5, x)) <= 1e-3);
    }
    CHECK(curve.atom_at_zero == 0.0);
    CHECK(curve.total_mass >= 0.99);
    CHECK(curve.total_mass <= 1.01);
}

TEST_CASE("closed-form value at x = 1") {
    const auto curve = density_curve(
        [](Complex z) {
            const auto k = solve_kernel(identity_model(), 0.5, 0, z);
            return stieltjes_lsd(identity_model(), 0.5, 0, z, k);
        },
        std::vector<double>{0.9, 1.0, 1.1});
    // sqrt((b-1)(1-a)) / (2 pi c) with (b-1)(1-a) = 4c - (1-c)^2 ... = 1.75
    CHECK(curve.density[1] == Approx(std::sqrt(1.75) / std::numbers::pi).epsilon(1e-3));
    CHECK(curve.density[1] == Approx(oracle::mp_density(0.5, 1.0)).epsilon(1e-3));
}

TEST_CASE("MP CDF") {
    const auto& curve = mp_curve();
    double worst = 0.0;
    for (int k = 0; k <= 2048; ++k) {
        const double x = curve.x.front() + (curve.x.back() - curve.x.front()) * k / 2048.0;
        worst = std::max(worst, std::abs(cdf_at(curve, x) - oracle::mp_cdf(0.5, x)));
    }
    CHECK(worst <= 5e-3);
}

TEST_CASE("cdf_at contract") {
    const auto& curve = mp_curve();
    CHECK(cdf_at(curve, curve.x.front()) == 0.0);
    CHECK(cdf_at(curve, curve.x.back()) == Approx(1.0).epsilon(1e-2));
    bool clamped = false;
    CHECK(cdf_at(curve, curve.x.back() + 5.0, &clamped) == curve.cdf.back());
    CHECK(clamped);
    cdf_at(curve, 1.0, &clamped);
    CHECK_FALSE(clamped);
    for (std::size_t i = 1; i < curve.cdf.size(); ++i) CHECK(curve.cdf[i] >= curve.cdf[i - 1]);
    CHECK(curve.cdf.back() <= 1.0 + 1e-3);
}

TEST_CASE("atom at zero for c > 1") {
    const auto curve = lsd_curve(identity_model(), 2.0, 0, SolverConfig{}, InversionOptions{}, 512);
    CHECK(curve.atom_at_zero == Approx(0.5).epsilon(2e-2));
    CHECK(cdf_at(curve, -0.01) < 1e-2);
    CHECK(cdf_at(curve, 0.0) >= 0.49);
    CHECK(curve.total_mass == Approx(1.0).epsilon(1e-2));
}

TEST_CASE("i.i.d. lag-1 limit is symmetric") {
    const auto curve = lsd_curve(identity_model(), 0.5, 1, SolverConfig{}, InversionOptions{}, 1024);
    CHECK(curve.total_mass == Approx(1.0).epsilon(1e-2));
    for (double x : {0.1, 0.3, 0.6, 1.0, 1.5}) {
        const double left = cdf_at(curve, -x);
        const double right = cdf_at(curve, x - 1e-9);
        CHECK(std::abs(left + right - 1.0) <= 2e-2);
    }
}

TEST_CASE("input checks") {
    const TransformEvaluator dummy = [](Complex) { return Complex(0.0, 1.0); };
    CHECK_THROWS_AS(density_curve(dummy, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(density_curve(dummy, std::vector<double>{1.0, 0.0}), std::invalid_argument);
    InversionOptions bad;
    bad.v = {0.01, 0.02};
    CHECK_THROWS_AS(density_curve(dummy, std::vector<double>{0.0, 1.0}, bad), std::invalid_argument);
    CHECK_THROWS_AS(default_x_grid(0.5, 1.0, 1), std::invalid_argument);
    const auto g = default_x_grid(0.5, 2.0, 5);
    CHECK(g.front() == Approx(-1.2 * (1 + std::sqrt(0.5)) * (1 + std::sqrt(0.5)) * 2.0));
    CHECK(g.back() == Approx(-g.front()));
}

}  // TEST_SUITE
