// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hdlsd/autocov.hpp"
#include "hdlsd/harness.hpp"
#include "hdlsd/lsd_solver.hpp"
#include "hdlsd/simulate.hpp"
#include "hdlsd/spectra.hpp"
#include "oracles.hpp"

using namespace hdlsd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ProcessModel identity_model() {
    ProcessModel m;
    m.fa = SpectralParamDistribution::point_mass({});
    return m;
}

ProcessModel two_atom_ma1() {
    ProcessModel m;
    m.family = CoefficientFamily::moving_average(1);
    m.fa = SpectralParamDistribution({{{0.2}, 0.5}, {{0.8}, 0.5}});
    return m;
}

// Random valid ARMA(1,1) or MA(2) model with 1-3 atoms.
ProcessModel random_model(std::mt19937_64& rng, bool arma) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t atoms = 1 + static_cast<std::size_t>(unit(rng) * 3.0) % 3;
    std::vector<double> w(atoms);
    for (auto& x : w) x = 0.2 + unit(rng);
    double total = 0.0;
    for (auto x : w) total += x;
    for (auto& x : w) x /= total;
    double head = 0.0;
    for (std::size_t a = 0; a + 1 < atoms; ++a) head += w[a];
    w.back() = 1.0 - head;

    std::vector<Atom> list;
    for (std::size_t a = 0; a < atoms; ++a) {
        if (arma) list.push_back({{-0.9 + 1.8 * unit(rng), -1.0 + 2.0 * unit(rng)}, w[a]});
        else list.push_back({{-1.0 + 2.0 * unit(rng), -1.0 + 2.0 * unit(rng)}, w[a]});
    }
    ProcessModel m;
    m.family = arma ? CoefficientFamily::arma11(64) : CoefficientFamily::moving_average(2);
    m.fa = SpectralParamDistribution(std::move(list));
    return m;
}

Outcome criterion1() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double c : {0.5, 1.0}) {
        for (int k = 0; k < 20; ++k) {
            const double im = 0.05 * std::pow(200.0, k / 19.0);  // 0.05 .. 10
            const double re = -1.0 + 5.0 * ((k * 7) % 20) / 19.0;
            const Complex z(re, im);
            const auto kernel = solve_kernel(identity_model(), c, 0, z);
            const Complex s = stieltjes_lsd(identity_model(), c, 0, z, kernel);
            worst = std::max(worst, std::abs(s - oracle::mp_stieltjes(c, z)));
        }
    }
    const double secs = elapsed(start);
    return {worst <= 1e-6 && secs < 5.0, fmt("max |s - s_MP| = %.3e", worst) + fmt(", %.2f s", secs)};
}

Outcome criterion2() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Complex z(-1.5 + 0.35 * k, 0.02 + 0.3 * k);
        const auto k1 = solve_kernel(identity_model(), 0.5, 1, z);
        const auto k2 = solve_kernel(identity_model(), 0.5, 2, z);
        worst = std::max(worst, std::abs(stieltjes_lsd(identity_model(), 0.5, 1, z, k1) -
                                         stieltjes_lsd(identity_model(), 0.5, 2, z, k2)));
    }
    const double secs = elapsed(start);
    return {worst <= 1e-8 && secs < 30.0, fmt("max |s_1 - s_2| = %.3e", worst) + fmt(", %.2f s", secs)};
}

Outcome criterion3() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.model = two_atom_ma1();
    cfg.mode = RunMode::Compare;
    cfg.c = 0.5;
    cfg.p_list = {200};
    cfg.taus = {0, 1, 2};
    cfg.replicates = 10;
    cfg.seed = 2024;
    const auto dir = std::filesystem::temp_directory_path() / "hdlsd_acceptance_c3";
    std::filesystem::remove_all(dir);
    const auto report = run_compare(cfg, dir);
    bool ok = report.all_ok();
    std::string detail = "median KS";
    for (const auto& cell : report.cells) {
        ok = ok && cell.ks_median <= 0.05;
        detail += fmt(" tau%.0f=", static_cast<double>(cell.tau)) + fmt("%.4f", cell.ks_median);
    }
    const double secs = elapsed(start);
    return {ok && secs < 300.0, detail + fmt(", %.1f s", secs)};
}

Outcome criterion4() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t solves = 0, violations = 0, unconverged = 0;
    double worst_mass = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto model = random_model(rng, i % 2 == 0);
        const double c = 0.2 + 1.8 * unit(rng);
        const std::size_t tau = static_cast<std::size_t>(unit(rng) * 3.0) % 3;
        std::vector<Complex> zs;
        for (int k = 0; k < 3; ++k) zs.emplace_back(-2.0 + 6.0 * unit(rng), 0.05 + 2.0 * unit(rng));
        zs.emplace_back(0.0, 1e3);
        for (const auto& z : zs) {
            const auto kernel = solve_kernel(model, c, tau, z);
            if (!kernel.converged) {
                ++unconverged;
                continue;
            }
            ++solves;
            double min_im = 0.0;
            for (const auto& k : kernel.values) min_im = std::min(min_im, k.imag());
            const Complex s = stieltjes_lsd(model, c, tau, z, kernel);
            if (min_im < -1e-10 || !(s.imag() > 0.0)) ++violations;
            if (z.imag() == 1e3) worst_mass = std::max(worst_mass, std::abs(Complex(0.0, -1e3) * s - 1.0));
        }
    }
    const bool ok = violations == 0 && worst_mass <= 0.02 && unconverged == 0;
    return {ok, std::to_string(solves) + " converged solves, " + std::to_string(unconverged) + " unconverged, " +
                    std::to_string(violations) + " Herglotz violations" +
                    fmt(", max |-iv s(iv) - 1| = %.3e", worst_mass)};
}

Outcome criterion5() {
    ProcessModel model;
    model.family = CoefficientFamily::arma11(64);
    model.fa = SpectralParamDistribution({{{0.6, 0.3}, 0.5}, {{-0.4, 0.5}, 0.5}});
    const std::size_t p = 100, n = 200, q = 5;
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto lag = simulate_path(model, p, n, q, seed);
        const auto circ = simulate_circulant_path(model, p, n, q, seed);
        for (std::size_t tau : {0u, 1u, 2u}) {
            const double ks = ks_distance(Esd::of(sym_autocov(lag, tau).matrix), Esd::of(sym_autocov(circ, tau).matrix));
            const double bound = (2.0 * (1.0 + static_cast<double>(tau)) + static_cast<double>(q)) / p;
            if (ks > bound) ++violations;
            worst_ratio = std::max(worst_ratio, ks / bound);
        }
    }
    return {violations == 0,
            std::to_string(violations) + " violations in 60 comparisons" + fmt(", max KS/bound = %.3f", worst_ratio)};
}

Outcome criterion6() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double tol = SolverConfig{}.tol;
    double worst = 0.0;
    std::size_t failures = 0;
    for (int i = 0; i < 20; ++i) {
        const auto model = random_model(rng, i % 2 == 0);
        const double c = 0.2 + 1.8 * unit(rng);
        const std::size_t tau = static_cast<std::size_t>(unit(rng) * 3.0) % 3;
        const auto pb = lag_problem(model, c, tau, 512);
        const double v = 1.05 * pb.uniqueness_threshold();
        const Complex z(-2.0 + 4.0 * unit(rng), v);
        const auto mass = pb.mass();
        std::vector<Complex> zero(pb.grid_size(), Complex(0.0)), lead(pb.grid_size());
        for (std::size_t j = 0; j < lead.size(); ++j) lead[j] = Complex(0.0, mass[j] / v);
        const auto a = iterate_fixed_point(pb, z, zero, 1.0, 5000, tol);
        const auto b = iterate_fixed_point(pb, z, lead, 1.0, 5000, tol);
        if (!a.converged || !b.converged) {
            ++failures;
            continue;
        }
        for (std::size_t j = 0; j < a.values.size(); ++j) worst = std::max(worst, std::abs(a.values[j] - b.values[j]));
    }
    return {failures == 0 && worst <= 2.0 * tol,
            std::to_string(failures) + " non-converged" + fmt(", max start gap = %.3e", worst)};
}

Outcome criterion7() {
    const auto flat = TaperSpec::custom({0.0, 0.0}, 3);  // T(tau) = 0 for tau >= 1
    bool bitwise = true;
    for (Innovation law : {Innovation::RealGaussian, Innovation::ComplexGaussian}) {
        auto model = two_atom_ma1();
        model.innovation = law;
        const auto path = simulate_path(model, 30, 60, 1, 77);
        const auto t = tapered_spectral(path, flat, 0.0).matrix;
        const auto c = sym_autocov(path, 0).matrix;
        if (is_complex(t) != is_complex(c)) bitwise = false;
        else if (is_complex(t)) bitwise = bitwise && std::get<ComplexMatrix>(t) == std::get<ComplexMatrix>(c);
        else bitwise = bitwise && std::get<RealMatrix>(t) == std::get<RealMatrix>(c);
    }
    const double tol = SolverConfig{}.tol;
    double worst = 0.0;
    for (const Complex z : {Complex(0.5, 0.05), Complex(1.5, 0.2), Complex(-0.5, 1.0), Complex(3.0, 0.1)}) {
        for (double eta : {0.0, 1.0}) {
            const auto a = solve_kernel(two_atom_ma1(), 0.5, 0, z);
            const auto b = solve_tapered_kernel(two_atom_ma1(), 0.5, flat, eta, z);
            for (std::size_t j = 0; j < a.values.size(); ++j) worst = std::max(worst, std::abs(a.values[j] - b.values[j]));
            worst = std::max(worst, std::abs(stieltjes_lsd(two_atom_ma1(), 0.5, 0, z, a) -
                                             stieltjes_tapered(two_atom_ma1(), 0.5, flat, eta, z, b)));
        }
    }
    return {bitwise && worst <= tol,
            std::string(bitwise ? "bitwise equal" : "NOT bitwise equal") + fmt(", kernel gap = %.3e", worst)};
}

Outcome criterion8() {
    const double c = 0.5;
    const auto curve = lsd_curve(identity_model(), c, 0, SolverConfig{}, InversionOptions{}, 1024);
    const double a = oracle::mp_lower(c), b = oracle::mp_upper(c);
    double density_err = 0.0;
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        const double x = curve.x[i];
        if (std::abs(x - a) > 0.05 && std::abs(x - b) > 0.05)
            density_err = std::max(density_err, std::abs(curve.density[i] - oracle::mp_density(c, x)));
    }
    double ks = 0.0;
    for (int k = 0; k < 2048; ++k) {
        const double x = curve.x.front() + (curve.x.back() - curve.x.front()) * k / 2047.0;
        ks = std::max(ks, std::abs(cdf_at(curve, x) - oracle::mp_cdf(c, x)));
    }
    return {density_err <= 1e-3 && ks <= 5e-3,
            fmt("density sup error = %.3e", density_err) + fmt(", CDF KS = %.3e", ks)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"MP oracle equivalence", criterion1},
        {"tau-collapse for i.i.d. data", criterion2},
        {"MA(1) ESD vs LSD at p=200, n=400", criterion3},
        {"Herglotz and mass on 100 random models", criterion4},
        {"rank bound, lag vs circulant paths", criterion5},
        {"two-start uniqueness", criterion6},
        {"taper degeneracy", criterion7},
        {"MP inversion", criterion8},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failed;
        std::printf("criterion %zu: %s  %s  [%s]\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
