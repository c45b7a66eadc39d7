#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hdlsd {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class FamilyKind { Identity, MovingAverage, Arma11, IidRows };

/**
 * Coefficient functions f_l(lambda) of a simultaneously diagonalizable linear
 * process, evaluated up to a finite truncation order q_max.
 *
 *  - Identity:       f_0 = 1, f_l = 0 for l >= 1.
 *  - MovingAverage:  lambda in R^q is the coefficient table, f_l(lambda) = lambda[l-1].
 *  - Arma11:         lambda = (phi, theta), f_l = (theta + phi) phi^(l-1).
 *  - IidRows:        a lambda-free sequence f_l = shared[l-1] common to all rows.
 */
struct CoefficientFamily {
    FamilyKind kind = FamilyKind::Identity;
    std::size_t q_max = 0;
    std::vector<double> shared;

    static CoefficientFamily identity();
    static CoefficientFamily moving_average(std::size_t order);
    static CoefficientFamily arma11(std::size_t q_max = 64);
    static CoefficientFamily iid_rows(std::vector<double> coefficients);

    /// Required dimension of lambda, or nullopt when any dimension is accepted.
    std::optional<std::size_t> dimension() const;

    /// f_lag(lambda); zero beyond q_max.
    double coefficient(std::span<const double> lambda, std::size_t lag) const;

    /// True for families whose exact representation needs infinitely many lags.
    bool is_truncated() const { return kind == FamilyKind::Arma11; }

    /// Same family re-truncated at a different order (only meaningful for ARMA11).
    CoefficientFamily with_q_max(std::size_t q) const;
};

std::string to_string(FamilyKind kind);

struct Atom {
    std::vector<double> lambda;
    double weight = 0.0;
};

/// Finite discrete spectral-parameter distribution F^A.
class SpectralParamDistribution {
public:
    SpectralParamDistribution() = default;
    /// Throws std::invalid_argument on empty atoms, weights outside (0,1] or mixed dimensions.
    /// Normalization is checked by validate_assumptions, not here.
    explicit SpectralParamDistribution(std::vector<Atom> atoms);

    static SpectralParamDistribution point_mass(std::vector<double> lambda);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    std::size_t dimension() const { return atoms_.empty() ? 0 : atoms_.front().lambda.size(); }
    double weight_sum() const;
    bool is_normalized(double tol = 1e-12) const;

private:
    std::vector<Atom> atoms_;
};

enum class Innovation { RealGaussian, ComplexGaussian, Rademacher, StandardizedUniform };
enum class Rotation { IdentityU, RandomOrthogonalU };

std::string to_string(Innovation law);
std::string to_string(Rotation rotation);
inline bool is_complex(Innovation law) { return law == Innovation::ComplexGaussian; }

struct ProcessModel {
    CoefficientFamily family;
    SpectralParamDistribution fa;
    std::optional<std::vector<double>> scaling;  // g_B per atom
    std::optional<std::vector<double>> filter;   // b_0..b_K
    Innovation innovation = Innovation::RealGaussian;
    Rotation rotation = Rotation::IdentityU;

    double scaling_at(std::size_t atom) const { return scaling ? (*scaling)[atom] : 1.0; }
};

enum class TaperKind { Geometric, Polynomial, TruncatedCustom };

struct TaperSpec {
    TaperKind kind = TaperKind::Geometric;
    double parameter = 0.5;      // beta (geometric) or alpha (polynomial)
    std::vector<double> table;   // T(1), T(2), ... for TruncatedCustom
    std::size_t horizon = 1;     // T_n(tau) = 0 for |tau| >= horizon

    static TaperSpec geometric(double beta, std::size_t horizon);
    static TaperSpec polynomial(double alpha, std::size_t horizon);
    static TaperSpec custom(std::vector<double> table, std::size_t horizon);

    /// T_n(tau), even in tau, T_n(0) = 1.
    double weight(long long tau) const;
};

std::string to_string(TaperKind kind);

// Transfer functions.

/// psi(lambda, nu) = sum_{l <= q_max} e^{i l nu} f_l(lambda).
Complex psi(const CoefficientFamily& family, std::span<const double> lambda, double nu);

/// h(lambda, nu) = |psi(lambda, nu)|^2.
double power_transfer(const CoefficientFamily& family, std::span<const double> lambda, double nu);

/// ARMA(1,1) MA(infinity) coefficient: 1 for lag 0, else (theta + phi) phi^(lag-1).
double arma11_coeff(double phi, double theta, std::size_t lag);

/// zeta(nu) = |sum_k e^{i k nu} b_k|^2, or 1 without a filter.
double filter_gain(const ProcessModel& model, double nu);

/// zeta(nu) g_B(lambda_atom) h(lambda_atom, nu).
double effective_h(const ProcessModel& model, std::size_t atom, double nu);

/// 1 + 2 sum_{tau=1}^{horizon-1} T_n(tau) cos(tau theta).
double taper_symbol(const TaperSpec& taper, double theta);

/// sup over theta of |taper_symbol|, bounded by 1 + 2 sum |T_n(tau)|.
double taper_symbol_bound(const TaperSpec& taper);

// Model checks.

struct CoefficientBounds {
    double sum_sup = 0.0;         // sum_l sup_atoms |f_l|
    double lag_weighted_sum = 0.0; // sum_l l sup_atoms |f_l|
};

CoefficientBounds coefficient_bounds(const ProcessModel& model);

/// Upper bound on effective_h over atoms and frequencies.
double effective_h_bound(const ProcessModel& model);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    CoefficientBounds bounds;

    bool passed() const;
    const ValidationCheck* find(const std::string& name) const;
};

ValidationReport validate_assumptions(const ProcessModel& model);

/// Throws std::invalid_argument listing the failed checks.
void require_valid(const ProcessModel& model);

}  // namespace hdlsd
