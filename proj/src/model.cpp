#include "hdlsd/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hdlsd {

namespace {

void check_frequency(double nu) {
    constexpr double slack = 1e-12;
    if (!(nu >= -slack && nu <= kTwoPi + slack)) {
        std::ostringstream os;
        os << "frequency " << nu << " outside [0, 2pi]";
        throw std::invalid_argument(os.str());
    }
}

void check_dimension(const CoefficientFamily& family, std::span<const double> lambda) {
    const auto m = family.dimension();
    if (m && *m != lambda.size()) {
        std::ostringstream os;
        os << to_string(family.kind) << " family expects lambda of dimension " << *m
           << ", got " << lambda.size();
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

CoefficientFamily CoefficientFamily::identity() { return {FamilyKind::Identity, 0, {}}; }

CoefficientFamily CoefficientFamily::moving_average(std::size_t order) {
    if (order == 0) throw std::invalid_argument("moving average order must be >= 1");
    return {FamilyKind::MovingAverage, order, {}};
}

CoefficientFamily CoefficientFamily::arma11(std::size_t q_max) {
    return {FamilyKind::Arma11, q_max, {}};
}

CoefficientFamily CoefficientFamily::iid_rows(std::vector<double> coefficients) {
    const std::size_t q = coefficients.size();
    return {FamilyKind::IidRows, q, std::move(coefficients)};
}

std::optional<std::size_t> CoefficientFamily::dimension() const {
    switch (kind) {
        case FamilyKind::MovingAverage: return q_max;
        case FamilyKind::Arma11: return 2;
        case FamilyKind::Identity:
        case FamilyKind::IidRows: return std::nullopt;
    }
    return std::nullopt;
}

double CoefficientFamily::coefficient(std::span<const double> lambda, std::size_t lag) const {
    if (lag == 0) return 1.0;
    if (lag > q_max) return 0.0;
    switch (kind) {
        case FamilyKind::Identity: return 0.0;
        case FamilyKind::MovingAverage: return lambda[lag - 1];
        case FamilyKind::Arma11: return arma11_coeff(lambda[0], lambda[1], lag);
        case FamilyKind::IidRows: return shared[lag - 1];
    }
    return 0.0;
}

CoefficientFamily CoefficientFamily::with_q_max(std::size_t q) const {
    if (kind != FamilyKind::Arma11) return *this;
    CoefficientFamily out = *this;
    out.q_max = q;
    return out;
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Identity: return "identity";
        case FamilyKind::MovingAverage: return "ma";
        case FamilyKind::Arma11: return "arma11";
        case FamilyKind::IidRows: return "iid_rows";
    }
    return "unknown";
}

SpectralParamDistribution::SpectralParamDistribution(std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("spectral parameter distribution has no atoms");
    const std::size_t m = atoms_.front().lambda.size();
    for (const auto& atom : atoms_) {
        if (!(atom.weight > 0.0 && atom.weight <= 1.0))
            throw std::invalid_argument("atom weight must lie in (0, 1]");
        if (atom.lambda.size() != m)
            throw std::invalid_argument("atoms must share the same dimension");
        for (double x : atom.lambda)
            if (!std::isfinite(x)) throw std::invalid_argument("atom coordinates must be finite");
    }
}

SpectralParamDistribution SpectralParamDistribution::point_mass(std::vector<double> lambda) {
    return SpectralParamDistribution({Atom{std::move(lambda), 1.0}});
}

double SpectralParamDistribution::weight_sum() const {
    double s = 0.0;
    for (const auto& atom : atoms_) s += atom.weight;
    return s;
}

bool SpectralParamDistribution::is_normalized(double tol) const {
    return std::abs(weight_sum() - 1.0) <= tol;
}

std::string to_string(Innovation law) {
    switch (law) {
        case Innovation::RealGaussian: return "real_gaussian";
        case Innovation::ComplexGaussian: return "complex_gaussian";
        case Innovation::Rademacher: return "rademacher";
        case Innovation::StandardizedUniform: return "uniform";
    }
    return "unknown";
}

std::string to_string(Rotation rotation) {
    return rotation == Rotation::IdentityU ? "identity" : "random_orthogonal";
}

TaperSpec TaperSpec::geometric(double beta, std::size_t horizon) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("geometric taper needs beta in (0,1)");
    if (horizon == 0) throw std::invalid_argument("taper horizon must be >= 1");
    return {TaperKind::Geometric, beta, {}, horizon};
}

TaperSpec TaperSpec::polynomial(double alpha, std::size_t horizon) {
    if (!(alpha > 2.0)) throw std::invalid_argument("polynomial taper needs alpha > 2");
    if (horizon == 0) throw std::invalid_argument("taper horizon must be >= 1");
    return {TaperKind::Polynomial, alpha, {}, horizon};
}

TaperSpec TaperSpec::custom(std::vector<double> table, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("taper horizon must be >= 1");
    for (double t : table)
        if (!std::isfinite(t)) throw std::invalid_argument("taper weights must be finite");
    return {TaperKind::TruncatedCustom, 0.0, std::move(table), horizon};
}

double TaperSpec::weight(long long tau) const {
    const auto lag = static_cast<std::size_t>(tau < 0 ? -tau : tau);
    if (lag == 0) return 1.0;
    if (lag >= horizon) return 0.0;
    switch (kind) {
        case TaperKind::Geometric: return std::pow(parameter, static_cast<double>(lag));
        case TaperKind::Polynomial: return std::pow(1.0 + static_cast<double>(lag), -parameter);
        case TaperKind::TruncatedCustom: return lag <= table.size() ? table[lag - 1] : 0.0;
    }
    return 0.0;
}

std::string to_string(TaperKind kind) {
    switch (kind) {
        case TaperKind::Geometric: return "geometric";
        case TaperKind::Polynomial: return "polynomial";
        case TaperKind::TruncatedCustom: return "custom";
    }
    return "unknown";
}

Complex psi(const CoefficientFamily& family, std::span<const double> lambda, double nu) {
    check_frequency(nu);
    check_dimension(family, lambda);
    Complex sum{1.0, 0.0};
    for (std::size_t l = 1; l <= family.q_max; ++l) {
        const double f = family.coefficient(lambda, l);
        if (f == 0.0) continue;
        const double arg = static_cast<double>(l) * nu;
        sum += f * Complex(std::cos(arg), std::sin(arg));
    }
    return sum;
}

double power_transfer(const CoefficientFamily& family, std::span<const double> lambda, double nu) {
    return std::norm(psi(family, lambda, nu));
}

double arma11_coeff(double phi, double theta, std::size_t lag) {
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("ARMA(1,1) requires |phi| < 1 (causality)");
    if (lag == 0) return 1.0;
    return (theta + phi) * std::pow(phi, static_cast<double>(lag - 1));
}

double filter_gain(const ProcessModel& model, double nu) {
    if (!model.filter) return 1.0;
    check_frequency(nu);
    Complex sum{0.0, 0.0};
    const auto& b = *model.filter;
    for (std::size_t k = 0; k < b.size(); ++k) {
        const double arg = static_cast<double>(k) * nu;
        sum += b[k] * Complex(std::cos(arg), std::sin(arg));
    }
    return std::norm(sum);
}

double effective_h(const ProcessModel& model, std::size_t atom, double nu) {
    if (atom >= model.fa.size()) throw std::out_of_range("atom index out of range");
    const double g = model.scaling_at(atom);
    if (g == 0.0) return 0.0;
    return filter_gain(model, nu) * g * power_transfer(model.family, model.fa.atoms()[atom].lambda, nu);
}

double taper_symbol(const TaperSpec& taper, double theta) {
    double sum = 1.0;
    for (std::size_t tau = 1; tau < taper.horizon; ++tau) {
        const double w = taper.weight(static_cast<long long>(tau));
        if (w == 0.0) continue;
        sum += 2.0 * w * std::cos(static_cast<double>(tau) * theta);
    }
    return sum;
}

double taper_symbol_bound(const TaperSpec& taper) {
    double sum = 1.0;
    for (std::size_t tau = 1; tau < taper.horizon; ++tau)
        sum += 2.0 * std::abs(taper.weight(static_cast<long long>(tau)));
    return sum;
}

CoefficientBounds coefficient_bounds(const ProcessModel& model) {
    CoefficientBounds bounds;
    bounds.sum_sup = 1.0;  // f_0 = 1
    for (std::size_t l = 1; l <= model.family.q_max; ++l) {
        double sup = 0.0;
        for (const auto& atom : model.fa.atoms())
            sup = std::max(sup, std::abs(model.family.coefficient(atom.lambda, l)));
        bounds.sum_sup += sup;
        bounds.lag_weighted_sum += static_cast<double>(l) * sup;
    }
    return bounds;
}

double effective_h_bound(const ProcessModel& model) {
    const double lam = coefficient_bounds(model).sum_sup;
    double g = 1.0;
    if (model.scaling) g = *std::max_element(model.scaling->begin(), model.scaling->end());
    double b = 1.0;
    if (model.filter) {
        b = 0.0;
        for (double x : *model.filter) b += std::abs(x);
    }
    return lam * lam * g * b * b;
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_assumptions(const ProcessModel& model) {
    ValidationReport report;
    auto add = [&](std::string name, bool ok, std::string detail) {
        report.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    const auto& atoms = model.fa.atoms();
    bool dims_ok = !atoms.empty();
    if (const auto m = model.family.dimension(); m && dims_ok) dims_ok = model.fa.dimension() == *m;
    add("dimension", dims_ok,
        dims_ok ? "atoms match family dimension" : "atom dimension incompatible with family");

    std::ostringstream ws;
    ws.precision(17);
    ws << "weights sum to " << model.fa.weight_sum();
    add("weight_normalization", model.fa.is_normalized(), ws.str());

    bool params_ok = dims_ok;
    std::string params_detail = "ok";
    if (dims_ok && model.family.kind == FamilyKind::Arma11) {
        for (const auto& atom : atoms) {
            if (!(std::abs(atom.lambda[0]) < 1.0)) {
                params_ok = false;
                params_detail = "ARMA(1,1) atom with |phi| >= 1";
            }
        }
    }
    add("family_parameters", params_ok, params_detail);

    if (!params_ok) {
        add("f0_identity", false, "not evaluated");
        add("coefficient_summability", false, "not evaluated");
    } else {
        bool f0 = true;
        for (const auto& atom : atoms) f0 = f0 && model.family.coefficient(atom.lambda, 0) == 1.0;
        add("f0_identity", f0, f0 ? "f_0 = 1 on every atom" : "f_0 != 1");

        report.bounds = coefficient_bounds(model);
        const bool finite =
            std::isfinite(report.bounds.sum_sup) && std::isfinite(report.bounds.lag_weighted_sum);
        std::ostringstream bs;
        bs.precision(17);
        bs << "sum sup|f_l| = " << report.bounds.sum_sup
           << ", sum l sup|f_l| = " << report.bounds.lag_weighted_sum;
        add("coefficient_summability", finite, bs.str());
    }

    if (model.scaling) {
        const auto& g = *model.scaling;
        bool ok = g.size() == atoms.size();
        bool positive = false;
        for (double x : g) {
            ok = ok && std::isfinite(x) && x >= 0.0;
            positive = positive || x > 0.0;
        }
        add("scaling", ok && positive,
            !ok ? "g_B must be a finite nonnegative table over atoms"
                : (positive ? "g_B positive on some atom" : "g_B vanishes on the support of F^A"));
    }

    if (model.filter) {
        double s = 0.0;
        bool ok = !model.filter->empty();
        for (std::size_t k = 0; k < model.filter->size(); ++k) {
            ok = ok && std::isfinite((*model.filter)[k]);
            s += static_cast<double>(k) * std::abs((*model.filter)[k]);
        }
        std::ostringstream fs;
        fs << "sum k|b_k| = " << s;
        add("filter", ok && std::isfinite(s), fs.str());
    }
    return report;
}

void require_valid(const ProcessModel& model) {
    const auto report = validate_assumptions(model);
    if (report.passed()) return;
    std::string msg = "invalid process model:";
    for (const auto& c : report.checks)
        if (!c.passed) msg += " [" + c.name + ": " + c.detail + "]";
    throw std::invalid_argument(msg);
}

}  // namespace hdlsd
