#include "hdlsd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hdlsd/io.hpp"
#include "hdlsd/rng.hpp"

namespace hdlsd {

namespace {

constexpr double kMaxEntries = 2.5e8;  // innovation array entries
constexpr double kMaxWork = 5e10;       // p * n * taps multiply-adds
constexpr std::uint64_t kRotationStream = 0x5851f42d4c957f2dULL;

template <typename Matrix>
Matrix fill_innovations(std::size_t p, std::size_t n_total, Innovation law, const CounterRng& rng,
                        std::int64_t first_time) {
    Matrix z(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n_total));
    for (Eigen::Index t = 0; t < z.cols(); ++t) {
        const std::int64_t time = first_time + t;
        for (Eigen::Index j = 0; j < z.rows(); ++j) {
            const auto row = static_cast<std::uint64_t>(j);
            if constexpr (std::is_same_v<Matrix, ComplexMatrix>) {
                z(j, t) = rng.normal_pair(row, time) * std::sqrt(0.5);
            } else {
                switch (law) {
                    case Innovation::Rademacher:
                        z(j, t) = rng.uniform(row, time, 0) < 0.5 ? -1.0 : 1.0;
                        break;
                    case Innovation::StandardizedUniform:
                        z(j, t) = (2.0 * rng.uniform(row, time, 0) - 1.0) * std::sqrt(3.0);
                        break;
                    default:
                        z(j, t) = rng.normal(row, time);
                        break;
                }
            }
        }
    }
    return z;
}

void check_budget(std::size_t p, std::size_t n, std::size_t taps) {
    if (p == 0 || n == 0) throw std::invalid_argument("path dimensions p and n must be >= 1");
    const double entries = static_cast<double>(p) * static_cast<double>(n + taps);
    const double work = static_cast<double>(p) * static_cast<double>(n) * static_cast<double>(taps);
    if (entries > kMaxEntries || work > kMaxWork)
        throw std::invalid_argument("path size exceeds the simulation budget (p * n * q too large)");
}

// x(:, t) = sum_l taps_row[l] z(:, t + offset - l), rows filtered independently.
template <typename Matrix>
Matrix causal_filter(const Matrix& z, const std::vector<std::vector<double>>& taps,
                     const std::vector<std::size_t>& atom_of_row, std::size_t n, bool circular) {
    const auto p = z.rows();
    Matrix x = Matrix::Zero(p, static_cast<Eigen::Index>(n));
    const auto len = static_cast<long long>(n);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto& h = taps[atom_of_row[static_cast<std::size_t>(j)]];
        for (long long t = 0; t < len; ++t) {
            typename Matrix::Scalar acc{0};
            for (std::size_t l = 0; l < h.size(); ++l) {
                if (h[l] == 0.0) continue;
                long long src;
                if (circular) {
                    src = ((t - static_cast<long long>(l)) % len + len) % len;
                } else {
                    src = t + static_cast<long long>(h.size()) - 1 - static_cast<long long>(l);
                }
                acc += h[l] * z(j, static_cast<Eigen::Index>(src));
            }
            x(j, static_cast<Eigen::Index>(t)) = acc;
        }
    }
    return x;
}

PathMatrix simulate_impl(const ProcessModel& model, std::size_t p, std::size_t n, std::size_t q,
                         std::uint64_t seed, std::uint64_t replicate, bool circular) {
    require_valid(model);
    const auto atom_of_row = assign_lambdas(model.fa, p);
    std::vector<std::vector<double>> taps;
    taps.reserve(model.fa.size());
    for (std::size_t a = 0; a < model.fa.size(); ++a) taps.push_back(row_taps(model, a, q));
    const std::size_t len = taps.front().size();
    check_budget(p, n, len);

    // Lag paths need history back to time 2 - len; circulant paths reuse Z_1..Z_n.
    const std::size_t n_total = circular ? n : n + len - 1;
    const std::int64_t first_time = circular ? 1 : 2 - static_cast<std::int64_t>(len);
    DenseMatrix z = gen_innovations(p, n_total, model.innovation, seed, replicate, first_time);

    const bool rotate = model.rotation == Rotation::RandomOrthogonalU;
    DenseMatrix u;
    if (rotate) u = random_rotation(p, is_complex(z), seed, replicate);

    PathMatrix out;
    out.kind = circular ? PathKind::Circulant : PathKind::Lag;
    out.meta = {p, n, q, seed, replicate, model_hash(model)};
    out.entries = std::visit(
        [&](auto& zm) -> DenseMatrix {
            using M = std::decay_t<decltype(zm)>;
            if (rotate) {
                const auto& um = std::get<M>(u);
                M zr = um.adjoint() * zm;
                M x = causal_filter(zr, taps, atom_of_row, n, circular);
                return M(um * x);
            }
            return causal_filter(zm, taps, atom_of_row, n, circular);
        },
        z);
    return out;
}

}  // namespace

Eigen::Index rows(const DenseMatrix& m) {
    return std::visit([](const auto& x) { return x.rows(); }, m);
}

Eigen::Index cols(const DenseMatrix& m) {
    return std::visit([](const auto& x) { return x.cols(); }, m);
}

std::string to_string(PathKind kind) { return kind == PathKind::Lag ? "lag" : "circulant"; }

DenseMatrix gen_innovations(std::size_t p, std::size_t n_total, Innovation law, std::uint64_t seed,
                            std::uint64_t replicate, std::int64_t first_time) {
    if (p == 0 || n_total == 0) throw std::invalid_argument("innovation array needs p, n >= 1");
    const CounterRng rng(seed, replicate);
    if (is_complex(law)) return fill_innovations<ComplexMatrix>(p, n_total, law, rng, first_time);
    return fill_innovations<RealMatrix>(p, n_total, law, rng, first_time);
}

std::vector<std::size_t> assign_lambdas(const SpectralParamDistribution& fa, std::size_t p) {
    if (p == 0) throw std::invalid_argument("p must be >= 1");
    const std::size_t k = fa.size();
    const double total = fa.weight_sum();
    std::vector<std::size_t> counts(k);
    std::vector<double> remainder(k);
    std::size_t assigned = 0;
    for (std::size_t a = 0; a < k; ++a) {
        const double exact = fa.atoms()[a].weight / total * static_cast<double>(p);
        // Nudge guards against 0.3 * 10 = 2.9999999999999996 style truncation.
        counts[a] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        remainder[a] = exact - static_cast<double>(counts[a]);
        assigned += counts[a];
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < p; ++i, ++assigned) ++counts[order[i % k]];
    while (assigned > p) {  // only reachable through the nudge above
        for (auto it = order.rbegin(); it != order.rend() && assigned > p; ++it) {
            if (counts[*it] > 0) {
                --counts[*it];
                --assigned;
            }
        }
    }
    std::vector<std::size_t> rows;
    rows.reserve(p);
    for (std::size_t a = 0; a < k; ++a) rows.insert(rows.end(), counts[a], a);
    return rows;
}

std::size_t default_truncation(const CoefficientFamily& family, std::size_t p) {
    const auto cube = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(p)) - 1e-12));
    if (family.is_truncated()) return std::max<std::size_t>(cube, 1);
    return std::max(cube, family.q_max);
}

std::vector<double> row_taps(const ProcessModel& model, std::size_t atom, std::size_t q) {
    const auto& lambda = model.fa.atoms().at(atom).lambda;
    std::vector<double> f(q + 1);
    for (std::size_t l = 0; l <= q; ++l) f[l] = model.family.coefficient(lambda, l);
    std::vector<double> taps = f;
    if (model.filter) {
        const auto& b = *model.filter;
        taps.assign(f.size() + b.size() - 1, 0.0);
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t k = 0; k < b.size(); ++k) taps[i + k] += f[i] * b[k];
    }
    const double scale = std::sqrt(model.scaling_at(atom));
    for (double& t : taps) t *= scale;
    return taps;
}

DenseMatrix random_rotation(std::size_t p, bool complex_valued, std::uint64_t seed,
                            std::uint64_t replicate) {
    const auto n = static_cast<Eigen::Index>(p);
    const CounterRng rng(seed, replicate ^ kRotationStream);
    if (complex_valued) {
        ComplexMatrix g(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                g(i, j) = rng.normal_pair(static_cast<std::uint64_t>(i), j) * std::sqrt(0.5);
        Eigen::HouseholderQR<ComplexMatrix> qr(g);
        ComplexMatrix q = qr.householderQ();
        const ComplexMatrix& r = qr.matrixQR();
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto d = r(j, j);
            if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
        }
        return q;
    }
    RealMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal(static_cast<std::uint64_t>(i), j);
    Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ();
    const RealMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

PathMatrix simulate_path(const ProcessModel& model, std::size_t p, std::size_t n, std::size_t q,
                         std::uint64_t seed, std::uint64_t replicate) {
    return simulate_impl(model, p, n, q, seed, replicate, false);
}

PathMatrix simulate_circulant_path(const ProcessModel& model, std::size_t p, std::size_t n,
                                   std::size_t q, std::uint64_t seed, std::uint64_t replicate) {
    return simulate_impl(model, p, n, q, seed, replicate, true);
}

}  // namespace hdlsd
