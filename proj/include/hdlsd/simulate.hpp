#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hdlsd/model.hpp"

namespace hdlsd {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// A dense matrix that is either real or complex, chosen by the innovation law.
using DenseMatrix = std::variant<RealMatrix, ComplexMatrix>;

inline bool is_complex(const DenseMatrix& m) { return std::holds_alternative<ComplexMatrix>(m); }
Eigen::Index rows(const DenseMatrix& m);
Eigen::Index cols(const DenseMatrix& m);

enum class PathKind { Lag, Circulant };
std::string to_string(PathKind kind);

struct PathMetadata {
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t q = 0;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::uint64_t model_hash = 0;
};

/// Data matrix X = [X_1 : ... : X_n], one column per time point.
struct PathMatrix {
    DenseMatrix entries;
    PathKind kind = PathKind::Lag;
    PathMetadata meta;

    bool is_complex() const { return hdlsd::is_complex(entries); }
    std::size_t p() const { return meta.p; }
    std::size_t n() const { return meta.n; }
};

/// Innovations Z_{jt} for rows j = 0..p-1 and times first_time .. first_time+n_total-1.
/// Entries are keyed by (seed, replicate, row, time), so overlapping windows agree.
DenseMatrix gen_innovations(std::size_t p, std::size_t n_total, Innovation law, std::uint64_t seed,
                            std::uint64_t replicate = 0, std::int64_t first_time = 1);

/// Largest-remainder allocation of p rows to atoms; returns the atom index of each row,
/// grouped by atom in order.
std::vector<std::size_t> assign_lambdas(const SpectralParamDistribution& fa, std::size_t p);

/// Truncation order ceil(p^{1/3}), raised to the family's own order when that is finite and larger.
std::size_t default_truncation(const CoefficientFamily& family, std::size_t p);

/// Per-row causal filter taps sqrt(g_B) * (b conv f) for lags 0..q (+ filter length).
std::vector<double> row_taps(const ProcessModel& model, std::size_t atom, std::size_t q);

/// Seeded Haar-distributed orthogonal (real) or unitary (complex) p x p matrix.
DenseMatrix random_rotation(std::size_t p, bool complex_valued, std::uint64_t seed,
                            std::uint64_t replicate = 0);

PathMatrix simulate_path(const ProcessModel& model, std::size_t p, std::size_t n, std::size_t q,
                         std::uint64_t seed, std::uint64_t replicate = 0);

/// Same process with the lag operator replaced by its circulant (period n) version,
/// built from the innovations Z_1..Z_n only.
PathMatrix simulate_circulant_path(const ProcessModel& model, std::size_t p, std::size_t n,
                                   std::size_t q, std::uint64_t seed, std::uint64_t replicate = 0);

}  // namespace hdlsd
