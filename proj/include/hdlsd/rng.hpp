#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace hdlsd {

/// Stateless counter-based generator: every draw is a pure function of its key,
/// so arrays can be filled in any order or split across threads.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed) ^ (stream + 0x632be59bd9b4e019ULL))) {}

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t row, std::int64_t col, std::uint64_t k) const {
        std::uint64_t h = mix(key_ ^ (row * 0x9e3779b97f4a7c15ULL));
        h = mix(h ^ static_cast<std::uint64_t>(col));
        h = mix(h ^ (k + 0x2545f4914f6cdd1dULL));
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Pair of independent standard normals (Box-Muller).
    std::complex<double> normal_pair(std::uint64_t row, std::int64_t col) const {
        const double u1 = uniform(row, col, 0);
        const double u2 = uniform(row, col, 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    double normal(std::uint64_t row, std::int64_t col) const { return normal_pair(row, col).real(); }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
};

}  // namespace hdlsd
