#pragma once

#include "bivirus/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bivirus {

/// Seeded 64-bit Mersenne Twister (std::mt19937_64) with distribution code
/// written out here so streams are identical across standard libraries.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential() { return -std::log1p(-uniform()); }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Additive-recurrence (Kronecker) low-discrepancy sequence in [0,1)^dim with
/// irrational steps frac(sqrt(p_j)) for the first `dim` primes and a seeded
/// random shift.
class KroneckerSequence {
public:
    KroneckerSequence(std::size_t dim, std::uint64_t seed);

    /// The k-th point of the sequence.
    Vector point(std::size_t k) const;

private:
    Vector step_;
    Vector shift_;
};

}  // namespace bivirus
