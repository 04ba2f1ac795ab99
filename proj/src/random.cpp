#include "bivirus/random.hpp"

namespace bivirus {

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
    std::vector<unsigned> primes;
    for (unsigned candidate = 2; primes.size() < count; ++candidate) {
        bool prime = true;
        for (auto p : primes) {
            if (p * p > candidate) {
                break;
            }
            if (candidate % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) {
            primes.push_back(candidate);
        }
    }
    return primes;
}

}  // namespace

KroneckerSequence::KroneckerSequence(std::size_t dim, std::uint64_t seed)
    : step_(static_cast<Eigen::Index>(dim)), shift_(static_cast<Eigen::Index>(dim)) {
    const auto primes = first_primes(dim);
    Rng rng(seed);
    for (std::size_t j = 0; j < dim; ++j) {
        const double root = std::sqrt(static_cast<double>(primes[j]));
        step_[static_cast<Eigen::Index>(j)] = root - std::floor(root);
        shift_[static_cast<Eigen::Index>(j)] = rng.uniform();
    }
}

Vector KroneckerSequence::point(std::size_t k) const {
    Vector p = shift_ + static_cast<double>(k + 1) * step_;
    return p.array() - p.array().floor();
}

}  // namespace bivirus
