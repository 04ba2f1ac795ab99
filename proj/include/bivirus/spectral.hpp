#pragma once

#include "bivirus/types.hpp"

namespace bivirus {

/// Perron-Frobenius eigenpair of a Metzler irreducible matrix.
struct SpectralResult {
    double value = 0.0;   // largest real part among the eigenvalues
    Vector vector;        // strictly positive, max-norm 1
    int iterations = 0;
    double residual = 0.0;  // max-norm of M*vector - value*vector
};

class SpectralError : public Error {
public:
    SpectralError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct SpectralOptions {
    double tol = 1e-10;
    int max_iter = 100000;
};

/// True when the off-diagonal nonzero pattern of `m` is strongly connected.
bool is_irreducible(const Matrix& m);

/// Dominant eigenpair of a Metzler (nonnegative off-diagonal) irreducible matrix.
///
/// The matrix is shifted by c*I with c = 1 + max|m_ii| so that it becomes
/// nonnegative with a positive diagonal (hence primitive), and power iteration
/// is run from the all-ones vector until the residual drops below `tol`.
/// Throws SpectralError for a reducible pattern, a negative off-diagonal entry,
/// or when `max_iter` is exhausted (the error carries the last residual).
SpectralResult pf_eigen(const Matrix& m, SpectralOptions opts = {});

}  // namespace bivirus
