#include "bivirus/spectral.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace bivirus {

namespace {

std::vector<bool> reach(const Matrix& m, bool transposed) {
    const auto n = m.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (Eigen::Index v = 0; v < n; ++v) {
            const double w = transposed ? m(v, u) : m(u, v);
            if (v != u && w != 0.0 && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

bool is_irreducible(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        return false;
    }
    if (m.rows() == 1) {
        return true;
    }
    for (bool transposed : {false, true}) {
        for (bool s : reach(m, transposed)) {
            if (!s) {
                return false;
            }
        }
    }
    return true;
}

SpectralResult pf_eigen(const Matrix& m, SpectralOptions opts) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw SpectralError("pf_eigen needs a non-empty square matrix", 0.0);
    }
    const auto n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && m(i, j) < 0.0) {
                throw SpectralError("pf_eigen: negative off-diagonal entry (" + std::to_string(i) +
                                        ", " + std::to_string(j) + ")",
                                    0.0);
            }
        }
    }
    if (!is_irreducible(m)) {
        throw SpectralError("pf_eigen: matrix pattern is reducible", 0.0);
    }

    const double shift = 1.0 + m.diagonal().cwiseAbs().maxCoeff();
    Matrix shifted = m;
    shifted.diagonal().array() += shift;

    SpectralResult result;
    Vector v(n);
    Vector w = shifted * Vector::Ones(n);
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iter; ++it) {
        const double scale = w.maxCoeff();
        v = w / scale;
        // w now holds the next iterate; its distance from scale*v is the residual.
        w.noalias() = shifted * v;
        residual = (w - scale * v).cwiseAbs().maxCoeff();
        if (residual <= opts.tol) {
            result.value = scale - shift;
            result.vector = std::move(v);
            result.iterations = it;
            result.residual = residual;
            return result;
        }
    }
    throw SpectralError("pf_eigen did not converge in " + std::to_string(opts.max_iter) +
                            " iterations (residual " + std::to_string(residual) + ")",
                        residual);
}

}  // namespace bivirus
