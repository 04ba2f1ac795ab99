#pragma once

// Independent reference computations shared by the test binaries.

#include "bivirus/dynamics.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <string>

namespace testing_support {

using bivirus::Matrix;
using bivirus::Vector;

inline std::string data_file(const std::string& name) {
    return std::string(BIVIRUS_DATA_DIR) + "/" + name;
}

/// Largest real part among the eigenvalues, from a dense QR eigensolve.
inline double dense_max_real_eigenvalue(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    return es.eigenvalues().real().maxCoeff();
}

/// Random spanning tree plus each remaining pair with probability `p`.
inline bivirus::Graph random_connected_graph(std::size_t n, bivirus::Rng& rng, double p) {
    std::set<bivirus::Edge> edges;
    for (std::size_t v = 1; v < n; ++v) {
        const auto u = static_cast<std::size_t>(rng.uniform() * static_cast<double>(v));
        edges.insert({std::min(u, v), std::max(u, v)});
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.uniform() < p) {
                edges.insert({i, j});
            }
        }
    }
    return bivirus::Graph(n, {edges.begin(), edges.end()});
}

/// Central-difference Jacobian of a vector function.
template <class F>
Matrix fd_jacobian(F&& f, const Vector& x, double h = 1e-6) {
    const Vector f0 = f(x);
    Matrix j(f0.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vector up = x;
        Vector down = x;
        up[k] += h;
        down[k] -= h;
        j.col(k) = (f(up) - f(down)) / (2.0 * h);
    }
    return j;
}

/// Bi-virus field on the stacked state (x, y), written out directly from the
/// model formulas for linear, log and polynomial rates.
struct ReferenceField {
    Matrix a, b;
    // kind: 1 linear/linear, 2 log/linear, 3 log/poly
    int kind;
    double p1, q1, p2, q2;  // (beta or alpha, delta or k) per virus

    Vector infection(const Matrix& adj, double p, const Vector& x) const {
        if (kind == 1) {
            return p * (adj * x);
        }
        Vector lx(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            lx[j] = std::log(1.0 + p * x[j]);
        }
        return adj * lx;
    }
    Vector recovery(double q, const Vector& x) const {
        Vector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            out[i] = kind == 3 ? std::pow(1.0 + x[i], q) - 1.0 : q * x[i];
        }
        return out;
    }
    Vector operator()(const Vector& z) const {
        const auto n = a.rows();
        const Vector x = z.head(n);
        const Vector y = z.tail(n);
        Vector out(2 * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double free = 1.0 - x[i] - y[i];
            out[i] = free * infection(a, p1, x)[i] - recovery(q1, x)[i];
            out[n + i] = free * infection(b, p2, y)[i] - recovery(q2, y)[i];
        }
        return out;
    }
};

/// Endemic state of the linear single-virus model by the fixed-point iteration
/// x <- tau A x / (1 + tau A x), started from the all-ones vector.
inline Vector linear_endemic_state(const Matrix& adj, double tau) {
    Vector x = Vector::Ones(adj.rows());
    for (int it = 0; it < 2000000; ++it) {
        const Vector ax = tau * (adj * x);
        const Vector next = (ax.array() / (1.0 + ax.array())).matrix();
        const double change = (next - x).lpNorm<Eigen::Infinity>();
        x = next;
        if (change < 1e-16) {
            break;
        }
    }
    return x;
}

inline std::shared_ptr<const bivirus::Graph> share(bivirus::Graph g) {
    return std::make_shared<const bivirus::Graph>(std::move(g));
}

}  // namespace testing_support
