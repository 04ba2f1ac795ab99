#include "bivirus/dynamics.hpp"

#include "bivirus/spectral.hpp"
#include "rkf45.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace bivirus {

namespace {

constexpr double kFieldSlack = 1e-9;

Vector flatten(const StateD& s) {
    Vector z(2 * s.x.size());
    z << s.x, s.y;
    return z;
}

StateD split(const Vector& z) {
    const auto n = z.size() / 2;
    return {z.head(n), z.tail(n)};
}

bool flat_inside(const Vector& z, double slack) {
    const auto n = z.size() / 2;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = z[i];
        const double y = z[n + i];
        if (x < -slack || y < -slack || x + y > 1.0 + slack) {
            return false;
        }
    }
    return true;
}

Vector flat_project(Vector z) {
    const auto n = z.size() / 2;
    for (Eigen::Index i = 0; i < n; ++i) {
        double& x = z[i];
        double& y = z[n + i];
        x = std::clamp(x, 0.0, 1.0);
        y = std::clamp(y, 0.0, 1.0);
        const double total = x + y;
        if (total > 1.0) {
            x /= total;
            y /= total;
        }
    }
    return z;
}

Vector flat_field(const BiVirusSystem& sys, const Vector& z) {
    const auto n = static_cast<Eigen::Index>(sys.size());
    const Vector x = z.head(n);
    const Vector y = z.tail(n);
    const Vector free = (1.0 - x.array() - y.array()).matrix();
    Vector out(2 * n);
    out.head(n) = free.cwiseProduct(sys.g().evaluate_unchecked(x)) - sys.r().evaluate_unchecked(x);
    out.tail(n) = free.cwiseProduct(sys.h().evaluate_unchecked(y)) - sys.s().evaluate_unchecked(y);
    return out;
}

Vector single_field_unchecked(const RateModel& f, const RateModel& q, const Vector& x) {
    return (1.0 - x.array()).matrix().cwiseProduct(f.evaluate_unchecked(x)) - q.evaluate_unchecked(x);
}

void require_in_domain(const StateD& s, std::size_t n) {
    if (s.x.size() != static_cast<Eigen::Index>(n) || s.y.size() != static_cast<Eigen::Index>(n)) {
        throw DomainError("state size does not match the system (" + std::to_string(n) + " nodes)");
    }
    if (!in_domain(s, kFieldSlack)) {
        throw DomainError("state lies outside D = {x, y >= 0, x + y <= 1}");
    }
}

void require_pair(const RateModel& f, const RateModel& q) {
    if (!f.is_infection() || q.is_infection()) {
        throw RateError("expected an (infection, recovery) pair");
    }
    if (f.size() != q.size()) {
        throw RateError("infection and recovery models have different sizes");
    }
}

}  // namespace

StateD StateD::zeros(std::size_t n) {
    const auto m = static_cast<Eigen::Index>(n);
    return {Vector::Zero(m), Vector::Zero(m)};
}

bool in_domain(const StateD& s, double slack) {
    if (s.x.size() != s.y.size()) {
        return false;
    }
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        if (!(s.x[i] >= -slack && s.y[i] >= -slack && s.x[i] + s.y[i] <= 1.0 + slack)) {
            return false;
        }
    }
    return true;
}

StateD project_to_domain(StateD s) { return split(flat_project(flatten(s))); }

StateD random_interior_state(std::size_t n, Rng& rng) {
    StateD s = StateD::zeros(n);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        const double a = rng.exponential();
        const double b = rng.exponential();
        const double c = rng.exponential();
        const double total = a + b + c;
        s.x[i] = a / total;
        s.y[i] = b / total;
    }
    return s;
}

BiVirusSystem::BiVirusSystem(std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b,
                             RateModel g, RateModel r, RateModel h, RateModel s)
    : a_(std::move(a)), b_(std::move(b)), g_(std::move(g)), r_(std::move(r)), h_(std::move(h)),
      s_(std::move(s)), n_(0) {
    if (!a_ || !b_) {
        throw GraphError("bi-virus system needs two graphs");
    }
    if (a_->size() != b_->size()) {
        throw GraphError("graphs A and B have different node counts (" +
                         std::to_string(a_->size()) + " vs " + std::to_string(b_->size()) + ")");
    }
    n_ = a_->size();
    require_pair(g_, r_);
    require_pair(h_, s_);
    if (g_.size() != n_ || h_.size() != n_) {
        throw RateError("rate models do not match the graph size");
    }
}

std::pair<Vector, Vector> bivirus_field(const BiVirusSystem& sys, const StateD& s) {
    require_in_domain(s, sys.size());
    const Vector z = flat_field(sys, flatten(s));
    const auto n = static_cast<Eigen::Index>(sys.size());
    return {z.head(n), z.tail(n)};
}

Matrix bivirus_jacobian(const BiVirusSystem& sys, const StateD& s) {
    require_in_domain(s, sys.size());
    const auto n = static_cast<Eigen::Index>(sys.size());
    const Vector free = (1.0 - s.x.array() - s.y.array()).matrix();
    const Vector g = sys.g().evaluate_unchecked(s.x);
    const Vector h = sys.h().evaluate_unchecked(s.y);

    Matrix j(2 * n, 2 * n);
    j.topLeftCorner(n, n) = free.asDiagonal() * sys.g().jacobian_unchecked(s.x);
    j.topLeftCorner(n, n).diagonal() -= g;
    j.topLeftCorner(n, n) -= sys.r().jacobian_unchecked(s.x);
    j.topRightCorner(n, n) = Matrix((-g).asDiagonal());
    j.bottomLeftCorner(n, n) = Matrix((-h).asDiagonal());
    j.bottomRightCorner(n, n) = free.asDiagonal() * sys.h().jacobian_unchecked(s.y);
    j.bottomRightCorner(n, n).diagonal() -= h;
    j.bottomRightCorner(n, n) -= sys.s().jacobian_unchecked(s.y);
    return j;
}

Vector single_virus_field(const RateModel& f, const RateModel& q, const Vector& x) {
    require_pair(f, q);
    return (1.0 - x.array()).matrix().cwiseProduct(f.evaluate(x)) - q.evaluate(x);
}

Matrix single_virus_jacobian(const RateModel& f, const RateModel& q, const Vector& x) {
    require_pair(f, q);
    Matrix j = (1.0 - x.array()).matrix().asDiagonal() * f.jacobian(x);
    j.diagonal() -= f.evaluate(x);
    j -= q.jacobian(x);
    return j;
}

const char* to_string(TerminalReason r) {
    switch (r) {
        case TerminalReason::Converged: return "converged";
        case TerminalReason::MaxTimeReached: return "max_time";
        case TerminalReason::StepFailure: return "step_failure";
    }
    return "?";
}

Trajectory integrate(const BiVirusSystem& sys, const StateD& s0, IntegratorOptions opts) {
    require_in_domain(s0, sys.size());
    if (!(opts.t_max > 0.0)) {
        throw DomainError("t_max must be positive");
    }
    if (opts.conv_tol < 0.0) {
        throw DomainError("conv_tol must be nonnegative");
    }
    Trajectory traj;
    auto observe = [&](double t, const Vector& z) {
        if (opts.record || traj.times.empty()) {
            traj.times.push_back(t);
            traj.states.push_back(split(z));
        }
    };
    const auto result = detail::rkf45([&](const Vector& z) { return flat_field(sys, z); },
                                      flat_inside, flat_project, flat_project(flatten(s0)), 0.0,
                                      opts.t_max, opts, observe);
    if (!opts.record && traj.times.back() != result.t) {
        traj.times.push_back(result.t);
        traj.states.push_back(split(result.y));
    }
    traj.reason = result.reason;
    traj.residual = result.residual;
    return traj;
}

std::vector<StateD> integrate_to(const BiVirusSystem& sys, const StateD& s0,
                                 const std::vector<double>& checkpoints, IntegratorOptions opts) {
    require_in_domain(s0, sys.size());
    opts.conv_tol = 0.0;
    opts.record = false;
    std::vector<StateD> out;
    out.reserve(checkpoints.size());
    Vector z = flat_project(flatten(s0));
    double t = 0.0;
    for (double target : checkpoints) {
        if (target < t) {
            throw DomainError("checkpoints must be nondecreasing and nonnegative");
        }
        if (target > t) {
            const auto result = detail::rkf45([&](const Vector& w) { return flat_field(sys, w); },
                                              flat_inside, flat_project, z, t, target, opts,
                                              [](double, const Vector&) {});
            if (result.reason == TerminalReason::StepFailure) {
                throw DomainError("integration failed before t = " + std::to_string(target));
            }
            z = result.y;
            t = target;
        }
        out.push_back(split(z));
    }
    return out;
}

SingleTrajectory integrate_single(const RateModel& f, const RateModel& q, const Vector& x0,
                                  IntegratorOptions opts) {
    require_pair(f, q);
    if (x0.size() != static_cast<Eigen::Index>(f.size())) {
        throw DomainError("initial state size does not match the model");
    }
    auto inside = [](const Vector& x, double slack) {
        return x.minCoeff() >= -slack && x.maxCoeff() <= 1.0 + slack;
    };
    auto project = [](Vector x) -> Vector { return x.cwiseMax(0.0).cwiseMin(1.0); };
    if (!inside(x0, kFieldSlack)) {
        throw DomainError("initial state lies outside [0,1]^n");
    }
    SingleTrajectory traj;
    auto observe = [&](double t, const Vector& x) {
        if (opts.record || traj.times.empty()) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
    };
    const auto result =
        detail::rkf45([&](const Vector& x) { return single_field_unchecked(f, q, x); }, inside,
                      project, project(x0), 0.0, opts.t_max, opts, observe);
    if (!opts.record && traj.times.back() != result.t) {
        traj.times.push_back(result.t);
        traj.states.push_back(result.y);
    }
    traj.reason = result.reason;
    traj.residual = result.residual;
    return traj;
}

FixedPoint single_virus_fixed_point(const RateModel& f, const RateModel& q, double tol,
                                    std::optional<Vector> x0) {
    require_pair(f, q);
    const auto n = static_cast<Eigen::Index>(f.size());
    const Vector zero = Vector::Zero(n);

    FixedPoint fp;
    fp.threshold = pf_eigen(f.jacobian(zero) - q.jacobian(zero)).value;
    if (fp.threshold <= 0.0) {
        fp.x = zero;
        fp.newton_converged = true;
        return fp;
    }

    IntegratorOptions opts;
    opts.conv_tol = tol;
    opts.record = false;
    const Vector start = x0 ? *x0 : Vector::Constant(n, 0.99);
    const auto traj = integrate_single(f, q, start, opts);
    const Vector integrated = traj.states.back();

    // Damped Newton polish on the field.
    Vector x = integrated;
    Vector fx = single_field_unchecked(f, q, x);
    double norm = fx.lpNorm<Eigen::Infinity>();
    for (int iter = 0; iter < 50 && norm > 1e-15; ++iter) {
        const Eigen::PartialPivLU<Matrix> lu(single_virus_jacobian(f, q, x));
        const Vector dx = lu.solve(-fx);
        if (!dx.allFinite()) {
            break;
        }
        double alpha = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving, alpha *= 0.5) {
            const Vector candidate = x + alpha * dx;
            if (candidate.minCoeff() < 0.0 || candidate.maxCoeff() > 1.0) {
                continue;
            }
            const Vector fc = single_field_unchecked(f, q, candidate);
            const double nc = fc.lpNorm<Eigen::Infinity>();
            if (nc < norm) {
                x = candidate;
                fx = fc;
                norm = nc;
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
    }

    if (norm <= tol && x.minCoeff() > 0.0) {
        fp.x = x;
        fp.residual = norm;
        fp.newton_converged = true;
    } else {
        fp.x = integrated;
        fp.residual = traj.residual;
        fp.newton_converged = false;
    }
    return fp;
}

}  // namespace bivirus
