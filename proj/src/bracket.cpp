#include "bivirus/analysis.hpp"

#include "bivirus/spectral.hpp"

#include <Eigen/LU>

#include <sstream>

namespace bivirus {

namespace {

constexpr double kSingularRatio = 1e-14;

// Solves (lambda I - jf) z = -diag(rate) e for the partner of a PF vector e.
Vector partner_vector(double lambda, const Matrix& jf, const Vector& rate, const Vector& e,
                      const char* side) {
    const auto n = jf.rows();
    const Matrix m = lambda * Matrix::Identity(n, n) - jf;
    const Eigen::PartialPivLU<Matrix> lu(m);
    const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (pivots.minCoeff() <= kSingularRatio * pivots.maxCoeff()) {
        throw BracketError(std::string("singular system for the ") + side +
                           " eigendirection: the point sits on a threshold; classify with a "
                           "tolerance that reports it as Boundary");
    }
    const Vector rhs = -rate.cwiseProduct(e);
    Vector z = lu.solve(rhs);
    if (!(z.maxCoeff() < 0.0)) {
        throw BracketError(std::string(side) + " eigendirection is not strictly negative");
    }
    return z;
}

void require_monotone(const Trajectory& traj, bool increasing, double slack, const char* side) {
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
        const auto& prev = traj.states[k - 1];
        const auto& next = traj.states[k];
        const bool ordered = increasing ? cone::leq(prev, next, slack) : cone::leq(next, prev, slack);
        if (!ordered) {
            std::ostringstream msg;
            msg << side << " trajectory is not monotone in the cone order at t=" << traj.times[k];
            throw BracketError(msg.str());
        }
    }
}

StateD settle(const BiVirusSystem& sys, const StateD& start, bool increasing,
              const BracketOptions& opts, double& residual, const char* side) {
    IntegratorOptions iopts = opts.integrator;
    iopts.record = true;
    const auto traj = integrate(sys, start, iopts);
    if (traj.reason == TerminalReason::StepFailure) {
        throw BracketError(std::string(side) + " trajectory failed to integrate");
    }
    require_monotone(traj, increasing, opts.order_slack, side);
    StateD end = traj.final_state();
    if (auto polished = polish_fixed_point(sys, end)) {
        end = *polished;
    }
    const auto [dx, dy] = bivirus_field(sys, end);
    residual = std::max(dx.lpNorm<Eigen::Infinity>(), dy.lpNorm<Eigen::Infinity>());
    if (!(residual < opts.residual_tol)) {
        std::ostringstream msg;
        msg << side << " limit is not a fixed point (residual " << residual << ")";
        throw BracketError(msg.str());
    }
    return end;
}

}  // namespace

CoexistenceBracket bracket_coexistence(const BiVirusSystem& sys, const TrichotomyVerdict& verdict,
                                       BracketOptions opts) {
    const bool interior = verdict.x_star.size() > 0 && verdict.y_star.size() > 0 &&
                          verdict.x_star.minCoeff() > 0.0 && verdict.y_star.minCoeff() > 0.0;
    if (verdict.outcome != Outcome::Coexistence &&
        !(verdict.outcome == Outcome::Boundary && interior)) {
        throw BracketError(std::string("coexistence bracket needs a Coexistence verdict, got ") +
                           to_string(verdict.outcome));
    }
    if (!(opts.r > 0.0 && opts.r <= 1e-3)) {
        throw BracketError("perturbation radius must lie in (0, 1e-3]");
    }
    const auto n = static_cast<Eigen::Index>(sys.size());
    const Vector zero = Vector::Zero(n);
    const Vector& xs = verdict.x_star;
    const Vector& ys = verdict.y_star;

    CoexistenceBracket out;

    // Lower side, from (0, y*).
    const Matrix jx = (1.0 - ys.array()).matrix().asDiagonal() * sys.g().jacobian(zero) -
                      sys.r().jacobian(zero);
    const auto pu = pf_eigen(jx);
    out.eigvec_u = pu.vector;
    out.eigvec_v = partner_vector(pu.value, single_virus_jacobian(sys.h(), sys.s(), ys),
                                  sys.h().evaluate(ys), out.eigvec_u, "lower");
    const StateD lower_start =
        project_to_domain({opts.r * out.eigvec_u, ys + opts.r * out.eigvec_v});
    out.lower = settle(sys, lower_start, true, opts, out.lower_residual, "lower");

    // Upper side, from (x*, 0).
    const Matrix jy = (1.0 - xs.array()).matrix().asDiagonal() * sys.h().jacobian(zero) -
                      sys.s().jacobian(zero);
    const auto pw = pf_eigen(jy);
    out.eigvec_w = pw.vector;
    out.eigvec_z = partner_vector(pw.value, single_virus_jacobian(sys.g(), sys.r(), xs),
                                  sys.g().evaluate(xs), out.eigvec_w, "upper");
    const StateD upper_start =
        project_to_domain({xs + opts.r * out.eigvec_z, opts.r * out.eigvec_w});
    out.upper = settle(sys, upper_start, false, opts, out.upper_residual, "upper");

    const StateD y_corner{zero, ys};
    const StateD x_corner{xs, zero};
    if (!cone::ll(y_corner, out.lower)) {
        throw BracketError("lower limit is not strictly above (0, y*) in the cone order");
    }
    if (!cone::leq(out.lower, out.upper, opts.order_slack)) {
        std::ostringstream msg;
        msg << "lower limit exceeds upper limit by " << cone::leq_gap(out.lower, out.upper);
        throw BracketError(msg.str());
    }
    if (!cone::ll(out.upper, x_corner)) {
        throw BracketError("upper limit is not strictly below (x*, 0) in the cone order");
    }
    return out;
}

}  // namespace bivirus
