#pragma once

#include "bivirus/graph.hpp"
#include "bivirus/random.hpp"
#include "bivirus/rates.hpp"
#include "bivirus/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace bivirus {

/// A point (x, y) of the state space D = {x, y >= 0, x + y <= 1}.
struct StateD {
    Vector x;
    Vector y;

    std::size_t size() const { return static_cast<std::size_t>(x.size()); }
    double avg_x() const { return x.mean(); }
    double avg_y() const { return y.mean(); }

    static StateD zeros(std::size_t n);
};

/// True when `s` lies in D up to `slack` in every constraint.
bool in_domain(const StateD& s, double slack = 1e-9);

/// Projects onto D: clamps to [0,1], then rescales any node with x + y > 1.
StateD project_to_domain(StateD s);

/// Random interior point of D drawn from normalized exponentials, so each node
/// is uniform on the simplex {x_i, y_i, 1 - x_i - y_i}.
StateD random_interior_state(std::size_t n, Rng& rng);

/// Two competing SIS infections on graphs A and B over a shared node set.
/// Virus 1 uses (G, R), virus 2 uses (H, S).
class BiVirusSystem {
public:
    BiVirusSystem(std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b, RateModel g,
                  RateModel r, RateModel h, RateModel s);

    std::size_t size() const { return n_; }
    const Graph& graph_a() const { return *a_; }
    const Graph& graph_b() const { return *b_; }
    const RateModel& g() const { return g_; }
    const RateModel& r() const { return r_; }
    const RateModel& h() const { return h_; }
    const RateModel& s() const { return s_; }

private:
    std::shared_ptr<const Graph> a_;
    std::shared_ptr<const Graph> b_;
    RateModel g_, r_, h_, s_;
    std::size_t n_;
};

/// (dx, dy) with dx = (1 - x - y) o G(x) - R(x), dy = (1 - x - y) o H(y) - S(y).
std::pair<Vector, Vector> bivirus_field(const BiVirusSystem& sys, const StateD& s);

/// 2n x 2n Jacobian of the bi-virus field, x-block first.
Matrix bivirus_jacobian(const BiVirusSystem& sys, const StateD& s);

/// diag(1 - x) F(x) - Q(x).
Vector single_virus_field(const RateModel& f, const RateModel& q, const Vector& x);

/// diag(1 - x) J_F(x) - diag(F(x)) - J_Q(x).
Matrix single_virus_jacobian(const RateModel& f, const RateModel& q, const Vector& x);

enum class TerminalReason { Converged, MaxTimeReached, StepFailure };

const char* to_string(TerminalReason r);

struct IntegratorOptions {
    double t_max = 1e4;
    double conv_tol = 1e-10;  // 0 disables the early exit
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double domain_slack = 1e-12;
    bool record = true;  // store every accepted step, otherwise only endpoints
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateD> states;
    TerminalReason reason = TerminalReason::MaxTimeReached;
    double residual = 0.0;  // max-norm of the field at the last state

    const StateD& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
};

/// Adaptive RKF45 integration of the bi-virus system from `s0`.
Trajectory integrate(const BiVirusSystem& sys, const StateD& s0, IntegratorOptions opts = {});

/// Integrates through the increasing `checkpoints` and returns the state at each.
/// Early convergence is disabled so every checkpoint is reached exactly.
std::vector<StateD> integrate_to(const BiVirusSystem& sys, const StateD& s0,
                                 const std::vector<double>& checkpoints,
                                 IntegratorOptions opts = {});

/// Single-virus counterpart of `integrate`; the state lives in [0,1]^n.
struct SingleTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    TerminalReason reason = TerminalReason::MaxTimeReached;
    double residual = 0.0;
};

SingleTrajectory integrate_single(const RateModel& f, const RateModel& q, const Vector& x0,
                                  IntegratorOptions opts = {});

struct FixedPoint {
    Vector x;
    double threshold = 0.0;     // lambda(J_F(0) - J_Q(0))
    double residual = 0.0;      // max-norm of the field at x
    bool newton_converged = false;
};

/// Endemic fixed point of the single-virus system, or exactly 0 when the
/// threshold eigenvalue is <= 0. Integrates from `x0` (default 0.99 * 1) and
/// then polishes with damped Newton; if Newton fails the integration result is
/// returned with `newton_converged = false`.
FixedPoint single_virus_fixed_point(const RateModel& f, const RateModel& q, double tol = 1e-10,
                                    std::optional<Vector> x0 = std::nullopt);

}  // namespace bivirus
