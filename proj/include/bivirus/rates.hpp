#pragma once

#include "bivirus/graph.hpp"
#include "bivirus/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace bivirus {

enum class RateRole { Infection, Recovery };

enum class RateKind {
    LinearInfection,  // beta * A x
    LogInfection,     // sum_j a_ij ln(1 + alpha x_j)
    LinearRecovery,   // delta x_i
    PolyRecovery,     // (1 + x_i)^k - 1
    Custom,
};

/// Infection (F) or recovery (Q) rate field on [0,1]^n with its analytic Jacobian.
///
/// Built-in models are created through the named factories. `custom` wraps a
/// caller-supplied pair of callables; it exists so the assumption checkers can
/// be exercised on fields that do not come from the built-in table.
class RateModel {
public:
    using ValueFn = std::function<Vector(const Vector&)>;
    using JacobianFn = std::function<Matrix(const Vector&)>;

    static RateModel linear_infection(std::shared_ptr<const Graph> g, double beta);
    static RateModel log_infection(std::shared_ptr<const Graph> g, double alpha);
    static RateModel linear_recovery(std::size_t n, double delta);
    static RateModel poly_recovery(std::size_t n, double k);
    static RateModel custom(RateRole role, std::size_t n, std::string name, ValueFn value,
                            JacobianFn jacobian, std::shared_ptr<const Graph> g = nullptr);

    RateKind kind() const { return kind_; }
    RateRole role() const { return role_; }
    bool is_infection() const { return role_ == RateRole::Infection; }
    std::size_t size() const { return n_; }

    /// Graph the infection spreads on; null for recovery models.
    const std::shared_ptr<const Graph>& graph() const { return graph_; }

    /// The scalar parameter of a built-in model (beta, alpha, delta or k).
    double parameter() const { return param_; }

    /// True when the Jacobian is diagonal by construction.
    bool is_local() const;

    std::string describe() const;

    /// Rates at `x`; rejects states outside [0,1]^n by more than 1e-9.
    Vector evaluate(const Vector& x) const;
    Matrix jacobian(const Vector& x) const;

    /// Same as above without the domain check (used inside integrator stages
    /// and finite-difference stencils).
    Vector evaluate_unchecked(const Vector& x) const;
    Matrix jacobian_unchecked(const Vector& x) const;

private:
    RateModel(RateKind kind, RateRole role, std::size_t n, double param,
              std::shared_ptr<const Graph> g);

    void check_state(const Vector& x) const;

    RateKind kind_;
    RateRole role_;
    std::size_t n_;
    double param_;
    std::shared_ptr<const Graph> graph_;
    std::string name_;
    ValueFn value_fn_;
    JacobianFn jacobian_fn_;
};

/// Checks referenced by the assumption report. `MonotoneJacobian` is the
/// consequence J_F(u) >= J_F(w), J_Q(u) <= J_Q(w) for u <= w.
enum class Assumption { A1 = 0, A2, A3, A4, A5, MonotoneJacobian };
inline constexpr std::size_t kAssumptionCount = 6;

std::string to_string(Assumption a);

struct AssumptionWitness {
    Assumption id;
    std::size_t sample;  // index of the sample point (0 for the origin check)
    Vector point;
    std::size_t row;
    std::size_t col;
    std::size_t aux;  // second differentiation index for (A4)/(A5), else 0
    double value;
};

struct AssumptionReport {
    std::array<bool, kAssumptionCount> passed{};
    std::vector<AssumptionWitness> witnesses;
    std::size_t samples = 0;
    /// A3 is checked as diagonal dominance sum_{j!=i} |dq_i/dx_j| < dq_i/dx_i.
    std::string a3_interpretation;

    bool ok(Assumption a) const { return passed[static_cast<std::size_t>(a)]; }
    bool all_passed() const;
};

struct AssumptionOptions {
    std::size_t samples = 16;
    std::uint64_t seed = 1;
    double tol = 1e-7;
    double second_step = 1e-4;
    std::size_t max_witnesses = 8;  // per assumption
};

/// Samples (A1)-(A5) plus the monotone-Jacobian consequence for an
/// infection/recovery pair. Violations are reported, never thrown; the only
/// exceptions are for mismatched inputs (wrong roles, size mismatch).
AssumptionReport check_assumptions(const RateModel& infection, const RateModel& recovery,
                                   AssumptionOptions opts = {});

struct DFRReport {
    bool satisfied = false;
    double min_margin = 0.0;
    double argmin = 0.0;  // grid value x at which the minimum occurs
    std::vector<double> grid;
    std::vector<double> margins;  // per grid point, minimum over nodes
};

/// Evaluates x q'(x) - q(x) on the grid k/samples, k = 1..samples, for a
/// recovery model that depends on local state only.
DFRReport check_dfr(const RateModel& recovery, std::size_t samples, double tol = 1e-12);

}  // namespace bivirus
