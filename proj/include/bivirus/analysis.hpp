#pragma once

#include "bivirus/dynamics.hpp"
#include "bivirus/rates.hpp"
#include "bivirus/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bivirus {

enum class Outcome { VirusFree, Virus1Wins, Virus2Wins, Coexistence, Boundary };

const char* to_string(Outcome o);

struct TrichotomyVerdict {
    Outcome outcome = Outcome::Boundary;
    double lambda_g0 = 0.0;  // lambda(J_G(0) - J_R(0))
    double lambda_h0 = 0.0;  // lambda(J_H(0) - J_S(0))
    double lambda_u = 0.0;   // lambda(diag(1 - y*) J_G(0) - J_R(0))
    double lambda_v = 0.0;   // lambda(diag(1 - x*) J_H(0) - J_S(0))
    Vector x_star;
    Vector y_star;
};

/// Raised by `classify` when a rate pair fails the assumption checks.
class AssumptionError : public Error {
public:
    AssumptionError(const std::string& what, AssumptionReport report)
        : Error(what), report_(std::move(report)) {}
    const AssumptionReport& report() const { return report_; }

private:
    AssumptionReport report_;
};

struct ClassifyOptions {
    double eps = 1e-8;
    double fixed_point_tol = 1e-10;
    bool check_assumptions = true;
    AssumptionOptions assumptions{};
};

/// Computes x*, y* and the four threshold eigenvalues and maps their signs to
/// an outcome. Eigenvalues within +-eps of zero give `Boundary`.
TrichotomyVerdict classify(const BiVirusSystem& sys, ClassifyOptions opts = {});

/// Same classification from precomputed single-virus data. `x_star` and
/// `y_star` must be the fixed points of (G, R) and (H, S).
TrichotomyVerdict verdict_from_fixed_points(const BiVirusSystem& sys, const Vector& x_star,
                                            const Vector& y_star, double lambda_g0,
                                            double lambda_h0, double eps = 1e-8);

/// Southeast cone ordering on D: (x, y) <=_K (x', y') iff x <= x' and y >= y'.
namespace cone {

bool leq(const StateD& a, const StateD& b, double slack = 0.0);

/// a <<_K b: x < x' and y > y' in every component.
bool ll(const StateD& a, const StateD& b);

/// Largest amount by which `a <=_K b` fails (<= 0 when ordered).
double leq_gap(const StateD& a, const StateD& b);

}  // namespace cone

enum class KamkeViolationKind { DiagonalBlockSign, OffDiagonalBlockSign, Reducible };

const char* to_string(KamkeViolationKind k);

struct KamkeViolation {
    std::size_t sample;
    KamkeViolationKind kind;
    std::size_t row;
    std::size_t col;
    double value;
};

struct KamkeReport {
    std::size_t samples = 0;
    std::vector<KamkeViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Sign violations of the cooperative pattern at one state: off-diagonal
/// entries of the diagonal blocks below -slack, entries of the off-diagonal
/// blocks above +slack. With `check_irreducible` the nonzero pattern must
/// also be irreducible.
std::vector<KamkeViolation> kamke_violations(const BiVirusSystem& sys, const StateD& s,
                                             double slack = 1e-9, bool check_irreducible = false);

/// Evaluates `kamke_violations` (with irreducibility) at `samples` seeded
/// random interior points of D.
KamkeReport check_kamke(const BiVirusSystem& sys, std::size_t samples, std::uint64_t seed,
                        double slack = 1e-9);

struct MonotoneFlowViolation {
    std::size_t pair;
    double t;
    double gap;  // amount by which the ordering fails
    StateD lower_start;
    StateD upper_start;
};

struct MonotoneFlowReport {
    std::size_t pairs = 0;
    std::vector<double> checkpoints;
    double worst_gap = 0.0;
    std::vector<MonotoneFlowViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Draws `pairs` seeded ordered pairs s <=_K s' in D, integrates both at tight
/// tolerance and checks the ordering at every checkpoint within `slack`.
MonotoneFlowReport check_monotone_flow(const BiVirusSystem& sys, std::size_t pairs,
                                       std::vector<double> t_checks, std::uint64_t seed,
                                       double slack = 1e-9);

struct CoexistenceBracket {
    StateD lower;  // limit from near (0, y*)
    StateD upper;  // limit from near (x*, 0)
    Vector eigvec_u;  // PF vector of diag(1 - y*) J_G(0) - J_R(0)
    Vector eigvec_v;  // M^{-1} L u, strictly negative
    Vector eigvec_w;  // PF vector of diag(1 - x*) J_H(0) - J_S(0)
    Vector eigvec_z;  // partner of w on the x side, strictly negative
    double lower_residual = 0.0;
    double upper_residual = 0.0;
};

class BracketError : public Error {
public:
    using Error::Error;
};

struct BracketOptions {
    double r = 1e-4;
    double residual_tol = 1e-8;
    double order_slack = 1e-9;
    IntegratorOptions integrator{};
};

/// Brackets the coexistence equilibria between two limits of monotone
/// trajectories started along the unstable eigendirections at (0, y*) and
/// (x*, 0). Accepts `Coexistence` verdicts and `Boundary` verdicts with
/// x*, y* >> 0 (the degenerate case where the two viruses tie).
CoexistenceBracket bracket_coexistence(const BiVirusSystem& sys, const TrichotomyVerdict& verdict,
                                       BracketOptions opts = {});

/// Damped Newton on the bi-virus field starting at `s`; returns the polished
/// state, or nullopt if the iteration leaves D or fails to reach `tol`.
std::optional<StateD> polish_fixed_point(const BiVirusSystem& sys, const StateD& s,
                                         double tol = 1e-13);

struct AgreementCase {
    StateD start;
    StateD end;
    TerminalReason reason;
    bool agrees;
    std::string detail;
};

struct AgreementReport {
    std::vector<AgreementCase> cases;
    bool ok() const;
};

struct AgreementOptions {
    std::size_t starts = 5;
    std::uint64_t seed = 1;
    double t_max = 1e5;
    double extinct_tol = 1e-5;
    double survive_tol = 1e-3;
    double bracket_slack = 1e-6;
};

/// Integrates from random interior points and checks the endpoints against a
/// non-Boundary verdict: VirusFree needs both averages < extinct_tol; a single
/// winner needs the loser's average < extinct_tol and the winner's within
/// extinct_tol of avg(x*) (or avg(y*)); Coexistence needs both averages >
/// survive_tol and the endpoint inside `bracket` up to `bracket_slack`.
AgreementReport check_agreement(const BiVirusSystem& sys, const TrichotomyVerdict& verdict,
                                const CoexistenceBracket* bracket, AgreementOptions opts = {});

}  // namespace bivirus
