#include "bivirus/analysis.hpp"

#include "bivirus/random.hpp"
#include "bivirus/spectral.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bivirus {

namespace {

void require_assumptions(const RateModel& f, const RateModel& q, const AssumptionOptions& opts,
                         const char* which) {
    auto report = check_assumptions(f, q, opts);
    if (report.all_passed()) {
        return;
    }
    std::string failed;
    for (std::size_t k = 0; k < kAssumptionCount; ++k) {
        if (!report.passed[k]) {
            failed += (failed.empty() ? "" : ", ") + to_string(static_cast<Assumption>(k));
        }
    }
    throw AssumptionError(std::string(which) + " rate pair fails " + failed, std::move(report));
}

Matrix threshold_matrix(const RateModel& f, const RateModel& q, const Vector& other) {
    const auto n = static_cast<Eigen::Index>(f.size());
    const Vector zero = Vector::Zero(n);
    return (1.0 - other.array()).matrix().asDiagonal() * f.jacobian(zero) - q.jacobian(zero);
}

}  // namespace

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::VirusFree: return "VirusFree";
        case Outcome::Virus1Wins: return "Virus1Wins";
        case Outcome::Virus2Wins: return "Virus2Wins";
        case Outcome::Coexistence: return "Coexistence";
        case Outcome::Boundary: return "Boundary";
    }
    return "?";
}

TrichotomyVerdict verdict_from_fixed_points(const BiVirusSystem& sys, const Vector& x_star,
                                            const Vector& y_star, double lambda_g0,
                                            double lambda_h0, double eps) {
    TrichotomyVerdict v;
    v.lambda_g0 = lambda_g0;
    v.lambda_h0 = lambda_h0;
    v.x_star = x_star;
    v.y_star = y_star;
    v.lambda_u = pf_eigen(threshold_matrix(sys.g(), sys.r(), y_star)).value;
    v.lambda_v = pf_eigen(threshold_matrix(sys.h(), sys.s(), x_star)).value;

    auto positive = [eps](double l) { return l > eps; };
    auto negative = [eps](double l) { return l <= -eps; };

    if (negative(lambda_g0) && negative(lambda_h0)) {
        v.outcome = Outcome::VirusFree;
    } else if (positive(v.lambda_u) && positive(v.lambda_v)) {
        v.outcome = Outcome::Coexistence;
    } else if (positive(v.lambda_u) && negative(v.lambda_v)) {
        v.outcome = Outcome::Virus1Wins;
    } else if (negative(v.lambda_u) && positive(v.lambda_v)) {
        v.outcome = Outcome::Virus2Wins;
    } else {
        v.outcome = Outcome::Boundary;
    }
    return v;
}

TrichotomyVerdict classify(const BiVirusSystem& sys, ClassifyOptions opts) {
    if (opts.check_assumptions) {
        require_assumptions(sys.g(), sys.r(), opts.assumptions, "virus 1");
        require_assumptions(sys.h(), sys.s(), opts.assumptions, "virus 2");
    }
    const auto n = static_cast<Eigen::Index>(sys.size());
    const auto fx = single_virus_fixed_point(sys.g(), sys.r(), opts.fixed_point_tol);
    const auto fy = single_virus_fixed_point(sys.h(), sys.s(), opts.fixed_point_tol);
    const Vector x_star = fx.threshold > opts.eps ? fx.x : Vector::Zero(n);
    const Vector y_star = fy.threshold > opts.eps ? fy.x : Vector::Zero(n);
    return verdict_from_fixed_points(sys, x_star, y_star, fx.threshold, fy.threshold, opts.eps);
}

namespace cone {

bool leq(const StateD& a, const StateD& b, double slack) {
    return ((a.x - b.x).array() <= slack).all() && ((b.y - a.y).array() <= slack).all();
}

bool ll(const StateD& a, const StateD& b) {
    return (a.x.array() < b.x.array()).all() && (a.y.array() > b.y.array()).all();
}

double leq_gap(const StateD& a, const StateD& b) {
    return std::max((a.x - b.x).maxCoeff(), (b.y - a.y).maxCoeff());
}

}  // namespace cone

const char* to_string(KamkeViolationKind k) {
    switch (k) {
        case KamkeViolationKind::DiagonalBlockSign: return "diagonal-block-sign";
        case KamkeViolationKind::OffDiagonalBlockSign: return "off-diagonal-block-sign";
        case KamkeViolationKind::Reducible: return "reducible";
    }
    return "?";
}

std::vector<KamkeViolation> kamke_violations(const BiVirusSystem& sys, const StateD& s,
                                             double slack, bool check_irreducible) {
    const Matrix j = bivirus_jacobian(sys, s);
    const auto n = static_cast<Eigen::Index>(sys.size());
    std::vector<KamkeViolation> out;
    for (Eigen::Index r = 0; r < 2 * n; ++r) {
        for (Eigen::Index c = 0; c < 2 * n; ++c) {
            if (r == c) {
                continue;
            }
            const bool same_block = (r < n) == (c < n);
            if (same_block && j(r, c) < -slack) {
                out.push_back({0, KamkeViolationKind::DiagonalBlockSign,
                               static_cast<std::size_t>(r), static_cast<std::size_t>(c), j(r, c)});
            } else if (!same_block && j(r, c) > slack) {
                out.push_back({0, KamkeViolationKind::OffDiagonalBlockSign,
                               static_cast<std::size_t>(r), static_cast<std::size_t>(c), j(r, c)});
            }
        }
    }
    if (check_irreducible && !is_irreducible(j)) {
        out.push_back({0, KamkeViolationKind::Reducible, 0, 0, 0.0});
    }
    return out;
}

KamkeReport check_kamke(const BiVirusSystem& sys, std::size_t samples, std::uint64_t seed,
                        double slack) {
    KamkeReport report;
    report.samples = samples;
    Rng rng(seed);
    for (std::size_t k = 0; k < samples; ++k) {
        const StateD s = random_interior_state(sys.size(), rng);
        for (auto v : kamke_violations(sys, s, slack, true)) {
            v.sample = k;
            report.violations.push_back(v);
        }
    }
    return report;
}

MonotoneFlowReport check_monotone_flow(const BiVirusSystem& sys, std::size_t pairs,
                                       std::vector<double> t_checks, std::uint64_t seed,
                                       double slack) {
    std::sort(t_checks.begin(), t_checks.end());
    MonotoneFlowReport report;
    report.pairs = pairs;
    report.checkpoints = t_checks;
    report.worst_gap = -std::numeric_limits<double>::infinity();

    IntegratorOptions opts;
    opts.rtol = 1e-12;
    opts.atol = 1e-14;

    const auto n = static_cast<Eigen::Index>(sys.size());
    Rng rng(seed);
    for (std::size_t p = 0; p < pairs; ++p) {
        // upper = (x', y') anywhere in D; lower shrinks x' and grows y' into
        // the free mass, so lower <=_K upper and lower stays in D.
        const StateD upper = random_interior_state(sys.size(), rng);
        StateD lower = upper;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = rng.uniform();
            const double w = rng.uniform();
            lower.x[i] = upper.x[i] * u;
            lower.y[i] = upper.y[i] + (1.0 - upper.x[i] - upper.y[i]) * w;
        }
        const auto a = integrate_to(sys, lower, t_checks, opts);
        const auto b = integrate_to(sys, upper, t_checks, opts);
        for (std::size_t k = 0; k < t_checks.size(); ++k) {
            const double gap = cone::leq_gap(a[k], b[k]);
            report.worst_gap = std::max(report.worst_gap, gap);
            if (gap > slack) {
                report.violations.push_back({p, t_checks[k], gap, lower, upper});
            }
        }
    }
    return report;
}

std::optional<StateD> polish_fixed_point(const BiVirusSystem& sys, const StateD& s, double tol) {
    const auto n = static_cast<Eigen::Index>(sys.size());
    auto residual = [&](const StateD& p) {
        const auto [dx, dy] = bivirus_field(sys, p);
        return std::max(dx.lpNorm<Eigen::Infinity>(), dy.lpNorm<Eigen::Infinity>());
    };
    StateD current = s;
    double norm = residual(current);
    for (int iter = 0; iter < 50 && norm > tol; ++iter) {
        const auto [dx, dy] = bivirus_field(sys, current);
        Vector rhs(2 * n);
        rhs << -dx, -dy;
        const Eigen::PartialPivLU<Matrix> lu(bivirus_jacobian(sys, current));
        const Vector step = lu.solve(rhs);
        if (!step.allFinite()) {
            return std::nullopt;
        }
        bool improved = false;
        double alpha = 1.0;
        for (int halving = 0; halving < 30; ++halving, alpha *= 0.5) {
            StateD candidate{current.x + alpha * step.head(n), current.y + alpha * step.tail(n)};
            if (!in_domain(candidate, 0.0)) {
                continue;
            }
            const double c = residual(candidate);
            if (c < norm) {
                current = std::move(candidate);
                norm = c;
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
    }
    if (norm > tol) {
        return std::nullopt;
    }
    return current;
}

bool AgreementReport::ok() const {
    return std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.agrees; });
}

AgreementReport check_agreement(const BiVirusSystem& sys, const TrichotomyVerdict& verdict,
                                const CoexistenceBracket* bracket, AgreementOptions opts) {
    if (verdict.outcome == Outcome::Boundary) {
        throw Error("agreement is undefined for a Boundary verdict");
    }
    if (verdict.outcome == Outcome::Coexistence && bracket == nullptr) {
        throw Error("agreement for a Coexistence verdict needs a bracket");
    }
    IntegratorOptions iopts;
    iopts.t_max = opts.t_max;
    iopts.record = false;

    const double xs = verdict.x_star.mean();
    const double ys = verdict.y_star.mean();
    AgreementReport report;
    Rng rng(opts.seed);
    for (std::size_t k = 0; k < opts.starts; ++k) {
        AgreementCase c;
        c.start = random_interior_state(sys.size(), rng);
        const auto traj = integrate(sys, c.start, iopts);
        c.end = traj.final_state();
        c.reason = traj.reason;
        const double ax = c.end.avg_x();
        const double ay = c.end.avg_y();
        std::ostringstream detail;
        detail << "avgX=" << ax << " avgY=" << ay;
        switch (verdict.outcome) {
            case Outcome::VirusFree:
                c.agrees = ax < opts.extinct_tol && ay < opts.extinct_tol;
                break;
            case Outcome::Virus1Wins:
                c.agrees = ay < opts.extinct_tol && std::abs(ax - xs) < opts.extinct_tol;
                detail << " avg(x*)=" << xs;
                break;
            case Outcome::Virus2Wins:
                c.agrees = ax < opts.extinct_tol && std::abs(ay - ys) < opts.extinct_tol;
                detail << " avg(y*)=" << ys;
                break;
            case Outcome::Coexistence:
                c.agrees = ax > opts.survive_tol && ay > opts.survive_tol &&
                           cone::leq(bracket->lower, c.end, opts.bracket_slack) &&
                           cone::leq(c.end, bracket->upper, opts.bracket_slack);
                detail << " gap_lower=" << cone::leq_gap(bracket->lower, c.end)
                       << " gap_upper=" << cone::leq_gap(c.end, bracket->upper);
                break;
            case Outcome::Boundary:
                break;
        }
        c.detail = detail.str();
        report.cases.push_back(std::move(c));
    }
    return report;
}

}  // namespace bivirus
