#include "bivirus/rates.hpp"

#include "bivirus/random.hpp"

#include <cmath>
#include <sstream>

namespace bivirus {

namespace {

constexpr double kStateSlack = 1e-9;

std::string format_param(const char* name, double value) {
    std::ostringstream out;
    out << name << '=' << value;
    return out.str();
}

}  // namespace

RateModel::RateModel(RateKind kind, RateRole role, std::size_t n, double param,
                     std::shared_ptr<const Graph> g)
    : kind_(kind), role_(role), n_(n), param_(param), graph_(std::move(g)) {
    if (n_ == 0) {
        throw RateError("rate model needs at least one node");
    }
}

RateModel RateModel::linear_infection(std::shared_ptr<const Graph> g, double beta) {
    if (!g) {
        throw RateError("linear infection needs a graph");
    }
    if (!(beta > 0.0)) {
        throw RateError("linear infection needs beta > 0");
    }
    const auto n = g->size();
    return RateModel(RateKind::LinearInfection, RateRole::Infection, n, beta, std::move(g));
}

RateModel RateModel::log_infection(std::shared_ptr<const Graph> g, double alpha) {
    if (!g) {
        throw RateError("log infection needs a graph");
    }
    if (!(alpha > 0.0)) {
        throw RateError("log infection needs alpha > 0");
    }
    const auto n = g->size();
    return RateModel(RateKind::LogInfection, RateRole::Infection, n, alpha, std::move(g));
}

RateModel RateModel::linear_recovery(std::size_t n, double delta) {
    if (!(delta > 0.0)) {
        throw RateError("linear recovery needs delta > 0");
    }
    return RateModel(RateKind::LinearRecovery, RateRole::Recovery, n, delta, nullptr);
}

RateModel RateModel::poly_recovery(std::size_t n, double k) {
    if (!(k >= 1.0)) {
        throw RateError("polynomial recovery needs k >= 1");
    }
    return RateModel(RateKind::PolyRecovery, RateRole::Recovery, n, k, nullptr);
}

RateModel RateModel::custom(RateRole role, std::size_t n, std::string name, ValueFn value,
                            JacobianFn jacobian, std::shared_ptr<const Graph> g) {
    if (!value || !jacobian) {
        throw RateError("custom rate model needs both a value and a Jacobian function");
    }
    if (role == RateRole::Infection && !g) {
        throw RateError("custom infection model needs a graph");
    }
    if (g && g->size() != n) {
        throw RateError("custom rate model size does not match its graph");
    }
    RateModel m(RateKind::Custom, role, n, 0.0, std::move(g));
    m.name_ = std::move(name);
    m.value_fn_ = std::move(value);
    m.jacobian_fn_ = std::move(jacobian);
    return m;
}

bool RateModel::is_local() const {
    return kind_ == RateKind::LinearRecovery || kind_ == RateKind::PolyRecovery;
}

std::string RateModel::describe() const {
    switch (kind_) {
        case RateKind::LinearInfection:
            return "LinearInfection(" + format_param("beta", param_) + ")";
        case RateKind::LogInfection:
            return "LogInfection(" + format_param("alpha", param_) + ")";
        case RateKind::LinearRecovery:
            return "LinearRecovery(" + format_param("delta", param_) + ")";
        case RateKind::PolyRecovery:
            return "PolyRecovery(" + format_param("k", param_) + ")";
        case RateKind::Custom:
            return "Custom(" + name_ + ")";
    }
    return "?";
}

void RateModel::check_state(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != n_) {
        throw DomainError("state has " + std::to_string(x.size()) + " entries, model expects " +
                          std::to_string(n_));
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] >= -kStateSlack && x[i] <= 1.0 + kStateSlack)) {
            throw DomainError("state entry " + std::to_string(i) + " = " + std::to_string(x[i]) +
                              " lies outside [0,1]");
        }
    }
}

Vector RateModel::evaluate(const Vector& x) const {
    check_state(x);
    return evaluate_unchecked(x);
}

Matrix RateModel::jacobian(const Vector& x) const {
    check_state(x);
    return jacobian_unchecked(x);
}

Vector RateModel::evaluate_unchecked(const Vector& x) const {
    switch (kind_) {
        case RateKind::LinearInfection:
            return param_ * (graph_->adjacency() * x);
        case RateKind::LogInfection:
            return graph_->adjacency() * (param_ * x.array()).log1p().matrix();
        case RateKind::LinearRecovery:
            return param_ * x;
        case RateKind::PolyRecovery:
            return ((1.0 + x.array()).pow(param_) - 1.0).matrix();
        case RateKind::Custom: {
            Vector out = value_fn_(x);
            if (static_cast<std::size_t>(out.size()) != n_) {
                throw RateError("custom rate model '" + name_ + "' returned wrong size");
            }
            return out;
        }
    }
    return {};
}

Matrix RateModel::jacobian_unchecked(const Vector& x) const {
    const auto n = static_cast<Eigen::Index>(n_);
    switch (kind_) {
        case RateKind::LinearInfection:
            return param_ * graph_->adjacency();
        case RateKind::LogInfection: {
            const Eigen::RowVectorXd scale = (param_ / (1.0 + param_ * x.array())).matrix().transpose();
            return (graph_->adjacency().array().rowwise() * scale.array()).matrix();
        }
        case RateKind::LinearRecovery:
            return param_ * Matrix::Identity(n, n);
        case RateKind::PolyRecovery: {
            const Vector d = (param_ * (1.0 + x.array()).pow(param_ - 1.0)).matrix();
            return d.asDiagonal();
        }
        case RateKind::Custom: {
            Matrix out = jacobian_fn_(x);
            if (out.rows() != n || out.cols() != n) {
                throw RateError("custom rate model '" + name_ + "' returned a wrongly sized Jacobian");
            }
            return out;
        }
    }
    return {};
}

std::string to_string(Assumption a) {
    switch (a) {
        case Assumption::A1: return "A1";
        case Assumption::A2: return "A2";
        case Assumption::A3: return "A3";
        case Assumption::A4: return "A4";
        case Assumption::A5: return "A5";
        case Assumption::MonotoneJacobian: return "monotone-jacobian";
    }
    return "?";
}

bool AssumptionReport::all_passed() const {
    for (bool p : passed) {
        if (!p) {
            return false;
        }
    }
    return true;
}

AssumptionReport check_assumptions(const RateModel& infection, const RateModel& recovery,
                                   AssumptionOptions opts) {
    if (!infection.is_infection() || recovery.is_infection()) {
        throw RateError("check_assumptions expects an (infection, recovery) pair");
    }
    if (infection.size() != recovery.size()) {
        throw RateError("infection and recovery models are defined on different node counts");
    }
    const auto n = static_cast<Eigen::Index>(infection.size());
    const Matrix& adjacency = infection.graph()->adjacency();
    const double tol = opts.tol;
    const double h = opts.second_step;

    AssumptionReport report;
    report.passed.fill(true);
    report.samples = opts.samples;
    report.a3_interpretation =
        "A3 dominance tested as sum_{j!=i} |dq_i/dx_j| < dq_i/dx_i (off-diagonals are <= 0)";
    std::array<std::size_t, kAssumptionCount> recorded{};

    auto flag = [&](Assumption id, std::size_t sample, const Vector& point, Eigen::Index row,
                    Eigen::Index col, Eigen::Index aux, double value) {
        const auto slot = static_cast<std::size_t>(id);
        report.passed[slot] = false;
        if (recorded[slot] < opts.max_witnesses) {
            ++recorded[slot];
            report.witnesses.push_back({id, sample, point, static_cast<std::size_t>(row),
                                        static_cast<std::size_t>(col),
                                        static_cast<std::size_t>(aux), value});
        }
    };

    // (A1) exactly at the origin.
    const Vector origin = Vector::Zero(n);
    const Vector f0 = infection.evaluate(origin);
    const Vector q0 = recovery.evaluate(origin);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (f0[i] != 0.0) {
            flag(Assumption::A1, 0, origin, i, i, 0, f0[i]);
        }
        if (q0[i] != 0.0) {
            flag(Assumption::A1, 0, origin, i, i, 0, q0[i]);
        }
    }

    // Sample points stay h away from the faces so finite-difference stencils
    // remain inside the cube.
    const KroneckerSequence sequence(infection.size(), opts.seed);
    auto sample_point = [&](std::size_t k) -> Vector {
        return (h + (1.0 - 2.0 * h) * sequence.point(k).array()).matrix();
    };

    for (std::size_t s = 0; s < opts.samples; ++s) {
        const Vector x = sample_point(s);
        const Matrix jf = infection.jacobian(x);
        const Matrix jq = recovery.jacobian(x);

        // (A2) sign pattern of J_F follows the adjacency.
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && adjacency(i, j) > 0.0) {
                    if (!(jf(i, j) > 0.0)) {
                        flag(Assumption::A2, s, x, i, j, 0, jf(i, j));
                    }
                } else if (std::abs(jf(i, j)) > tol) {
                    flag(Assumption::A2, s, x, i, j, 0, jf(i, j));
                }
            }
        }

        // (A3) positive diagonal, nonpositive off-diagonal, diagonal dominance.
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(jq(i, i) > 0.0)) {
                flag(Assumption::A3, s, x, i, i, 0, jq(i, i));
            }
            double off_sum = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                if (jq(i, j) > tol) {
                    flag(Assumption::A3, s, x, i, j, 0, jq(i, j));
                }
                off_sum += std::abs(jq(i, j));
            }
            if (!(off_sum < jq(i, i))) {
                flag(Assumption::A3, s, x, i, i, 0, off_sum - jq(i, i));
            }
        }

        // (A4)/(A5) second derivatives by central differences of the Jacobians:
        // column block k holds d^2 f_i / dx_j dx_k at entry (i, j).
        for (Eigen::Index k = 0; k < n; ++k) {
            Vector up = x;
            Vector down = x;
            up[k] += h;
            down[k] -= h;
            const Matrix d2f = (infection.jacobian_unchecked(up) - infection.jacobian_unchecked(down)) / (2.0 * h);
            const Matrix d2q = (recovery.jacobian_unchecked(up) - recovery.jacobian_unchecked(down)) / (2.0 * h);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (d2f(i, j) > tol) {
                        flag(Assumption::A4, s, x, i, j, k, d2f(i, j));
                    }
                    if (i == j && j == k) {
                        if (d2q(i, j) < -tol) {
                            flag(Assumption::A5, s, x, i, j, k, d2q(i, j));
                        }
                    } else if (j != i && k != i && d2q(i, j) > tol) {
                        flag(Assumption::A5, s, x, i, j, k, d2q(i, j));
                    }
                }
            }
        }

        // Monotone-Jacobian consequence on an ordered pair u <= x.
        const Vector u = x.cwiseProduct(sequence.point(opts.samples + s));
        const Matrix jf_gap = infection.jacobian(u) - jf;
        const Matrix jq_gap = recovery.jacobian(u) - jq;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (jf_gap(i, j) < -tol) {
                    flag(Assumption::MonotoneJacobian, s, u, i, j, 0, jf_gap(i, j));
                }
                if (jq_gap(i, j) > tol) {
                    flag(Assumption::MonotoneJacobian, s, u, i, j, 0, jq_gap(i, j));
                }
            }
        }
    }
    return report;
}

DFRReport check_dfr(const RateModel& recovery, std::size_t samples, double tol) {
    if (recovery.is_infection()) {
        throw RateError("check_dfr expects a recovery model");
    }
    if (samples == 0) {
        throw RateError("check_dfr needs at least one grid point");
    }
    const auto n = static_cast<Eigen::Index>(recovery.size());

    if (!recovery.is_local()) {
        // Probe both uniform states and a staggered one; any coupling means the
        // per-node condition is undefined.
        std::vector<Vector> probes;
        Vector staggered(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            staggered[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
        }
        probes.push_back(staggered);
        probes.push_back(Vector::Constant(n, 0.5));
        for (const auto& p : probes) {
            Matrix j = recovery.jacobian(p);
            j.diagonal().setZero();
            if (j.cwiseAbs().maxCoeff() > 0.0) {
                throw RateError("DFR condition needs a recovery rate that depends on local state only");
            }
        }
    }

    DFRReport report;
    report.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= samples; ++k) {
        const double x = static_cast<double>(k) / static_cast<double>(samples);
        const Vector state = Vector::Constant(n, x);
        const Vector q = recovery.evaluate(state);
        const Vector dq = recovery.jacobian(state).diagonal();
        double margin = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            margin = std::min(margin, x * dq[i] - q[i]);
        }
        report.grid.push_back(x);
        report.margins.push_back(margin);
        if (margin < report.min_margin) {
            report.min_margin = margin;
            report.argmin = x;
        }
    }
    report.satisfied = report.min_margin >= -tol;
    return report;
}

}  // namespace bivirus
