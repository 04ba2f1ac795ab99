// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit on any FAIL.

#include "bivirus/analysis.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/rates.hpp"
#include "bivirus/spectral.hpp"
#include "bivirus/sweep.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

using namespace bivirus;
using testing_support::share;

namespace {

enum class Status { Pass, Fail, Skip };

struct Result {
    Status status;
    std::string detail;
};

Result pass_if(bool ok, const std::string& detail) { return {ok ? Status::Pass : Status::Fail, detail}; }

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Result()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.status == Status::Pass && secs > budget_s) {
        r.status = Status::Fail;
        r.detail += " (over the " + std::to_string(budget_s) + " s budget)";
    }
    const char* tag = r.status == Status::Pass ? "PASS" : r.status == Status::Fail ? "FAIL" : "SKIP";
    failures += r.status == Status::Fail ? 1 : 0;
    std::printf("%s  %-28s %s [%.2f s]\n", tag, name, r.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

BiVirusSystem linear_pair(std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b, double t1, double t2) {
    return linear_system(std::move(a), std::move(b), t1, t2);
}

// case 1: linear/linear, case 2: log/linear, case 3: log/poly(k=2).
BiVirusSystem case_system(int kind, std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b) {
    const std::size_t n = a->size();
    switch (kind) {
        case 1:
            return {a, b, RateModel::linear_infection(a, 0.8), RateModel::linear_recovery(n, 1.0),
                    RateModel::linear_infection(b, 0.5), RateModel::linear_recovery(n, 1.0)};
        case 2:
            return {a, b, RateModel::log_infection(a, 2.0), RateModel::linear_recovery(n, 1.0),
                    RateModel::log_infection(b, 1.5), RateModel::linear_recovery(n, 1.0)};
        default:
            return {a, b, RateModel::log_infection(a, 2.0), RateModel::poly_recovery(n, 2.0),
                    RateModel::log_infection(b, 3.0), RateModel::poly_recovery(n, 2.0)};
    }
}

testing_support::ReferenceField case_reference(int kind, const Graph& a, const Graph& b) {
    switch (kind) {
        case 1: return {a.adjacency(), b.adjacency(), 1, 0.8, 1.0, 0.5, 1.0};
        case 2: return {a.adjacency(), b.adjacency(), 2, 2.0, 1.0, 1.5, 1.0};
        default: return {a.adjacency(), b.adjacency(), 3, 2.0, 2.0, 3.0, 2.0};
    }
}

Vector stack(const StateD& s) {
    Vector z(2 * s.size());
    z << s.x, s.y;
    return z;
}

Result spectral_exactness() {
    double worst = 0.0;
    for (std::size_t n : {3, 5, 10}) {
        worst = std::max(worst, std::abs(pf_eigen(generators::complete(n).adjacency()).value - double(n - 1)));
    }
    // star_N has N nodes: a hub and N - 1 leaves.
    for (std::size_t n : {4, 10}) {
        const double expect = std::sqrt(double(n - 1));
        worst = std::max(worst, std::abs(pf_eigen(generators::star(n - 1).adjacency()).value - expect));
    }
    return pass_if(worst < 1e-9, "max error " + fmt(worst));
}

Result single_virus_dichotomy() {
    const auto g = share(generators::cycle(6));
    const Vector start = Vector::Constant(6, 0.5);
    IntegratorOptions opts;
    opts.t_max = 1e4;
    const auto low = integrate_single(RateModel::linear_infection(g, 0.4), RateModel::linear_recovery(6, 1.0),
                                      start, opts);
    const double low_norm = low.states.back().lpNorm<Eigen::Infinity>();
    const auto high = integrate_single(RateModel::linear_infection(g, 1.0), RateModel::linear_recovery(6, 1.0),
                                       Vector::Constant(6, 0.9), opts);
    // Degree-regular closed form 1 - 1/(tau d).
    const double closed = 1.0 - 1.0 / (1.0 * 2.0);
    const double high_err = (high.states.back().array() - closed).abs().maxCoeff();
    return pass_if(low_norm < 1e-6 && high_err < 1e-6,
                   "tau=0.4 |x|=" + fmt(low_norm) + ", tau=1 err=" + fmt(high_err));
}

Result winner_takes_all() {
    const auto g = share(generators::cycle(6));
    const auto sys = linear_pair(g, g, 1.0, 0.75);
    const auto v = classify(sys);
    if (v.outcome != Outcome::Virus1Wins) {
        return {Status::Fail, std::string("classified ") + to_string(v.outcome)};
    }
    const double avg_star = v.x_star.mean();
    Rng rng(2024);
    double worst_y = 0.0;
    double worst_x = 0.0;
    for (int k = 0; k < 5; ++k) {
        const auto tr = integrate(sys, random_interior_state(6, rng));
        worst_y = std::max(worst_y, tr.final_state().avg_y());
        worst_x = std::max(worst_x, std::abs(tr.final_state().avg_x() - avg_star));
    }
    return pass_if(worst_y < 1e-5 && worst_x < 1e-5,
                   "Virus1Wins, max avgY " + fmt(worst_y) + ", max |avgX-avg(x*)| " + fmt(worst_x));
}

Result trichotomy_agreement() {
    const auto a = share(generators::cycle(6));
    const auto b = share(generators::wheel(6));
    const Range r1 = default_range(pf_eigen(a->adjacency()).value);
    const Range r2 = default_range(pf_eigen(b->adjacency()).value);
    Rng rng(733);
    int agreed = 0;
    int cases = 0;
    int counts[5] = {0, 0, 0, 0, 0};
    std::string first_failure;
    while (cases < 20) {
        const double t1 = rng.uniform(r1.lo, r1.hi);
        const double t2 = rng.uniform(r2.lo, r2.hi);
        const auto sys = linear_pair(a, b, t1, t2);
        const auto v = classify(sys);
        if (v.outcome == Outcome::Boundary) {
            continue;
        }
        ++cases;
        ++counts[static_cast<int>(v.outcome)];
        std::optional<CoexistenceBracket> br;
        if (v.outcome == Outcome::Coexistence) {
            br = bracket_coexistence(sys, v);
        }
        AgreementOptions opts;
        opts.seed = static_cast<std::uint64_t>(cases);
        const auto rep = check_agreement(sys, v, br ? &*br : nullptr, opts);
        if (rep.ok()) {
            ++agreed;
        } else if (first_failure.empty()) {
            first_failure = " first miss tau1=" + fmt(t1) + " tau2=" + fmt(t2);
        }
    }
    std::ostringstream mix;
    for (int k = 0; k < 5; ++k) {
        if (counts[k] > 0) {
            mix << ' ' << to_string(static_cast<Outcome>(k)) << '=' << counts[k];
        }
    }
    return pass_if(agreed == 20, std::to_string(agreed) + "/20 agree;" + mix.str() + first_failure);
}

Result coexistence_bracket() {
    const auto a = share(generators::cycle(6));
    const auto b = share(generators::wheel(6));
    const auto grid = sweep_linear(a, b, linspace(default_range(pf_eigen(a->adjacency()).value), 41),
                                   linspace(default_range(pf_eigen(b->adjacency()).value), 41));
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t j = 0; j < grid.tau2_axis.size(); ++j) {
        for (std::size_t i = 0; i < grid.tau1_axis.size(); ++i) {
            const auto& c = grid.at(i, j);
            if (c.region == Region::R6 && std::min(c.lambda_u, c.lambda_v) > best) {
                best = std::min(c.lambda_u, c.lambda_v);
                bi = i;
                bj = j;
            }
        }
    }
    if (best < 0.0) {
        return {Status::Fail, "sweep found no R6 cell"};
    }
    const auto sys = linear_pair(a, b, grid.tau1_axis[bi], grid.tau2_axis[bj]);
    const auto v = classify(sys);
    const auto br = bracket_coexistence(sys, v);
    const double res = std::max(br.lower_residual, br.upper_residual);
    const StateD low_corner{Vector::Zero(6), v.y_star};
    const StateD high_corner{v.x_star, Vector::Zero(6)};
    const bool ordered = cone::ll(low_corner, br.lower) && cone::leq(br.lower, br.upper, 1e-9) &&
                         cone::ll(br.upper, high_corner);
    AgreementOptions opts;
    opts.starts = 5;
    const auto rep = check_agreement(sys, v, &br, opts);
    std::size_t inside = 0;
    for (const auto& c : rep.cases) {
        inside += c.agrees ? 1 : 0;
    }
    return pass_if(res < 1e-8 && ordered && rep.ok(),
                   "tau=(" + fmt(grid.tau1_axis[bi]) + "," + fmt(grid.tau2_axis[bj]) + ") residual " + fmt(res) +
                       (ordered ? ", ordered" : ", NOT ordered") + ", starts inside " +
                       std::to_string(inside) + "/" + std::to_string(rep.cases.size()));
}

Result monotone_flow() {
    const auto a = share(generators::cycle(6));
    const auto b = share(generators::wheel(6));
    const auto rep = check_monotone_flow(case_system(3, a, b), 100, {1.0, 5.0, 25.0}, 99, 1e-9);
    return pass_if(rep.ok() && rep.pairs == 100,
                   std::to_string(rep.violations.size()) + " violations, worst gap " + fmt(rep.worst_gap));
}

Result kamke() {
    const auto a = share(generators::cycle(6));
    const auto b = share(generators::wheel(6));
    const auto r2 = check_kamke(case_system(2, a, b), 50, 5, 1e-9);
    const auto r3 = check_kamke(case_system(3, a, b), 50, 6, 1e-9);
    return pass_if(r2.ok() && r3.ok() && r2.samples == 50 && r3.samples == 50,
                   "CASE 2: " + std::to_string(r2.violations.size()) + ", CASE 3: " +
                       std::to_string(r3.violations.size()) + " violations");
}

Result jacobian() {
    const auto a = share(generators::cycle(6));
    const auto b = share(generators::wheel(6));
    Rng rng(8);
    double worst = 0.0;
    for (int kind = 1; kind <= 3; ++kind) {
        const auto sys = case_system(kind, a, b);
        const auto ref = case_reference(kind, *a, *b);
        for (int k = 0; k < 20; ++k) {
            const StateD s = random_interior_state(6, rng);
            const Matrix fd = testing_support::fd_jacobian(ref, stack(s));
            worst = std::max(worst, (bivirus_jacobian(sys, s) - fd).lpNorm<Eigen::Infinity>());
        }
    }
    return pass_if(worst < 1e-5, "max |J - J_fd| " + fmt(worst));
}

Result dfr() {
    const auto lin = check_dfr(RateModel::linear_recovery(5, 1.7), 100);
    const auto poly = check_dfr(RateModel::poly_recovery(5, 2.0), 100);
    double worst = 0.0;
    for (std::size_t k = 0; k < poly.grid.size(); ++k) {
        worst = std::max(worst, std::abs(poly.margins[k] - poly.grid[k] * poly.grid[k]));
    }
    bool linear_zero = lin.min_margin == 0.0;
    for (double m : lin.margins) {
        linear_zero = linear_zero && m == 0.0;
    }
    return pass_if(linear_zero && worst < 1e-12 && !poly.grid.empty(),
                   std::string("linear margin ") + (linear_zero ? "0" : "nonzero") + ", poly max |m - x^2| " +
                       fmt(worst));
}

Result as733() {
    const char* pa = std::getenv("BIVIRUS_AS733_A");
    const char* pb = std::getenv("BIVIRUS_AS733_B");
    if (pa == nullptr || pb == nullptr) {
        return {Status::Skip, "set BIVIRUS_AS733_A and BIVIRUS_AS733_B to the edge lists"};
    }
    const double la = pf_eigen(load_edge_list(std::filesystem::path(pa)).adjacency()).value;
    const double lb = pf_eigen(load_edge_list(std::filesystem::path(pb)).adjacency()).value;
    return pass_if(std::abs(la - 12.16) <= 0.01 && std::abs(lb - 15.53) <= 0.01,
                   "lambda(A)=" + fmt(la) + " lambda(B)=" + fmt(lb));
}

}  // namespace

int main() {
    criterion("spectral-exactness", 1.0, spectral_exactness);
    criterion("single-virus-dichotomy", 5.0, single_virus_dichotomy);
    criterion("winner-takes-all", 30.0, winner_takes_all);
    criterion("trichotomy-agreement", 300.0, trichotomy_agreement);
    criterion("coexistence-bracket", 120.0, coexistence_bracket);
    criterion("monotone-flow", 600.0, monotone_flow);
    criterion("kamke-sign-structure", 600.0, kamke);
    criterion("jacobian-vs-fd", 600.0, jacobian);
    criterion("dfr-margins", 600.0, dfr);
    criterion("as733-spectra", 600.0, as733);
    std::printf("%s\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED");
    return failures == 0 ? 0 : 1;
}
