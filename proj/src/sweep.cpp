#include "bivirus/sweep.hpp"

#include "bivirus/spectral.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace bivirus {

namespace {

// Runs fn(k) for k in [0, count) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void require_axis(const std::vector<double>& axis, const char* name) {
    if (axis.size() < 2) {
        throw Error(std::string(name) + " axis needs at least 2 points");
    }
    for (std::size_t k = 0; k < axis.size(); ++k) {
        if (!(axis[k] > 0.0) || (k > 0 && !(axis[k] > axis[k - 1]))) {
            throw Error(std::string(name) + " axis must be positive and strictly increasing");
        }
    }
}

FixedPoint linear_fixed_point(const std::shared_ptr<const Graph>& g, double tau) {
    return single_virus_fixed_point(RateModel::linear_infection(g, tau),
                                    RateModel::linear_recovery(g->size(), 1.0));
}

// lambda(diag(1 - s) M) for a nonnegative irreducible M.
double damped_radius(const Vector& s, const Matrix& m) {
    return pf_eigen((1.0 - s.array()).matrix().asDiagonal() * m).value;
}

}  // namespace

const char* to_string(Region r) {
    switch (r) {
        case Region::R1: return "R1";
        case Region::R2: return "R2";
        case Region::R3: return "R3";
        case Region::R4: return "R4";
        case Region::R5: return "R5";
        case Region::R6: return "R6";
        case Region::Boundary: return "Boundary";
    }
    return "?";
}

Region region_of(const TrichotomyVerdict& v) {
    switch (v.outcome) {
        case Outcome::VirusFree: return Region::R1;
        case Outcome::Virus1Wins: return v.lambda_h0 <= 0.0 ? Region::R2 : Region::R5;
        case Outcome::Virus2Wins: return v.lambda_g0 <= 0.0 ? Region::R3 : Region::R4;
        case Outcome::Coexistence: return Region::R6;
        case Outcome::Boundary: return Region::Boundary;
    }
    return Region::Boundary;
}

std::vector<double> linspace(Range r, std::size_t points) {
    if (points < 2) {
        throw Error("linspace needs at least 2 points");
    }
    std::vector<double> out(points);
    for (std::size_t k = 0; k < points; ++k) {
        out[k] = r.lo + (r.hi - r.lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    out.back() = r.hi;
    return out;
}

Range default_range(double lambda) { return {0.5 / lambda, 4.0 / lambda}; }

unsigned worker_count(unsigned requested) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BIVIRUS_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) {
            n = std::min(n, static_cast<unsigned>(cap));
        }
    }
    return n;
}

BiVirusSystem linear_system(std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b,
                            double tau1, double tau2) {
    const auto n = a->size();
    auto g = RateModel::linear_infection(a, tau1);
    auto h = RateModel::linear_infection(b, tau2);
    return BiVirusSystem(std::move(a), std::move(b), std::move(g),
                         RateModel::linear_recovery(n, 1.0), std::move(h),
                         RateModel::linear_recovery(n, 1.0));
}

RegionGrid sweep_linear(std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b,
                        const std::vector<double>& tau1_axis, const std::vector<double>& tau2_axis,
                        SweepOptions opts) {
    require_axis(tau1_axis, "tau1");
    require_axis(tau2_axis, "tau2");
    const unsigned workers = worker_count(opts.threads);

    // Linear rates satisfy the assumptions for every tau; one check suffices.
    {
        const auto sys = linear_system(a, b, tau1_axis.front(), tau2_axis.front());
        for (const auto& [f, q] : {std::pair{&sys.g(), &sys.r()}, std::pair{&sys.h(), &sys.s()}}) {
            if (!check_assumptions(*f, *q).all_passed()) {
                throw Error("linear rate pair failed the assumption checks");
            }
        }
    }

    std::vector<FixedPoint> xs(tau1_axis.size());
    std::vector<FixedPoint> ys(tau2_axis.size());
    parallel_for(xs.size(), workers, [&](std::size_t i) { xs[i] = linear_fixed_point(a, tau1_axis[i]); });
    parallel_for(ys.size(), workers, [&](std::size_t j) { ys[j] = linear_fixed_point(b, tau2_axis[j]); });

    RegionGrid grid;
    grid.tau1_axis = tau1_axis;
    grid.tau2_axis = tau2_axis;
    grid.cells.resize(tau1_axis.size() * tau2_axis.size());
    const auto n = static_cast<Eigen::Index>(a->size());
    parallel_for(grid.cells.size(), workers, [&](std::size_t k) {
        const std::size_t i = k % tau1_axis.size();
        const std::size_t j = k / tau1_axis.size();
        const auto sys = linear_system(a, b, tau1_axis[i], tau2_axis[j]);
        const Vector x_star = xs[i].threshold > opts.eps ? xs[i].x : Vector::Zero(n);
        const Vector y_star = ys[j].threshold > opts.eps ? ys[j].x : Vector::Zero(n);
        const auto v = verdict_from_fixed_points(sys, x_star, y_star, xs[i].threshold,
                                                 ys[j].threshold, opts.eps);
        grid.cells[k] = {region_of(v), v.lambda_g0, v.lambda_h0, v.lambda_u, v.lambda_v};
    });
    return grid;
}

std::vector<CurvePoint> threshold_curves(std::shared_ptr<const Graph> a,
                                         std::shared_ptr<const Graph> b,
                                         const std::vector<double>& tau2_axis, double tol) {
    const Matrix& am = a->adjacency();
    const Matrix& bm = b->adjacency();
    const double lambda_a = pf_eigen(am).value;
    const double lambda_b = pf_eigen(bm).value;
    // Matches the accuracy of the PF eigenvalue.
    constexpr double kEdge = 1e-9;

    std::vector<CurvePoint> out;
    out.reserve(tau2_axis.size());
    for (double tau2 : tau2_axis) {
        if (!(tau2 > 0.0)) {
            throw Error("tau2 values must be positive");
        }
        CurvePoint p{tau2, 0.0, std::numeric_limits<double>::quiet_NaN()};
        const double excess = tau2 * lambda_b - 1.0;
        p.tau1_blue = 1.0 / lambda_a;
        if (excess > kEdge) {
            p.tau1_blue = 1.0 / damped_radius(linear_fixed_point(b, tau2).x, am);
        }

        if (std::abs(excess) <= kEdge) {
            p.tau1_red = 1.0 / lambda_a;
        } else if (excess > 0.0) {
            // phi(tau1) = tau2 * lambda(S_{x*(tau1)} B) - 1 decreases from
            // tau2 lambda(B) - 1 > 0 at tau1 = 1/lambda(A) towards -1.
            auto phi = [&](double tau1) {
                const auto fx = linear_fixed_point(a, tau1);
                const Vector x = fx.threshold > 0.0 ? fx.x : Vector::Zero(am.rows());
                return tau2 * damped_radius(x, bm) - 1.0;
            };
            double lo = 1.0 / lambda_a;
            double hi = 2.0 / lambda_a;
            int doublings = 0;
            while (phi(hi) > 0.0) {
                lo = hi;
                hi *= 2.0;
                if (++doublings > 60) {
                    throw CurveError("red curve: no sign change found", 1.0 / lambda_a, hi);
                }
            }
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                (phi(mid) > 0.0 ? lo : hi) = mid;
            }
            p.tau1_red = 0.5 * (lo + hi);
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace bivirus
