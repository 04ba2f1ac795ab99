#pragma once

// Embedded Runge-Kutta-Fehlberg 4(5) stepper shared by the single- and
// bi-virus integrators. The state is a flat vector; domain membership and
// projection are supplied by the caller. The systems are autonomous, so stage
// times are not needed.

#include "bivirus/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace bivirus::detail {

struct Rkf45Result {
    Vector y;
    double t = 0.0;
    TerminalReason reason = TerminalReason::MaxTimeReached;
    double residual = 0.0;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

// field(y) -> dy/dt; inside(y, slack) -> bool; project(y) -> y in the domain;
// on_accept(t, y) is called for the initial state and every accepted step.
template <class Field, class Inside, class Project, class Observer>
Rkf45Result rkf45(Field&& field, Inside&& inside, Project&& project, Vector y, double t0,
                  double t_end, const IntegratorOptions& opts, Observer&& on_accept) {
    constexpr double a21 = 1.0 / 4.0;
    constexpr double a31 = 3.0 / 32.0, a32 = 9.0 / 32.0;
    constexpr double a41 = 1932.0 / 2197.0, a42 = -7200.0 / 2197.0, a43 = 7296.0 / 2197.0;
    constexpr double a51 = 439.0 / 216.0, a52 = -8.0, a53 = 3680.0 / 513.0,
                     a54 = -845.0 / 4104.0;
    constexpr double a61 = -8.0 / 27.0, a62 = 2.0, a63 = -3544.0 / 2565.0,
                     a64 = 1859.0 / 4104.0, a65 = -11.0 / 40.0;
    constexpr double b1 = 16.0 / 135.0, b3 = 6656.0 / 12825.0, b4 = 28561.0 / 56430.0,
                     b5 = -9.0 / 50.0, b6 = 2.0 / 55.0;
    constexpr double e1 = 1.0 / 360.0, e3 = -128.0 / 4275.0, e4 = -2197.0 / 75240.0,
                     e5 = 1.0 / 50.0, e6 = 2.0 / 55.0;

    Rkf45Result out;
    double t = t0;
    double h = std::min(opts.h_init, t_end - t0);
    on_accept(t, y);

    while (true) {
        const Vector k1 = field(y);
        out.residual = k1.template lpNorm<Eigen::Infinity>();
        if (opts.conv_tol > 0.0 && out.residual < opts.conv_tol) {
            out.reason = TerminalReason::Converged;
            break;
        }
        if (t >= t_end) {
            out.reason = TerminalReason::MaxTimeReached;
            break;
        }

        bool accepted = false;
        while (!accepted) {
            if (h < opts.h_min) {
                out.reason = TerminalReason::StepFailure;
                out.y = y;
                out.t = t;
                return out;
            }
            const bool last = t + h >= t_end;
            const double step = last ? t_end - t : h;

            const Vector k2 = field(y + step * a21 * k1);
            const Vector k3 = field(y + step * (a31 * k1 + a32 * k2));
            const Vector k4 = field(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vector k5 = field(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vector k6 =
                field(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            Vector next = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vector err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6);

            if (!all_finite(next) || !inside(next, opts.domain_slack)) {
                h = 0.5 * step;
                continue;
            }
            const Vector scale =
                (opts.atol + opts.rtol * y.cwiseAbs().cwiseMax(next.cwiseAbs()).array()).matrix();
            const double norm = (err.array() / scale.array()).abs().maxCoeff();
            if (!std::isfinite(norm)) {
                h = 0.5 * step;
                continue;
            }
            const double factor =
                norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
            if (norm <= 1.0) {
                accepted = true;
                y = project(std::move(next));
                t = last ? t_end : t + step;
                on_accept(t, y);
                // Keep the proposed size if the final step was truncated.
                h = last ? std::max(h, step) : step * factor;
            } else {
                h = step * factor;
            }
        }
    }
    out.y = y;
    out.t = t;
    return out;
}

}  // namespace bivirus::detail
