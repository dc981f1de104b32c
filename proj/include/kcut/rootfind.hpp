// rootfind.hpp — monotone scalar root finding: bracket growth, bisection,
// safeguarded Newton polish.  Shared by the moment-profile inversion, the
// level-set solver and the orbit-crossing solve, all of which invert a
// strictly increasing function.

#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "kcut/errors.hpp"

namespace kcut {

struct RootOptions {
    double abs_tol = 1e-12;       // |f(x) - target| <= abs_tol + rel_tol*max(1,|target|)
    double rel_tol = 1e-12;
    int max_iter = 200;
    int polish_steps = 3;         // full Newton/secant steps after bisection
};

// Root of the increasing function f on [lo, hi] with f(lo) <= target <= f(hi).
// Bisection narrows the bracket, then bracket-guarded secant steps push the
// root to machine rounding (keeps downstream finite differences quiet).
inline double solve_increasing_bracketed(const std::function<double(double)>& f,
                                         double target, double lo, double hi,
                                         const RootOptions& opt = {},
                                         const char* op = "solve_increasing")
{
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo > 0.0 || fhi < 0.0)
        fail(ErrorCode::no_convergence, op, "bracket does not straddle target");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    const double tol = opt.abs_tol + opt.rel_tol * std::max(1.0, std::fabs(target));
    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int i = 0; i < opt.max_iter; ++i) {
        double m = 0.5 * (a + b);
        if (!(m > a && m < b)) break;   // machine-width bracket
        double fm = f(m) - target;
        if (!std::isfinite(fm))
            fail(ErrorCode::numeric_failure, op, "non-finite evaluation during bisection");
        if (fm == 0.0) return m;
        if (fm < 0.0) { a = m; fa = fm; } else { b = m; fb = fm; }
        if ((b - a) < 1e-4 * (1.0 + std::fabs(m))) break;   // narrow enough for secant
    }

    // secant from the bracket endpoints, safeguarded by the bracket; keep
    // the best iterate seen and stop once improvement ends
    double x0 = a, f0 = fa, x1 = b, f1 = fb;
    double x_best = (std::fabs(fa) <= std::fabs(fb)) ? a : b;
    double f_best = std::min(std::fabs(fa), std::fabs(fb));
    int steps = std::max(8, opt.polish_steps);
    for (int i = 0; i < steps; ++i) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 > a && x2 < b)) x2 = 0.5 * (a + b);
        if (x2 == x1 || x2 == x0) break;
        double f2 = f(x2) - target;
        if (!std::isfinite(f2))
            fail(ErrorCode::numeric_failure, op, "non-finite evaluation during polish");
        if (f2 == 0.0) return x2;
        if (std::fabs(f2) < f_best) {
            f_best = std::fabs(f2);
            x_best = x2;
        } else if (f_best <= tol) {
            break;   // converged, further steps only wander
        }
        if (f2 < 0.0) a = x2; else b = x2;
        x0 = x1; f0 = f1;
        x1 = x2; f1 = f2;
    }
    if (f_best > tol)
        fail(ErrorCode::no_convergence, op, "residual above tolerance after iteration budget");
    return x_best;
}

// Expands [x0 - step, x0 + step] geometrically until f straddles target.
// Returns nullopt when the budget runs out (caller decides what that means:
// out of range, not semistable, ...).
inline std::optional<std::pair<double, double>>
grow_bracket(const std::function<double(double)>& f, double target,
             double x0, double step, double limit, int budget = 64)
{
    double lo = x0, hi = x0;
    double fc = f(x0) - target;
    if (fc == 0.0) return std::make_pair(x0, x0);
    double s = step;
    if (fc < 0.0) {
        for (int i = 0; i < budget; ++i) {
            hi = std::min(x0 + s, limit);
            if (f(hi) - target >= 0.0) return std::make_pair(lo, hi);
            if (hi >= limit) return std::nullopt;
            s *= 2.0;
        }
    } else {
        for (int i = 0; i < budget; ++i) {
            lo = std::max(x0 - s, -limit);
            if (f(lo) - target <= 0.0) return std::make_pair(lo, hi);
            if (lo <= -limit) return std::nullopt;
            s *= 2.0;
        }
    }
    return std::nullopt;
}

} // namespace kcut
