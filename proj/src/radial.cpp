#include "kcut/radial.hpp"

#include <algorithm>
#include <cmath>

#include "kcut/rootfind.hpp"

namespace kcut {

namespace {

// Finite-difference consistency probe: F1 and F2 must match central
// differences of F to relative error 1e-6 on a grid of the declared range.
void check_derivative_consistency(const RadialPotential& p, double t_hi, const char* op)
{
    const double h0 = 3e-4;
    for (int i = 0; i <= 16; ++i) {
        double t = t_hi * static_cast<double>(i) / 16.0;
        double h = h0 * (1.0 + t);
        if (t - h < 0.0) t = h;  // keep the stencil inside t >= 0
        double d1 = (p.F(t + h) - p.F(t - h)) / (2.0 * h);
        double d2 = (p.F(t + h) - 2.0 * p.F(t) + p.F(t - h)) / (h * h);
        if (!std::isfinite(d1) || !std::isfinite(d2) ||
            !std::isfinite(p.F1(t)) || !std::isfinite(p.F2(t)))
            fail(ErrorCode::numeric_failure, op, "non-finite evaluation on probe grid");
        double scale1 = std::max({1.0, std::fabs(d1), std::fabs(p.F1(t))});
        double scale2 = std::max({1.0, std::fabs(d2), std::fabs(p.F2(t))});
        if (std::fabs(d1 - p.F1(t)) > 1e-6 * scale1 ||
            std::fabs(d2 - p.F2(t)) > 1e-6 * scale2)
            fail(ErrorCode::inconsistent_derivatives, op,
                 "declared derivatives disagree with finite differences at t=" + std::to_string(t));
    }
}

double poly_eval(const std::vector<double>& c, double t)
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double poly_eval_d1(const std::vector<double>& c, double t)
{
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * t + static_cast<double>(k) * c[k];
    return acc;
}

double poly_eval_d2(const std::vector<double>& c, double t)
{
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 2;)
        acc = acc * t + static_cast<double>(k) * static_cast<double>(k - 1) * c[k];
    return acc;
}

} // namespace

RadialPotential make_quadratic(double a0)
{
    if (!(a0 > 0.0))
        fail(ErrorCode::invalid_parameter, "make_radial", "quadratic scale must be positive");
    RadialPotential p;
    p.kind = RadialKind::quadratic;
    p.a0 = a0;
    p.F  = [a0](double t) { return a0 * t; };
    p.F1 = [a0](double)   { return a0; };
    p.F2 = [](double)     { return 0.0; };
    check_derivative_consistency(p, 10.0, "make_radial");
    return p;
}

RadialPotential make_log_einstein(double kappa)
{
    if (!(kappa > 0.0))
        fail(ErrorCode::invalid_parameter, "make_radial", "kappa must be positive");
    RadialPotential p;
    p.kind = RadialKind::log_einstein;
    p.kappa = kappa;
    const double s = 2.0 / kappa;
    p.F  = [s](double t) { return s * std::log1p(t); };
    p.F1 = [s](double t) { return s / (1.0 + t); };
    p.F2 = [s](double t) { double u = 1.0 + t; return -s / (u * u); };
    check_derivative_consistency(p, 10.0, "make_radial");
    return p;
}

RadialPotential make_custom(std::vector<double> coeffs, double t_max)
{
    if (coeffs.empty())
        fail(ErrorCode::invalid_parameter, "make_radial", "custom series needs coefficients");
    if (!(t_max > 0.0))
        fail(ErrorCode::invalid_parameter, "make_radial", "t_max must be positive");
    RadialPotential p;
    p.kind = RadialKind::custom;
    p.coeffs = std::move(coeffs);
    p.t_max = t_max;
    const auto c = p.coeffs;
    p.F  = [c](double t) { return poly_eval(c, t); };
    p.F1 = [c](double t) { return poly_eval_d1(c, t); };
    p.F2 = [c](double t) { return poly_eval_d2(c, t); };
    check_derivative_consistency(p, t_max, "make_radial");
    return p;
}

RadialPotential make_custom_explicit(std::function<double(double)> F,
                                     std::function<double(double)> F1,
                                     std::function<double(double)> F2,
                                     double t_max)
{
    if (!F || !F1 || !F2)
        fail(ErrorCode::invalid_parameter, "make_radial", "missing evaluator");
    if (!(t_max > 0.0))
        fail(ErrorCode::invalid_parameter, "make_radial", "t_max must be positive");
    RadialPotential p;
    p.kind = RadialKind::custom;
    p.t_max = t_max;
    p.F = std::move(F);
    p.F1 = std::move(F1);
    p.F2 = std::move(F2);
    check_derivative_consistency(p, t_max, "make_radial");
    return p;
}

RadialPotential make_radial(const RadialSpec& spec)
{
    if (spec.kind == "quadratic")    return make_quadratic(spec.a0);
    if (spec.kind == "log_einstein") return make_log_einstein(spec.kappa);
    if (spec.kind == "custom")       return make_custom(spec.coeffs, spec.t_max);
    fail(ErrorCode::invalid_parameter, "make_radial", "unknown kind '" + spec.kind + "'");
}

MomentProfile moment_profile(const RadialPotential& p)
{
    MomentProfile mp;
    const auto F1 = p.F1;
    const auto F2 = p.F2;
    mp.H  = [F1](double t) { return t * F1(t); };
    mp.H1 = [F1, F2](double t) { return t * F2(t) + F1(t); };
    switch (p.kind) {
        case RadialKind::quadratic:
            mp.cap_a = std::numeric_limits<double>::infinity();
            break;
        case RadialKind::log_einstein:
            mp.cap_a = 2.0 / p.kappa;   // H(t) = (2/κ)·t/(1+t) → 2/κ
            break;
        case RadialKind::custom:
            // No computation rule for the limit; report the profile value at
            // the end of the declared range and flag it as an estimate.
            mp.cap_a = mp.H(p.t_max);
            mp.cap_estimated = true;
            break;
    }
    return mp;
}

double invert_moment(const MomentProfile& mp, double s)
{
    if (s < 0.0 || s >= mp.cap_a)
        fail(ErrorCode::out_of_range, "invert_moment",
             "s=" + std::to_string(s) + " outside [0, cap_a)");
    if (s == 0.0) return 0.0;  // H(0) = 0 for every kind

    auto f = [&mp](double t) { return mp.H(t); };
    auto bracket = grow_bracket(f, s, 0.0, std::max(1.0, s), 1e300, 64);
    if (!bracket)
        fail(ErrorCode::no_convergence, "invert_moment", "bracket growth exhausted");
    RootOptions opt;
    opt.abs_tol = mp.tolerance;
    opt.rel_tol = mp.tolerance;
    opt.max_iter = mp.max_iter;
    return solve_increasing_bracketed(f, s, bracket->first, bracket->second, opt, "invert_moment");
}

SymplecticVerdict check_symplectic(const RadialPotential& p, const std::vector<double>& grid)
{
    if (grid.empty())
        fail(ErrorCode::invalid_parameter, "check_symplectic", "grid is empty");
    MomentProfile mp = moment_profile(p);
    for (double t : grid) {
        if (t < 0.0)
            fail(ErrorCode::invalid_parameter, "check_symplectic", "grid point t < 0");
        if (!(mp.H1(t) > 0.0))
            return SymplecticVerdict{false, t};
    }
    return SymplecticVerdict{true, 0.0};
}

} // namespace kcut
