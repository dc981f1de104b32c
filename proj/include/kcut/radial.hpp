// radial.hpp — S¹-invariant Kähler potentials on ℂ.
//
// A radial potential is a function F of t = |z|², giving the form
// ω_F = i ∂∂̄ F(|z|²).  Its moment profile is H(t) = t·F′(t); ω_F is
// symplectic exactly where H′(t) = t F″(t) + F′(t) > 0, in which case
// φ = H(|z|²) is a moment map for the standard circle action.  H is then
// strictly increasing with H(0) = 0; its limit a = lim H(t) ∈ (0, ∞] caps
// the moment window of a cut, and the inverse K : [0, a) → [0, ∞) drives
// the level-set section.
//
// Builtin kinds:
//   quadratic(a₀):    F(t) = a₀·t           (flat; H(t) = a₀ t, a = ∞)
//   log_einstein(κ):  F(t) = (2/κ)·log(1+t) (Kähler–Einstein on ℂ with
//                                            structure constant κ;
//                                            H(t) = 2t/(κ(1+t)), a = 2/κ)
//   custom(coeffs):   polynomial series Σ cₖ tᵏ with term-wise derivatives
//
// All values are immutable after construction and every operation is a
// pure function; concurrent evaluation needs no synchronization.

#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kcut/errors.hpp"

namespace kcut {

enum class RadialKind { quadratic, log_einstein, custom };

struct RadialPotential {
    RadialKind kind;
    double a0 = 0.0;                 // quadratic scale
    double kappa = 0.0;              // Einstein structure constant
    std::vector<double> coeffs;      // custom series, F(t) = Σ coeffs[k] t^k
    double t_max = 1e6;              // declared evaluation range for custom kinds

    std::function<double(double)> F;
    std::function<double(double)> F1;
    std::function<double(double)> F2;
};

struct MomentProfile {
    std::function<double(double)> H;   // H(t) = t F'(t)
    std::function<double(double)> H1;  // H'(t) = t F''(t) + F'(t)
    double cap_a = std::numeric_limits<double>::infinity();
    bool cap_estimated = false;        // custom kinds: cap taken as H(t_max)
    double tolerance = 1e-12;
    int max_iter = 200;
};

struct SymplecticVerdict {
    bool symplectic = true;
    double fails_at = 0.0;             // first grid point with H'(t) <= 0
};

// Construction specs, also the CLI-facing key/value record.
struct RadialSpec {
    std::string kind;                  // "quadratic" | "log_einstein" | "custom"
    double a0 = 1.0;
    double kappa = 1.0;
    std::vector<double> coeffs;
    double t_max = 10.0;
};

RadialPotential make_radial(const RadialSpec& spec);

// Convenience constructors for the builtin kinds.
RadialPotential make_quadratic(double a0);
RadialPotential make_log_einstein(double kappa);
RadialPotential make_custom(std::vector<double> coeffs, double t_max);

// Custom potential from explicit evaluators; the declared derivatives are
// checked against finite differences of F at construction.
RadialPotential make_custom_explicit(std::function<double(double)> F,
                                     std::function<double(double)> F1,
                                     std::function<double(double)> F2,
                                     double t_max);

MomentProfile moment_profile(const RadialPotential& p);

// Inverse of the moment profile: the unique t >= 0 with H(t) = s.
// Bracket growth plus bisection/secant on the strictly increasing H.
double invert_moment(const MomentProfile& mp, double s);

// Lemma-style dichotomy: symplectic iff H'(t) > 0 at every grid point.
SymplecticVerdict check_symplectic(const RadialPotential& p, const std::vector<double>& grid);

} // namespace kcut
