// cuts.hpp — Kähler cuts of a coordinate chart along a weighted circle
// action.
//
// The ambient space is a chart of M carrying a toric potential
// ρ(t₁,…,tₙ), t_j = |z_j|², times a ℂ factor carrying a radial potential
// F(|w|²).  The circle acts by z_j ↦ e^{i w_j θ} z_j, w ↦ e^{iθ} w with
// moment map ψ = φ + H(|w|²), φ = Σ_j w_j t_j ∂ρ/∂t_j.  Cutting at level
// λ produces, on the invariant chart ζ_j = z_j·w^{-w_j}, the reduced
// potential
//     ρ_λ(ζ) = ρ(t(u)) + F(u) - λ log u,     t_j = |ζ_j|²·u^{w_j},
// where u = |w|² solves ψ = λ along the real-positive-w section (a
// strictly monotone 1-D root find).  The paper-facing quantities are the
// reduced form ω_λ = i∂∂̄ρ_λ, its Ricci form μ^λ, the fiber circumference
// V_eff, the bundle curvature μ = i∂∂̄ log u, and the structure constant c
// of the modified Einstein identity
//     μ^λ - 2 i∂∂̄ log V_eff + c·μ = κ(ω_λ + λ·μ).
//
// Closed-form targets (euclidean_cut, euclidean_blowup, fs_blowup) give
// the oracle layer for all of the numeric paths.
//
// CutProblem and CutChart are immutable after construction; every
// operation is pure, so grid sweeps may run per-point in parallel.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kcut/hermitian.hpp"
#include "kcut/radial.hpp"

namespace kcut {

// Toric M-chart potential ρ(t₁,…,tₙ).  grad is required; hess is optional
// (builtins provide it, which keeps the ambient metric exact).
struct ToricPotential {
    std::size_t n = 1;
    std::function<double(const std::vector<double>&)> rho;
    std::function<std::vector<double>(const std::vector<double>&)> grad;
    std::function<std::vector<double>(const std::vector<double>&)> hess;  // row-major n×n, may be null
};

ToricPotential toric_flat(std::size_t n);
ToricPotential toric_fs(std::size_t n, double scale);  // scale·log(1 + Σt)

struct CutProblem {
    ToricPotential m_potential;
    std::vector<int> weights;            // circle weights on the M chart
    double level = 0.0;                  // λ
    RadialPotential radial;
    MomentProfile profile;
    std::optional<double> einstein_kappa;
    std::optional<double> structure_c;
};

// Validates metric positivity, S¹-invariance and level regularity at the
// probe points before handing back the problem.
CutProblem make_cut_problem(ToricPotential pot, std::vector<int> weights, double level,
                            const RadialPotential& radial,
                            const std::vector<ComplexPoint>& probes,
                            std::optional<double> einstein_kappa = std::nullopt,
                            std::optional<double> structure_c = std::nullopt);

enum class WeightPattern { nonnegative, nonpositive };

struct CutChart {
    WeightPattern pattern = WeightPattern::nonnegative;
    std::function<double(const ComplexPoint&)> w_solver;  // ζ ↦ |w|² on the level set
    std::function<bool(const ComplexPoint&)> domain;      // ζ where the solve succeeds
    std::shared_ptr<const CutProblem> problem;
};

// Rejects genuinely mixed weight signs (unsupported); all-nonnegative
// weights give the projectivized chart ζ_j = z_j/w^{w_j}, all-nonpositive
// the blow-up chart ζ_j = z_j·w^{|w_j|}.
CutChart make_chart(const CutProblem& p);

struct CurvaturePack {
    OneOneForm omega_lambda;
    OneOneForm ricci_lambda;
    OneOneForm bundle_mu;
    double v_eff = 0.0;
    ComplexPoint at;
};

// --- ambient-side operations -------------------------------------------

double moment_map(const CutProblem& p, const ComplexPoint& z);

// σ(m) = (m, sqrt(K(λ - φ(m)))); ψ(σ(m)) = λ.
struct SectionPoint {
    ComplexPoint m;
    double w = 0.0;
};
SectionPoint section_sigma(const CutProblem& p, const ComplexPoint& m);

// Unique t₁ with φ(e^{t}·m) + H(e^{2t}) = λ; throws not-semistable when the
// crossing curve never reaches λ.
double orbit_crossing(const CutProblem& p, const ComplexPoint& m);

// The cut biholomorphism in coordinates (quadratic radial): scales z_j by
// e^{w_j κ(q)}, κ(q) = -½ log((λ - φ(q))/a₀).
ComplexPoint map_g(const CutProblem& p, const ComplexPoint& q);

// Independent evaluation of g through the orbit-crossing identification
// (nested monotone root finds, no use of the closed-form κ).  Used by the
// path-agreement checks.
ComplexPoint map_g_orbit_path(const CutProblem& p, const ComplexPoint& q);

// --- cut-side operations -------------------------------------------------

// ρ_λ(ζ); evaluations carry the level solve inside.
double reduced_potential(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta);
PotentialField reduced_potential_field(const CutProblem& p, const CutChart& chart);

OneOneForm reduced_form(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta);

double v_eff(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta);

OneOneForm bundle_curvature(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta);

// form_distance between the two sides of the modified Einstein identity.
double einstein_residual(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta);

struct StructureConstant {
    double c = 0.0;
    double spread = 0.0;
};
// Samples are points of M×ℂ given as (z, w); w_weight is the Z-weight of
// the ℂ factor (1 for the diagonal cut action).
StructureConstant structure_constant(const CutProblem& p,
                                     const std::vector<std::pair<ComplexPoint, Complex>>& sample,
                                     int w_weight = 1);

// --- closed-form examples (the oracle layer) ----------------------------

enum class ExampleName { euclidean_cut, euclidean_blowup, fs_blowup };

struct ExampleParams {
    std::size_t n = 1;
    double lambda = 1.0;
    double kappa = 1.0;   // fs_blowup ambient Einstein constant
};

struct ClosedFormValues {
    double rho_lambda = 0.0;
    double u = 0.0;              // |w|² on the level set
    double v_eff = 0.0;
    double c = 0.0;
    OneOneForm omega_lambda;     // ddbar of the closed-form potential
    OneOneForm mu_L;             // ddbar of log u
    bool singular = false;       // euclidean λ = 0
};

ClosedFormValues closed_form_example(ExampleName name, const ExampleParams& params,
                                     const ComplexPoint& zeta);

// Closed-form scalar pieces, exposed for oracle tests.
double example_u(ExampleName name, const ExampleParams& params, double r);    // r = |ζ|²
double example_rho(ExampleName name, const ExampleParams& params, double r);
double example_v_eff(ExampleName name, const ExampleParams& params, double r);

// Builds the CutProblem + CutChart realizing a named example.
std::pair<CutProblem, CutChart> example_problem(ExampleName name, const ExampleParams& params);

ExampleName example_from_string(const std::string& s);

// --- verification helpers -------------------------------------------------

// Distance between the pullback of ω_λ through the cut identification and
// the ambient form at q (the "ω = ω^λ on M^λ_o" identity).
double pullback_defect(const CutProblem& p, const CutChart& chart, const ComplexPoint& q);

// Ambient M-chart potential as a field over z.
PotentialField ambient_m_field(const CutProblem& p);

// Ambient metric block a_{jk̄} on the M chart (analytic when the toric
// Hessian is present, finite differences otherwise).
OneOneForm ambient_m_metric(const CutProblem& p, const ComplexPoint& z);

} // namespace kcut
