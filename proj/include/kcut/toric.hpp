// toric.hpp — polyhedral combinatorics and stability for cuts by toric
// manifolds: faces of rational polyhedral sets, isotropy subalgebras,
// stratification and smoothness verdicts, and the torus Kempf–Ness solve.
//
// Face and isotropy computations run in exact integer/rational arithmetic;
// floating tolerances enter only when classifying floating-point moment
// values against facets (1e-10 relative) and when matching torus phases
// (1e-8).

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "kcut/cuts.hpp"
#include "kcut/lattice.hpp"
#include "kcut/radial.hpp"

namespace kcut {

struct HalfSpace {
    IntVec normal;     // primitive integer normal N
    Rational offset;   // <eta, N> >= offset
};

struct PolyhedralSet {
    std::size_t k = 1;
    std::vector<HalfSpace> constraints;   // nonredundant after construction
    RatVec witness;                       // a point of the set
};

// Primitivizes normals, prunes redundant constraints, requires nonempty.
PolyhedralSet make_polyhedral_set(std::size_t k, std::vector<HalfSpace> constraints);

struct Face {
    std::vector<std::size_t> active;   // sorted constraint indices tight on the face
    RatVec witness;                    // relative-interior point
    std::size_t dim = 0;
};

struct IsotropyAlgebra {
    IntMat basis;        // primitive independent rows spanning g_E
    std::size_t rank = 0;
};

Face face_of(const PolyhedralSet& delta, const RatVec& eta);
Face face_of(const PolyhedralSet& delta, const std::vector<double>& eta);

// All nonempty open faces (constraint count capped at 20).
std::vector<Face> enumerate_faces(const PolyhedralSet& delta);

// g_E = annihilator of the face's direction space, as a saturated integer
// lattice; equals the span of the active normals when Δ is full-dimensional.
IsotropyAlgebra isotropy(const PolyhedralSet& delta, const Face& face);

// --- torus cut problems ----------------------------------------------------

struct XFactor {
    enum class Kind { radial, cstar } kind = Kind::radial;
    RadialPotential radial;       // kind == radial
    MomentProfile profile;
    double cstar_scale = 1.0;     // kind == cstar: H(t) = scale·log t
    int orientation = -1;         // Ψ = offset + orientation·H(|x|²)
    double offset = 0.0;
};

XFactor radial_factor(const RadialPotential& p, int orientation, double offset);
XFactor cstar_factor(double scale, int orientation, double offset);

struct TorusCutProblem {
    std::size_t k = 1;                // torus rank
    std::size_t n = 1;                // M-chart dimension
    ToricPotential m_potential;
    IntMat weight_matrix;             // k × n integer weights
    PolyhedralSet delta;
    std::vector<XFactor> factors;     // empty: combinatorics only; else size k
};

TorusCutProblem make_torus_cut_problem(std::size_t k, ToricPotential m_potential,
                                       IntMat weight_matrix, PolyhedralSet delta,
                                       std::vector<XFactor> factors = {});

// Δ carved out of the factor moment intervals (attained facets only).
PolyhedralSet delta_from_factors(const std::vector<XFactor>& factors);

// k-component moment map of the M-side torus action.
std::vector<double> torus_moment(const TorusCutProblem& p, const ComplexPoint& m);

// X-side moment map Ψ at the factor point x.
std::vector<double> x_moment(const TorusCutProblem& p, const ComplexPoint& x);

enum class StratumLabel { equivalent, distinct };
StratumLabel stratum_label(const TorusCutProblem& p, const ComplexPoint& m, const ComplexPoint& m2);

struct SmoothnessVerdict {
    bool smooth = true;
    // order of the finite isotropy witness; 0 encodes an infinite stabilizer
    std::int64_t witness_order = 1;
};
SmoothnessVerdict smoothness_check(const TorusCutProblem& p, const ComplexPoint& m);

struct KempfNessResult {
    bool stable = false;
    std::vector<double> t;       // solution of Φ(exp(t)·(m,x)) = 0 when stable
    double residual = 0.0;
    int iterations = 0;
};

// Damped Newton on the monotone moment system; `unstable` reported via
// stable = false when the residual stalls with a diverging iterate; throws
// inconclusive when the budget runs out without a classification.
KempfNessResult kempf_ness_solve(const TorusCutProblem& p, const ComplexPoint& m,
                                 const ComplexPoint& x, int budget = 200);

} // namespace kcut
