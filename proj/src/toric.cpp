#include "kcut/toric.hpp"

#include <algorithm>
#include <cmath>

namespace kcut {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Rational dot(const IntVec& n, const RatVec& eta)
{
    Rational s(0);
    for (std::size_t i = 0; i < n.size(); ++i)
        s = s + Rational(n[i]) * eta[i];
    return s;
}

double dot_d(const IntVec& n, const std::vector<double>& eta)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i)
        s += static_cast<double>(n[i]) * eta[i];
    return s;
}

// strict-interior witness for a prescribed active set, or nullopt when the
// active pattern is not an open face
std::optional<RatVec> open_face_witness(const PolyhedralSet& delta,
                                        const std::vector<std::size_t>& active)
{
    std::vector<LinConstraint> sys;
    for (std::size_t j = 0; j < delta.constraints.size(); ++j) {
        LinConstraint lc;
        lc.a.resize(delta.k);
        for (std::size_t i = 0; i < delta.k; ++i)
            lc.a[i] = Rational(delta.constraints[j].normal[i]);
        lc.c = delta.constraints[j].offset;
        lc.rel = std::binary_search(active.begin(), active.end(), j) ? Rel::eq : Rel::gt;
        sys.push_back(std::move(lc));
    }
    return feasible_point(std::move(sys), delta.k);
}

std::size_t face_dim(const PolyhedralSet& delta, const std::vector<std::size_t>& active)
{
    RatMat normals;
    for (std::size_t j : active) {
        RatVec row(delta.k);
        for (std::size_t i = 0; i < delta.k; ++i)
            row[i] = Rational(delta.constraints[j].normal[i]);
        normals.push_back(std::move(row));
    }
    return delta.k - rank_rational(normals);
}

} // namespace

PolyhedralSet make_polyhedral_set(std::size_t k, std::vector<HalfSpace> constraints)
{
    if (k == 0)
        fail(ErrorCode::invalid_parameter, "make_polyhedral_set", "dimension must be positive");
    for (HalfSpace& h : constraints) {
        if (h.normal.size() != k)
            fail(ErrorCode::dimension_error, "make_polyhedral_set", "normal dimension mismatch");
        std::int64_t g = 0;
        bool nonzero = false;
        for (std::int64_t x : h.normal) {
            g = int_gcd(g, x);
            nonzero = nonzero || (x != 0);
        }
        if (!nonzero)
            fail(ErrorCode::invalid_parameter, "make_polyhedral_set", "zero normal vector");
        if (g > 1) {
            for (std::int64_t& x : h.normal) x /= g;
            h.offset = h.offset / Rational(g);
        }
    }

    PolyhedralSet delta;
    delta.k = k;
    delta.constraints = std::move(constraints);

    // prune redundant constraints: j is redundant iff the others force it
    for (std::size_t j = 0; j < delta.constraints.size();) {
        std::vector<LinConstraint> sys;
        for (std::size_t i = 0; i < delta.constraints.size(); ++i) {
            if (i == j) continue;
            LinConstraint lc;
            lc.a.resize(k);
            for (std::size_t v = 0; v < k; ++v)
                lc.a[v] = Rational(delta.constraints[i].normal[v]);
            lc.c = delta.constraints[i].offset;
            lc.rel = Rel::ge;
            sys.push_back(std::move(lc));
        }
        LinConstraint viol;   // <eta, N_j> < c_j  ⇔  <-N_j, eta> > -c_j
        viol.a.resize(k);
        for (std::size_t v = 0; v < k; ++v)
            viol.a[v] = Rational(-delta.constraints[j].normal[v]);
        viol.c = -delta.constraints[j].offset;
        viol.rel = Rel::gt;
        sys.push_back(std::move(viol));
        if (!feasible_point(std::move(sys), k)) {
            delta.constraints.erase(delta.constraints.begin() + static_cast<std::ptrdiff_t>(j));
        } else {
            ++j;
        }
    }

    std::vector<LinConstraint> all;
    for (const HalfSpace& h : delta.constraints) {
        LinConstraint lc;
        lc.a.resize(k);
        for (std::size_t v = 0; v < k; ++v) lc.a[v] = Rational(h.normal[v]);
        lc.c = h.offset;
        lc.rel = Rel::ge;
        all.push_back(std::move(lc));
    }
    auto w = feasible_point(std::move(all), k);
    if (!w)
        fail(ErrorCode::invalid_parameter, "make_polyhedral_set", "empty polyhedral set");
    delta.witness = *w;
    return delta;
}

Face face_of(const PolyhedralSet& delta, const RatVec& eta)
{
    if (eta.size() != delta.k)
        fail(ErrorCode::dimension_error, "face_of", "point dimension mismatch");
    Face f;
    for (std::size_t j = 0; j < delta.constraints.size(); ++j) {
        Rational v = dot(delta.constraints[j].normal, eta);
        if (v < delta.constraints[j].offset)
            fail(ErrorCode::outside_polytope, "face_of", "point violates a constraint");
        if (v == delta.constraints[j].offset)
            f.active.push_back(j);
    }
    f.witness = eta;   // satisfies the actives exactly, the others strictly
    f.dim = face_dim(delta, f.active);
    return f;
}

Face face_of(const PolyhedralSet& delta, const std::vector<double>& eta)
{
    if (eta.size() != delta.k)
        fail(ErrorCode::dimension_error, "face_of", "point dimension mismatch");
    Face f;
    for (std::size_t j = 0; j < delta.constraints.size(); ++j) {
        double v = dot_d(delta.constraints[j].normal, eta);
        double c = delta.constraints[j].offset.to_double();
        double tol = 1e-10 * (1.0 + std::fabs(c));
        if (v < c - tol)
            fail(ErrorCode::outside_polytope, "face_of", "point violates a constraint");
        if (std::fabs(v - c) <= tol)
            f.active.push_back(j);
    }
    auto w = open_face_witness(delta, f.active);
    if (!w)
        fail(ErrorCode::outside_polytope, "face_of", "active pattern is not an open face");
    f.witness = *w;
    f.dim = face_dim(delta, f.active);
    return f;
}

std::vector<Face> enumerate_faces(const PolyhedralSet& delta)
{
    const std::size_t m = delta.constraints.size();
    if (m > 20)
        fail(ErrorCode::too_large, "enumerate_faces", "constraint count above desk scale");

    std::vector<Face> faces;
    long budget = 100000;

    // DFS over active subsets; a subset infeasible as an equality system
    // prunes all of its supersets.
    std::vector<std::size_t> current;
    auto eq_feasible = [&](const std::vector<std::size_t>& active) {
        std::vector<LinConstraint> sys;
        for (std::size_t j = 0; j < m; ++j) {
            LinConstraint lc;
            lc.a.resize(delta.k);
            for (std::size_t v = 0; v < delta.k; ++v)
                lc.a[v] = Rational(delta.constraints[j].normal[v]);
            lc.c = delta.constraints[j].offset;
            lc.rel = std::binary_search(active.begin(), active.end(), j) ? Rel::eq : Rel::ge;
            sys.push_back(std::move(lc));
        }
        return feasible_point(std::move(sys), delta.k).has_value();
    };

    std::function<void(std::size_t)> dfs = [&](std::size_t next) {
        if (--budget < 0)
            fail(ErrorCode::too_large, "enumerate_faces", "feasibility budget exceeded");
        if (auto w = open_face_witness(delta, current)) {
            Face f;
            f.active = current;
            f.witness = *w;
            f.dim = face_dim(delta, f.active);
            faces.push_back(std::move(f));
        }
        for (std::size_t j = next; j < m; ++j) {
            current.push_back(j);
            if (eq_feasible(current)) dfs(j + 1);
            current.pop_back();
        }
    };
    dfs(0);

    std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
        if (a.dim != b.dim) return a.dim > b.dim;
        return a.active < b.active;
    });
    return faces;
}

IsotropyAlgebra isotropy(const PolyhedralSet& delta, const Face& face)
{
    IntMat active_normals;
    for (std::size_t j : face.active)
        active_normals.push_back(delta.constraints[j].normal);
    IsotropyAlgebra out;
    out.basis = saturated_row_lattice(active_normals, delta.k);
    out.rank = out.basis.size();
    return out;
}

// --- torus cut problems ----------------------------------------------------

XFactor radial_factor(const RadialPotential& p, int orientation, double offset)
{
    if (orientation != 1 && orientation != -1)
        fail(ErrorCode::invalid_parameter, "radial_factor", "orientation must be ±1");
    XFactor f;
    f.kind = XFactor::Kind::radial;
    f.radial = p;
    f.profile = moment_profile(p);
    f.orientation = orientation;
    f.offset = offset;
    return f;
}

XFactor cstar_factor(double scale, int orientation, double offset)
{
    if (!(scale > 0.0))
        fail(ErrorCode::invalid_parameter, "cstar_factor", "scale must be positive");
    if (orientation != 1 && orientation != -1)
        fail(ErrorCode::invalid_parameter, "cstar_factor", "orientation must be ±1");
    XFactor f;
    f.kind = XFactor::Kind::cstar;
    f.cstar_scale = scale;
    f.orientation = orientation;
    f.offset = offset;
    return f;
}

PolyhedralSet delta_from_factors(const std::vector<XFactor>& factors)
{
    const std::size_t k = factors.size();
    std::vector<HalfSpace> constraints;
    for (std::size_t a = 0; a < k; ++a) {
        const XFactor& f = factors[a];
        if (f.kind == XFactor::Kind::cstar) continue;  // moment image is all of R
        HalfSpace h;
        h.normal.assign(k, 0);
        h.normal[a] = f.orientation;   // +1: eta_a >= offset; -1: eta_a <= offset
        h.offset = Rational::from_double(f.orientation * f.offset);
        constraints.push_back(std::move(h));
    }
    if (constraints.empty()) {
        // whole space: represent with a single always-redundant pair is not
        // possible in H-form; keep an empty constraint list
        PolyhedralSet delta;
        delta.k = k;
        delta.witness.assign(k, Rational(0));
        return delta;
    }
    return make_polyhedral_set(k, std::move(constraints));
}

TorusCutProblem make_torus_cut_problem(std::size_t k, ToricPotential m_potential,
                                       IntMat weight_matrix, PolyhedralSet delta,
                                       std::vector<XFactor> factors)
{
    if (weight_matrix.size() != k)
        fail(ErrorCode::dimension_error, "make_torus_cut_problem", "weight matrix needs k rows");
    const std::size_t n = m_potential.n;
    for (const IntVec& row : weight_matrix)
        if (row.size() != n)
            fail(ErrorCode::dimension_error, "make_torus_cut_problem", "weight row length != n");
    if (delta.k != k)
        fail(ErrorCode::dimension_error, "make_torus_cut_problem", "polytope dimension != k");
    if (!factors.empty() && factors.size() != k)
        fail(ErrorCode::dimension_error, "make_torus_cut_problem", "need one X factor per torus rank");
    TorusCutProblem p;
    p.k = k;
    p.n = n;
    p.m_potential = std::move(m_potential);
    p.weight_matrix = std::move(weight_matrix);
    p.delta = std::move(delta);
    p.factors = std::move(factors);
    return p;
}

std::vector<double> torus_moment(const TorusCutProblem& p, const ComplexPoint& m)
{
    if (m.dim() != p.n)
        fail(ErrorCode::dimension_error, "torus_moment", "point dimension mismatch");
    std::vector<double> t(p.n);
    for (std::size_t j = 0; j < p.n; ++j) t[j] = std::norm(m[j]);
    std::vector<double> g = p.m_potential.grad(t);
    std::vector<double> phi(p.k, 0.0);
    for (std::size_t a = 0; a < p.k; ++a)
        for (std::size_t j = 0; j < p.n; ++j)
            phi[a] += static_cast<double>(p.weight_matrix[a][j]) * t[j] * g[j];
    return phi;
}

std::vector<double> x_moment(const TorusCutProblem& p, const ComplexPoint& x)
{
    if (p.factors.empty())
        fail(ErrorCode::unsupported, "x_moment", "problem has no X model");
    if (x.dim() != p.k)
        fail(ErrorCode::dimension_error, "x_moment", "X point dimension mismatch");
    std::vector<double> psi(p.k);
    for (std::size_t a = 0; a < p.k; ++a) {
        const XFactor& f = p.factors[a];
        double u = std::norm(x[a]);
        double h;
        if (f.kind == XFactor::Kind::radial) {
            h = f.profile.H(u);
        } else {
            if (!(u > 0.0))
                fail(ErrorCode::domain_violation, "x_moment", "cstar factor at 0");
            h = f.cstar_scale * std::log(u);
        }
        psi[a] = f.offset + f.orientation * h;
    }
    return psi;
}

namespace {

// K_{jb} = <W_col_j, xi_b> restricted to the listed coordinates
IntMat pairing_matrix(const TorusCutProblem& p, const IntMat& xi,
                      const std::vector<std::size_t>& coords)
{
    IntMat K;
    for (std::size_t j : coords) {
        IntVec row(xi.size());
        for (std::size_t b = 0; b < xi.size(); ++b) {
            std::int64_t s = 0;
            for (std::size_t a = 0; a < p.k; ++a)
                s += p.weight_matrix[a][j] * xi[b][a];
            row[b] = s;
        }
        K.push_back(std::move(row));
    }
    return K;
}

IntMat transpose(const IntMat& m, std::size_t cols)
{
    IntMat t(cols, IntVec(m.size(), 0));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c)
            t[c][r] = m[r][c];
    return t;
}

} // namespace

StratumLabel stratum_label(const TorusCutProblem& p, const ComplexPoint& m, const ComplexPoint& m2)
{
    std::vector<double> phi1 = torus_moment(p, m);
    std::vector<double> phi2 = torus_moment(p, m2);
    Face face = face_of(p.delta, phi1);   // throws outside-polytope when needed
    (void)face_of(p.delta, phi2);

    for (std::size_t a = 0; a < p.k; ++a)
        if (std::fabs(phi1[a] - phi2[a]) >= 1e-8)
            return StratumLabel::distinct;

    const double tol = 1e-8;
    // moduli must agree coordinatewise
    for (std::size_t j = 0; j < p.n; ++j)
        if (std::fabs(std::abs(m[j]) - std::abs(m2[j])) >= tol)
            return StratumLabel::distinct;

    IsotropyAlgebra iso = isotropy(p.delta, face);
    std::vector<std::size_t> nonzero;
    for (std::size_t j = 0; j < p.n; ++j)
        if (std::abs(m[j]) > 1e-12) nonzero.push_back(j);

    if (iso.rank == 0) {
        // trivial G_E: equivalence is equality of points
        for (std::size_t j = 0; j < p.n; ++j)
            if (std::abs(m[j] - m2[j]) >= tol)
                return StratumLabel::distinct;
        return StratumLabel::equivalent;
    }

    if (nonzero.empty())
        return StratumLabel::equivalent;

    // phase condition: need s with K s ≡ alpha (mod 1); solvable iff every
    // integer kernel vector of K^T pairs integrally with alpha
    IntMat K = pairing_matrix(p, iso.basis, nonzero);
    std::vector<double> alpha;
    alpha.reserve(nonzero.size());
    for (std::size_t j : nonzero)
        alpha.push_back(std::arg(m2[j] / m[j]) / kTwoPi);

    IntMat kernel = integer_kernel(transpose(K, iso.rank), nonzero.size());
    for (const IntVec& v : kernel) {
        double s = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i)
            s += static_cast<double>(v[i]) * alpha[i];
        if (std::fabs(s - std::round(s)) >= 1e-8)
            return StratumLabel::distinct;
    }
    return StratumLabel::equivalent;
}

SmoothnessVerdict smoothness_check(const TorusCutProblem& p, const ComplexPoint& m)
{
    std::vector<double> phi = torus_moment(p, m);
    Face face = face_of(p.delta, phi);
    IsotropyAlgebra iso = isotropy(p.delta, face);

    SmoothnessVerdict v;
    if (iso.rank == 0) return v;   // G_E trivial acts freely

    std::vector<std::size_t> nonzero;
    for (std::size_t j = 0; j < p.n; ++j)
        if (std::abs(m[j]) > 1e-12) nonzero.push_back(j);

    IntMat K = pairing_matrix(p, iso.basis, nonzero);

    // continuous part: G_E ∩ G_m infinite iff K drops column rank
    RatMat kq;
    for (const IntVec& row : K) {
        RatVec r(iso.rank);
        for (std::size_t b = 0; b < iso.rank; ++b) r[b] = Rational(row[b]);
        kq.push_back(std::move(r));
    }
    if (rank_rational(kq) < iso.rank) {
        v.smooth = false;
        v.witness_order = 0;   // positive-dimensional stabilizer
        return v;
    }

    // finite part: order of {s : K s ∈ Z^J} / Z^r = product of invariant factors
    IntVec d = smith_invariant_factors(K);
    std::int64_t order = 1;
    for (std::int64_t x : d) order *= x;
    if (order != 1) {
        v.smooth = false;
        v.witness_order = order;
    }
    return v;
}

KempfNessResult kempf_ness_solve(const TorusCutProblem& p, const ComplexPoint& m,
                                 const ComplexPoint& x, int budget)
{
    if (p.factors.empty())
        fail(ErrorCode::unsupported, "kempf_ness_solve", "problem has no X model");
    if (m.dim() != p.n || x.dim() != p.k)
        fail(ErrorCode::dimension_error, "kempf_ness_solve", "point dimensions mismatch");
    for (const XFactor& f : p.factors) {
        if (f.orientation != -1)
            fail(ErrorCode::unsupported, "kempf_ness_solve",
                 "monotone solve needs cut-from-above factors (orientation -1)");
    }
    std::vector<double> t0(p.n), u0(p.k);
    for (std::size_t j = 0; j < p.n; ++j) t0[j] = std::norm(m[j]);
    for (std::size_t a = 0; a < p.k; ++a) {
        u0[a] = std::norm(x[a]);
        if (p.factors[a].kind == XFactor::Kind::cstar && !(u0[a] > 0.0))
            fail(ErrorCode::domain_violation, "kempf_ness_solve", "cstar factor at 0");
    }

    // exponents clamped so runaway unstable directions stay finite and the
    // stall rule can classify them
    auto safe_exp = [](double e) { return std::exp(std::min(std::max(e, -700.0), 700.0)); };
    auto flowed_t = [&](const std::vector<double>& s) {
        std::vector<double> t(p.n);
        for (std::size_t j = 0; j < p.n; ++j) {
            double e = 0.0;
            for (std::size_t a = 0; a < p.k; ++a)
                e += static_cast<double>(p.weight_matrix[a][j]) * s[a];
            t[j] = t0[j] * safe_exp(2.0 * e);
        }
        return t;
    };

    // residual R_a = phi_a(flow) - offset_a + H_a(e^{2 s_a} u_a)
    auto residual = [&](const std::vector<double>& s, std::vector<double>& r) {
        std::vector<double> t = flowed_t(s);
        std::vector<double> g = p.m_potential.grad(t);
        for (std::size_t a = 0; a < p.k; ++a) {
            double phi = 0.0;
            for (std::size_t j = 0; j < p.n; ++j)
                phi += static_cast<double>(p.weight_matrix[a][j]) * t[j] * g[j];
            const XFactor& f = p.factors[a];
            double ua = u0[a] * safe_exp(2.0 * s[a]);
            double h = (f.kind == XFactor::Kind::radial)
                           ? f.profile.H(ua)
                           : f.cstar_scale * (std::log(u0[a]) + 2.0 * s[a]);
            r[a] = phi - f.offset + h;
        }
    };

    // Kempf–Ness objective: gradient is the residual; convex along the flow
    auto objective = [&](const std::vector<double>& s) {
        std::vector<double> t = flowed_t(s);
        double val = 0.5 * p.m_potential.rho(t);
        for (std::size_t a = 0; a < p.k; ++a) {
            const XFactor& f = p.factors[a];
            double ua = u0[a] * safe_exp(2.0 * s[a]);
            if (f.kind == XFactor::Kind::radial)
                val += 0.5 * f.radial.F(ua);
            else
                val += f.cstar_scale * (s[a] * std::log(u0[a]) + s[a] * s[a]);
            val -= f.offset * s[a];
        }
        return val;
    };

    auto jacobian = [&](const std::vector<double>& s, std::vector<double>& jac) {
        std::vector<double> t = flowed_t(s);
        std::vector<double> g = p.m_potential.grad(t);
        std::vector<double> h;
        if (p.m_potential.hess) h = p.m_potential.hess(t);
        for (std::size_t a = 0; a < p.k; ++a) {
            for (std::size_t b = 0; b < p.k; ++b) {
                double m1 = 0.0;
                for (std::size_t j = 0; j < p.n; ++j)
                    m1 += static_cast<double>(p.weight_matrix[a][j]) *
                          static_cast<double>(p.weight_matrix[b][j]) * t[j] * g[j];
                double m2v = 0.0;
                if (!h.empty()) {
                    for (std::size_t j = 0; j < p.n; ++j)
                        for (std::size_t l = 0; l < p.n; ++l)
                            m2v += static_cast<double>(p.weight_matrix[a][j]) * t[j] *
                                   h[j * p.n + l] * t[l] *
                                   static_cast<double>(p.weight_matrix[b][l]);
                }
                jac[a * p.k + b] = 2.0 * (m1 + m2v);
            }
            const XFactor& f = p.factors[a];
            double ua = u0[a] * safe_exp(2.0 * s[a]);
            double xpart = (f.kind == XFactor::Kind::radial) ? 2.0 * ua * f.profile.H1(ua)
                                                             : 2.0 * f.cstar_scale;
            jac[a * p.k + a] += xpart;
        }
    };

    // numerical Jacobian fallback when the toric Hessian is absent
    auto jacobian_fd = [&](const std::vector<double>& s, std::vector<double>& jac) {
        const double h = 1e-6;
        std::vector<double> rp(p.k), rm(p.k), sp(s);
        for (std::size_t b = 0; b < p.k; ++b) {
            sp[b] = s[b] + h;
            residual(sp, rp);
            sp[b] = s[b] - h;
            residual(sp, rm);
            sp[b] = s[b];
            for (std::size_t a = 0; a < p.k; ++a)
                jac[a * p.k + b] = (rp[a] - rm[a]) / (2.0 * h);
        }
    };

    const bool analytic = static_cast<bool>(p.m_potential.hess);
    std::vector<double> s(p.k, 0.0), r(p.k), jac(p.k * p.k), step(p.k);
    residual(s, r);
    double rnorm = 0.0;
    for (double v : r) rnorm = std::max(rnorm, std::fabs(v));

    KempfNessResult out;
    const double tol = 1e-11;
    for (int iter = 0; iter < budget; ++iter) {
        if (rnorm <= tol) {
            out.stable = true;
            out.t = s;
            out.residual = rnorm;
            out.iterations = iter;
            return out;
        }
        if (analytic) jacobian(s, jac); else jacobian_fd(s, jac);

        // solve J step = -r by Gaussian elimination with a tiny ridge
        std::vector<double> a(jac);
        for (std::size_t i = 0; i < p.k; ++i) a[i * p.k + i] += 1e-14 * (1.0 + std::fabs(a[i * p.k + i]));
        std::vector<double> b(p.k);
        for (std::size_t i = 0; i < p.k; ++i) b[i] = -r[i];
        for (std::size_t col = 0; col < p.k; ++col) {
            std::size_t piv = col;
            for (std::size_t row = col + 1; row < p.k; ++row)
                if (std::fabs(a[row * p.k + col]) > std::fabs(a[piv * p.k + col])) piv = row;
            for (std::size_t c2 = 0; c2 < p.k; ++c2) std::swap(a[col * p.k + c2], a[piv * p.k + c2]);
            std::swap(b[col], b[piv]);
            double d = a[col * p.k + col];
            if (d == 0.0)
                fail(ErrorCode::numeric_failure, "kempf_ness_solve", "singular Newton system");
            for (std::size_t row = 0; row < p.k; ++row) {
                if (row == col) continue;
                double f = a[row * p.k + col] / d;
                if (f == 0.0) continue;
                for (std::size_t c2 = col; c2 < p.k; ++c2)
                    a[row * p.k + c2] -= f * a[col * p.k + c2];
                b[row] -= f * b[col];
            }
        }
        for (std::size_t i = 0; i < p.k; ++i) step[i] = b[i] / a[i * p.k + i];

        // Armijo on the convex objective; once the residual is small the
        // full Newton step is locally convergent and the objective can no
        // longer resolve the decrease, so take it as is
        std::vector<double> trial(p.k);
        if (rnorm < 1e-6) {
            for (std::size_t i = 0; i < p.k; ++i) trial[i] = s[i] + step[i];
        } else {
            double slope = 0.0;
            for (std::size_t i = 0; i < p.k; ++i) slope += r[i] * step[i];
            double f0 = objective(s);
            double alpha = 1.0;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t i = 0; i < p.k; ++i) trial[i] = s[i] + alpha * step[i];
                if (objective(trial) <= f0 + 1e-4 * alpha * slope) break;
                alpha *= 0.5;
            }
        }
        double prev = rnorm;
        s = trial;
        residual(s, r);
        rnorm = 0.0;
        for (double v : r) rnorm = std::max(rnorm, std::fabs(v));

        // stall rule: residual stuck above 1e-8 while the iterate runs away
        double snorm = 0.0;
        for (double v : s) snorm = std::max(snorm, std::fabs(v));
        double progress = (prev > 0.0) ? (prev - rnorm) / prev : 1.0;
        if (rnorm > 1e-8 && snorm > 1e3 && progress < 1e-3) {
            out.stable = false;
            out.residual = rnorm;
            out.iterations = iter + 1;
            return out;
        }
    }
    if (rnorm <= tol) {
        out.stable = true;
        out.t = s;
        out.residual = rnorm;
        out.iterations = budget;
        return out;
    }
    fail(ErrorCode::inconclusive, "kempf_ness_solve",
         "budget exhausted without stall classification");
}

} // namespace kcut
