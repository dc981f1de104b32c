#include "kcut/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kcut/rootfind.hpp"

namespace kcut {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> t_of(const ComplexPoint& z)
{
    std::vector<double> t(z.dim());
    for (std::size_t j = 0; j < z.dim(); ++j) t[j] = std::norm(z[j]);
    return t;
}

// e^{s}·m under the weighted real flow: z_j ↦ e^{w_j s} z_j.
ComplexPoint scale_point(const ComplexPoint& m, const std::vector<int>& weights, double s)
{
    ComplexPoint out = m;
    for (std::size_t j = 0; j < m.dim(); ++j)
        out[j] *= std::exp(weights[j] * s);
    return out;
}

void require_dim(const CutProblem& p, const ComplexPoint& z, const char* op)
{
    if (z.dim() != p.weights.size())
        fail(ErrorCode::dimension_error, op, "point dimension does not match the weight list");
}

// t_j = r_j u^{w_j} with the 0·∞ guard on vanishing coordinates.
std::vector<double> t_on_section(const std::vector<double>& r, const std::vector<int>& weights, double u)
{
    std::vector<double> t(r.size());
    for (std::size_t j = 0; j < r.size(); ++j)
        t[j] = (r[j] == 0.0) ? 0.0 : r[j] * std::pow(u, weights[j]);
    return t;
}

double psi_at(const CutProblem& p, const std::vector<double>& t, double u)
{
    std::vector<double> g = p.m_potential.grad(t);
    double phi = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) phi += p.weights[j] * t[j] * g[j];
    return phi + p.profile.H(u);
}

} // namespace

ToricPotential toric_flat(std::size_t n)
{
    ToricPotential p;
    p.n = n;
    p.rho = [](const std::vector<double>& t) {
        double s = 0.0;
        for (double v : t) s += v;
        return s;
    };
    p.grad = [n](const std::vector<double>&) { return std::vector<double>(n, 1.0); };
    p.hess = [n](const std::vector<double>&) { return std::vector<double>(n * n, 0.0); };
    return p;
}

ToricPotential toric_fs(std::size_t n, double scale)
{
    ToricPotential p;
    p.n = n;
    p.rho = [scale](const std::vector<double>& t) {
        double s = 0.0;
        for (double v : t) s += v;
        return scale * std::log1p(s);
    };
    p.grad = [n, scale](const std::vector<double>& t) {
        double s = 0.0;
        for (double v : t) s += v;
        return std::vector<double>(n, scale / (1.0 + s));
    };
    p.hess = [n, scale](const std::vector<double>& t) {
        double s = 0.0;
        for (double v : t) s += v;
        double h = -scale / ((1.0 + s) * (1.0 + s));
        return std::vector<double>(n * n, h);
    };
    return p;
}

double moment_map(const CutProblem& p, const ComplexPoint& z)
{
    require_dim(p, z, "moment_map");
    std::vector<double> t = t_of(z);
    std::vector<double> g = p.m_potential.grad(t);
    double phi = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) phi += p.weights[j] * t[j] * g[j];
    return phi;
}

PotentialField ambient_m_field(const CutProblem& p)
{
    const ToricPotential pot = p.m_potential;
    PotentialField f;
    f.eval = [pot](const ComplexPoint& z) { return pot.rho(t_of(z)); };
    return f;
}

OneOneForm ambient_m_metric(const CutProblem& p, const ComplexPoint& z)
{
    const std::size_t n = z.dim();
    if (!p.m_potential.hess)
        return ddbar(ambient_m_field(p), z);
    std::vector<double> t = t_of(z);
    std::vector<double> g = p.m_potential.grad(t);
    std::vector<double> h = p.m_potential.hess(t);
    OneOneForm a = OneOneForm::zero(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            Complex v = std::conj(z[j]) * z[k] * h[j * n + k];
            if (j == k) v += g[j];
            a.at(j, k) = v;
        }
    }
    return a;
}

CutProblem make_cut_problem(ToricPotential pot, std::vector<int> weights, double level,
                            const RadialPotential& radial,
                            const std::vector<ComplexPoint>& probes,
                            std::optional<double> einstein_kappa,
                            std::optional<double> structure_c)
{
    if (weights.size() != pot.n)
        fail(ErrorCode::dimension_error, "make_cut_problem", "weight count must equal chart dimension");
    CutProblem p;
    p.m_potential = std::move(pot);
    p.weights = std::move(weights);
    p.level = level;
    p.radial = radial;
    p.profile = moment_profile(radial);
    p.einstein_kappa = einstein_kappa;
    p.structure_c = structure_c;

    std::mt19937_64 rng(0x6b637574);  // fixed seed: validation must be deterministic
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    PotentialField mf = ambient_m_field(p);
    for (const ComplexPoint& m : probes) {
        require_dim(p, m, "make_cut_problem");
        // S¹-invariance spot check at random angles
        double base = mf.eval(m);
        for (int rep = 0; rep < 4; ++rep) {
            double theta = angle(rng);
            ComplexPoint rot = m;
            for (std::size_t j = 0; j < m.dim(); ++j)
                rot[j] *= std::polar(1.0, p.weights[j] * theta);
            if (std::fabs(mf.eval(rot) - base) > 1e-8 * (1.0 + std::fabs(base)))
                fail(ErrorCode::invalid_parameter, "make_cut_problem",
                     "potential is not invariant under the declared weights");
        }
        // metric check
        if (positivity_check(ambient_m_metric(p, m)) != Positivity::positive)
            fail(ErrorCode::regularity_violation, "make_cut_problem",
                 "ambient potential is not positive definite at a probe point");
        // level regularity along the orbit through the section
        double phi = moment_map(p, m);
        if (phi <= level && level - phi < p.profile.cap_a) {
            double u0 = (phi == level) ? 0.0 : invert_moment(p.profile, level - phi);
            const double h = 1e-4;
            auto psi_s = [&](double s) {
                ComplexPoint ms = scale_point(m, p.weights, s);
                return moment_map(p, ms) + p.profile.H(u0 * std::exp(2.0 * s));
            };
            double slope = (psi_s(h) - psi_s(-h)) / (2.0 * h);
            if (!(slope > 1e-8))
                fail(ErrorCode::regularity_violation, "make_cut_problem",
                     "level appears critical near a probe point");
        }
    }
    return p;
}

SectionPoint section_sigma(const CutProblem& p, const ComplexPoint& m)
{
    require_dim(p, m, "section_sigma");
    double phi = moment_map(p, m);
    if (phi > p.level || !(p.level - phi < p.profile.cap_a))
        fail(ErrorCode::outside_cut_region, "section_sigma",
             "phi(m) outside (lambda - a, lambda]");
    double s = p.level - phi;
    double t = (s == 0.0) ? 0.0 : invert_moment(p.profile, s);
    return SectionPoint{m, std::sqrt(t)};
}

double orbit_crossing(const CutProblem& p, const ComplexPoint& m)
{
    require_dim(p, m, "orbit_crossing");
    auto crossing = [&](double t) {
        return moment_map(p, scale_point(m, p.weights, t)) + p.profile.H(std::exp(2.0 * t));
    };
    auto bracket = grow_bracket(crossing, p.level, 0.0, 1.0, 60.0, 64);
    if (!bracket)
        fail(ErrorCode::not_semistable, "orbit_crossing",
             "orbit never crosses the level within the flow budget");
    RootOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    return solve_increasing_bracketed(crossing, p.level, bracket->first, bracket->second,
                                      opt, "orbit_crossing");
}

ComplexPoint map_g(const CutProblem& p, const ComplexPoint& q)
{
    require_dim(p, q, "map_g");
    if (p.radial.kind != RadialKind::quadratic)
        fail(ErrorCode::unsupported, "map_g", "defined for the quadratic radial potential");
    double phi = moment_map(p, q);
    if (!(phi < p.level))
        fail(ErrorCode::outside_cut_region, "map_g", "phi(q) >= lambda");
    double kappa = -0.5 * std::log((p.level - phi) / p.radial.a0);
    return scale_point(q, p.weights, kappa);
}

ComplexPoint map_g_orbit_path(const CutProblem& p, const ComplexPoint& q)
{
    require_dim(p, q, "map_g");
    if (p.radial.kind != RadialKind::quadratic)
        fail(ErrorCode::unsupported, "map_g", "defined for the quadratic radial potential");
    double phi = moment_map(p, q);
    if (!(phi < p.level))
        fail(ErrorCode::outside_cut_region, "map_g", "phi(q) >= lambda");
    // Solve T(s) = t1(e^s·q) + s = 0: the image point e^s·q is the one whose
    // orbit crossing lands back on q.  T is strictly increasing in s.
    auto T = [&](double s) {
        return orbit_crossing(p, scale_point(q, p.weights, s)) + s;
    };
    auto bracket = grow_bracket(T, 0.0, 0.0, 1.0, 60.0, 64);
    if (!bracket)
        fail(ErrorCode::no_convergence, "map_g", "orbit-path bracket not found");
    RootOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;
    double s = solve_increasing_bracketed(T, 0.0, bracket->first, bracket->second, opt, "map_g");
    return scale_point(q, p.weights, s);
}

CutChart make_chart(const CutProblem& p)
{
    bool has_pos = false, has_neg = false;
    for (int w : p.weights) {
        if (w > 0) has_pos = true;
        if (w < 0) has_neg = true;
    }
    if (has_pos && has_neg)
        fail(ErrorCode::unsupported, "make_chart",
             "mixed weight signs have no supported invariant chart");

    CutChart chart;
    chart.pattern = has_neg ? WeightPattern::nonpositive : WeightPattern::nonnegative;
    auto shared = std::make_shared<const CutProblem>(p);
    chart.problem = shared;

    chart.w_solver = [shared](const ComplexPoint& zeta) {
        const CutProblem& pr = *shared;
        if (zeta.dim() != pr.weights.size())
            fail(ErrorCode::dimension_error, "w_solver", "bad chart point dimension");
        std::vector<double> r = t_of(zeta);
        auto psi_log = [&](double x) {
            double u = std::exp(x);
            return psi_at(pr, t_on_section(r, pr.weights, u), u);
        };
        auto bracket = grow_bracket(psi_log, pr.level, 0.0, 1.0, 60.0, 64);
        if (!bracket)
            fail(ErrorCode::level_solve_failure, "w_solver",
                 "level equation has no solution above this chart point");
        RootOptions opt;
        opt.abs_tol = 1e-13;
        opt.rel_tol = 1e-13;
        opt.polish_steps = 4;
        double x = solve_increasing_bracketed(psi_log, pr.level, bracket->first, bracket->second,
                                              opt, "w_solver");
        return std::exp(x);
    };
    auto solver = chart.w_solver;
    chart.domain = [solver](const ComplexPoint& zeta) {
        try {
            (void)solver(zeta);
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    return chart;
}

double reduced_potential(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta)
{
    double u = chart.w_solver(zeta);
    std::vector<double> t = t_on_section(t_of(zeta), p.weights, u);
    return p.m_potential.rho(t) + p.radial.F(u) - p.level * std::log(u);
}

PotentialField reduced_potential_field(const CutProblem& p, const CutChart& chart)
{
    const CutProblem pr = p;
    const CutChart ch = chart;
    PotentialField f;
    f.eval = [pr, ch](const ComplexPoint& zeta) { return reduced_potential(pr, ch, zeta); };
    f.domain = ch.domain;
    return f;
}

OneOneForm reduced_form(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta)
{
    OneOneForm w = ddbar(reduced_potential_field(p, chart), zeta);
    if (positivity_check(w) != Positivity::positive)
        fail(ErrorCode::regularity_violation, "reduced_form",
             "reduced form is not positive definite here");
    return w;
}

namespace {

// |V|² of the circle generator at the level point above ζ, in the ambient
// metric: Σ a_{jk̄} w_j w_k z_j z̄_k + u·H'(u).
double generator_norm_sq(const CutProblem& p, const ComplexPoint& z, double u)
{
    OneOneForm a = ambient_m_metric(p, z);
    std::vector<Complex> v(z.dim());
    for (std::size_t j = 0; j < z.dim(); ++j)
        v[j] = Complex(0.0, 1.0) * static_cast<double>(p.weights[j]) * z[j];
    Complex s(0.0, 0.0);
    for (std::size_t j = 0; j < z.dim(); ++j)
        for (std::size_t k = 0; k < z.dim(); ++k)
            s += a.at(j, k) * v[j] * std::conj(v[k]);
    return s.real() + u * p.profile.H1(u);
}

ComplexPoint section_z(const CutChart& chart, const ComplexPoint& zeta, double u)
{
    const CutProblem& p = *chart.problem;
    ComplexPoint z = zeta;
    for (std::size_t j = 0; j < zeta.dim(); ++j)
        z[j] = zeta[j] * std::pow(u, 0.5 * p.weights[j]);
    return z;
}

} // namespace

double v_eff(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta)
{
    double u = chart.w_solver(zeta);
    ComplexPoint z = section_z(chart, zeta, u);
    double nsq = generator_norm_sq(p, z, u);
    if (!(nsq > 0.0))
        fail(ErrorCode::numeric_failure, "v_eff", "generator norm not positive");

    // the norm must be constant along the fiber
    double lo = nsq, hi = nsq;
    for (int k = 1; k < 4; ++k) {
        double theta = 0.25 * kTwoPi * k;
        ComplexPoint rot = z;
        for (std::size_t j = 0; j < z.dim(); ++j)
            rot[j] *= std::polar(1.0, p.weights[j] * theta);
        double v = generator_norm_sq(p, rot, u);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo > 1e-8 * (1.0 + hi))
        fail(ErrorCode::numeric_failure, "v_eff", "fiber norm spread above tolerance");
    return kTwoPi * std::sqrt(nsq);
}

OneOneForm bundle_curvature(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta)
{
    require_dim(p, zeta, "bundle_curvature");
    double u = chart.w_solver(zeta);
    if (!(u > 0.0))
        fail(ErrorCode::domain_violation, "bundle_curvature", "w = 0 locus");
    const CutChart ch = chart;
    PotentialField logw;
    logw.eval = [ch](const ComplexPoint& z) { return std::log(ch.w_solver(z)); };
    logw.domain = ch.domain;
    return ddbar(logw, zeta);
}

double einstein_residual(const CutProblem& p, const CutChart& chart, const ComplexPoint& zeta)
{
    if (!p.einstein_kappa || !p.structure_c)
        fail(ErrorCode::misconfigured, "einstein_residual", "kappa and c must be set");
    const double kappa = *p.einstein_kappa;
    const double c = *p.structure_c;

    // the identity involves fourth derivatives of the reduced potential;
    // near the blow-up scale its truncation error dominates, so the nested
    // differencing runs at a smaller outer step than the ricci_form default
    DiffOptions opt;
    opt.ricci_outer_step = 2e-2;

    PotentialField rho = reduced_potential_field(p, chart);
    OneOneForm omega = ddbar(rho, zeta, 0.0, opt);
    OneOneForm ric = ricci_form(rho, zeta, 0.0, opt);
    OneOneForm mu = bundle_curvature(p, chart, zeta);

    const CutProblem pr = p;
    const CutChart ch = chart;
    PotentialField logv;
    logv.eval = [pr, ch](const ComplexPoint& z) { return std::log(v_eff(pr, ch, z)); };
    logv.domain = ch.domain;
    OneOneForm dlogv = ddbar(logv, zeta, 0.0, opt);

    const std::size_t n = zeta.dim();
    OneOneForm lhs = OneOneForm::zero(n), rhs = OneOneForm::zero(n);
    for (std::size_t i = 0; i < n * n; ++i) {
        lhs.coeffs[i] = ric.coeffs[i] - 2.0 * dlogv.coeffs[i] + c * mu.coeffs[i];
        rhs.coeffs[i] = kappa * (omega.coeffs[i] + p.level * mu.coeffs[i]);
    }
    return form_distance(lhs, rhs);
}

StructureConstant structure_constant(const CutProblem& p,
                                     const std::vector<std::pair<ComplexPoint, Complex>>& sample,
                                     int w_weight)
{
    if (!p.einstein_kappa)
        fail(ErrorCode::misconfigured, "structure_constant", "kappa must be set");
    if (sample.empty())
        fail(ErrorCode::invalid_parameter, "structure_constant", "empty sample");
    const double kappa = *p.einstein_kappa;

    int weight_sum = w_weight;
    for (int w : p.weights) weight_sum += w;

    auto log_det_ambient = [&](const ComplexPoint& z, Complex w) {
        OneOneForm a = ambient_m_metric(p, z);
        double mlog = log_det_positive(a, "structure_constant");
        double u = std::norm(w);
        double hw = p.profile.H1(u);
        if (!(hw > 0.0))
            fail(ErrorCode::regularity_violation, "structure_constant",
                 "radial factor metric degenerate on the sample");
        return mlog + std::log(hw);
    };

    double cmin = 0.0, cmax = 0.0, csum = 0.0;
    bool first = true;
    for (const auto& [z, w] : sample) {
        require_dim(p, z, "structure_constant");
        double psi = moment_map(p, z) + p.profile.H(std::norm(w));
        // d/ds log det g along the weighted flow, Richardson pair
        auto along = [&](double s) {
            ComplexPoint zs = scale_point(z, p.weights, s);
            Complex ws = w * std::exp(w_weight * s);
            return log_det_ambient(zs, ws);
        };
        const double h = 1e-2;
        double d_h = (along(h) - along(-h)) / (2.0 * h);
        double d_h2 = (along(0.5 * h) - along(-0.5 * h)) / h;
        double dlog = (4.0 * d_h2 - d_h) / 3.0;
        double divz = weight_sum + 0.5 * dlog;
        double ci = kappa * psi + divz;
        csum += ci;
        cmin = first ? ci : std::min(cmin, ci);
        cmax = first ? ci : std::max(cmax, ci);
        first = false;
    }
    StructureConstant out;
    out.c = csum / static_cast<double>(sample.size());
    out.spread = cmax - cmin;
    if (out.spread >= 1e-4)
        fail(ErrorCode::not_einstein_ambient, "structure_constant",
             "structure constant spread " + std::to_string(out.spread) + " exceeds 1e-4");
    return out;
}

// --- closed-form examples -------------------------------------------------

ExampleName example_from_string(const std::string& s)
{
    if (s == "euclidean_cut") return ExampleName::euclidean_cut;
    if (s == "euclidean_blowup") return ExampleName::euclidean_blowup;
    if (s == "fs_blowup") return ExampleName::fs_blowup;
    fail(ErrorCode::invalid_parameter, "closed_form_example", "unknown example '" + s + "'");
}

double example_u(ExampleName name, const ExampleParams& par, double r)
{
    const double lam = par.lambda;
    switch (name) {
        case ExampleName::euclidean_cut:
            if (!(lam > 0.0))
                fail(ErrorCode::invalid_level, "closed_form_example", "euclidean_cut needs lambda > 0");
            return lam / (1.0 + r);
        case ExampleName::euclidean_blowup: {
            double s = std::sqrt(lam * lam + 4.0 * r);
            return 0.5 * (lam + s);
        }
        case ExampleName::fs_blowup: {
            const double n = static_cast<double>(par.n);
            if (!(lam > -n - 1.0 && lam < 2.0))
                fail(ErrorCode::invalid_level, "closed_form_example",
                     "fs_blowup needs lambda in (-n-1, 2)");
            double a = lam + (lam + n - 1.0) * r;
            double b = 4.0 * (2.0 - lam) * (lam + n + 1.0) * r;
            return (a + std::sqrt(a * a + b)) / (2.0 * (2.0 - lam));
        }
    }
    fail(ErrorCode::invalid_parameter, "closed_form_example", "bad example");
}

double example_rho(ExampleName name, const ExampleParams& par, double r)
{
    const double lam = par.lambda;
    switch (name) {
        case ExampleName::euclidean_cut:
            (void)example_u(name, par, r);
            return lam * std::log1p(r);
        case ExampleName::euclidean_blowup: {
            double s = std::sqrt(lam * lam + 4.0 * r);
            if (lam < 0.0 && r == 0.0)
                fail(ErrorCode::domain_violation, "closed_form_example",
                     "blow-up chart excludes zeta = 0");
            if (lam == 0.0) return 2.0 * std::sqrt(r);  // rho_0 = 2|zeta|
            return s - lam * std::log(lam + s);
        }
        case ExampleName::fs_blowup: {
            const double n = static_cast<double>(par.n);
            double u = example_u(name, par, r);
            if (r == 0.0 && lam <= 0.0)
                fail(ErrorCode::domain_violation, "closed_form_example",
                     "blow-up chart excludes zeta = 0");
            return (n + 1.0) * std::log1p(r / u) + 2.0 * std::log1p(u) - lam * std::log(u);
        }
    }
    fail(ErrorCode::invalid_parameter, "closed_form_example", "bad example");
}

double example_v_eff(ExampleName name, const ExampleParams& par, double r)
{
    const double lam = par.lambda;
    switch (name) {
        case ExampleName::euclidean_cut:
            (void)example_u(name, par, r);
            return kTwoPi * std::sqrt(lam);
        case ExampleName::euclidean_blowup:
            return kTwoPi * std::pow(lam * lam + 4.0 * r, 0.25);
        case ExampleName::fs_blowup: {
            const double n = static_cast<double>(par.n);
            double u = example_u(name, par, r);
            double bigT = r / u;
            double m_part = (n + 1.0) * bigT / ((1.0 + bigT) * (1.0 + bigT));
            double w_part = 2.0 * u / ((1.0 + u) * (1.0 + u));
            return kTwoPi * std::sqrt(m_part + w_part);
        }
    }
    fail(ErrorCode::invalid_parameter, "closed_form_example", "bad example");
}

ClosedFormValues closed_form_example(ExampleName name, const ExampleParams& par,
                                     const ComplexPoint& zeta)
{
    double r = 0.0;
    for (const Complex& c : zeta.coords) r += std::norm(c);

    ClosedFormValues out;
    out.u = example_u(name, par, r);
    out.rho_lambda = example_rho(name, par, r);
    out.v_eff = example_v_eff(name, par, r);
    out.singular = (name != ExampleName::euclidean_cut) && (par.lambda == 0.0);

    switch (name) {
        case ExampleName::euclidean_cut:    out.c = static_cast<double>(par.n) + 1.0; break;
        case ExampleName::euclidean_blowup: out.c = -static_cast<double>(par.n) + 1.0; break;
        case ExampleName::fs_blowup:        out.c = -static_cast<double>(par.n) + 1.0; break;
    }

    PotentialField rho_field;
    rho_field.eval = [name, par](const ComplexPoint& z) {
        double rr = 0.0;
        for (const Complex& c : z.coords) rr += std::norm(c);
        return example_rho(name, par, rr);
    };
    PotentialField logu_field;
    logu_field.eval = [name, par](const ComplexPoint& z) {
        double rr = 0.0;
        for (const Complex& c : z.coords) rr += std::norm(c);
        return std::log(example_u(name, par, rr));
    };

    bool curvature_ok = !(out.singular && r == 0.0);
    if (!curvature_ok)
        fail(ErrorCode::domain_violation, "closed_form_example",
             "singular level: no curvature at zeta = 0");
    out.omega_lambda = ddbar(rho_field, zeta);
    out.mu_L = ddbar(logu_field, zeta);
    return out;
}

std::pair<CutProblem, CutChart> example_problem(ExampleName name, const ExampleParams& par)
{
    const std::size_t n = par.n;
    const double lam = par.lambda;
    std::vector<ComplexPoint> probes;
    CutProblem p;
    switch (name) {
        case ExampleName::euclidean_cut: {
            if (!(lam > 0.0))
                fail(ErrorCode::invalid_level, "example_problem", "euclidean_cut needs lambda > 0");
            ComplexPoint m;
            m.coords.assign(n, Complex(0.5 * std::sqrt(lam / static_cast<double>(n)), 0.0));
            probes.push_back(m);
            p = make_cut_problem(toric_flat(n), std::vector<int>(n, 1), lam,
                                 make_quadratic(1.0), probes, 0.0,
                                 static_cast<double>(n) + 1.0);
            break;
        }
        case ExampleName::euclidean_blowup: {
            ComplexPoint m;
            double msq = (lam < 0.0 ? -lam : 0.0) + 0.5;
            m.coords.assign(n, Complex(std::sqrt(msq / static_cast<double>(n)), 0.0));
            probes.push_back(m);
            p = make_cut_problem(toric_flat(n), std::vector<int>(n, -1), lam,
                                 make_quadratic(1.0), probes, 0.0,
                                 -static_cast<double>(n) + 1.0);
            break;
        }
        case ExampleName::fs_blowup: {
            const double nn = static_cast<double>(n);
            if (!(lam > -nn - 1.0 && lam < 2.0))
                fail(ErrorCode::invalid_level, "example_problem", "fs_blowup needs lambda in (-n-1,2)");
            // pick a probe with phi in the valid window (max(lam-2,-n-1), min(lam,0))
            double lo = std::max(lam - 2.0, -nn - 0.9);
            double hi = std::min(lam, 0.0);
            if (!(lo < hi))
                fail(ErrorCode::invalid_level, "example_problem", "no probe window for this lambda");
            double phi_target = 0.5 * (lo + hi);
            double bigT = -phi_target / (nn + 1.0 + phi_target);
            ComplexPoint m;
            m.coords.assign(n, Complex(std::sqrt(bigT / nn), 0.0));
            probes.push_back(m);
            p = make_cut_problem(toric_fs(n, nn + 1.0), std::vector<int>(n, -1), lam,
                                 make_log_einstein(par.kappa), probes, par.kappa,
                                 -nn + 1.0);
            break;
        }
    }
    CutChart chart = make_chart(p);
    return {std::move(p), std::move(chart)};
}

double pullback_defect(const CutProblem& p, const CutChart& chart, const ComplexPoint& q)
{
    const std::size_t n = q.dim();
    // identification Lambda(q) = zeta(sigma(q))
    auto lambda_map = [&](const ComplexPoint& m) {
        SectionPoint sp = section_sigma(p, m);
        ComplexPoint zeta = m;
        for (std::size_t j = 0; j < n; ++j)
            zeta[j] = m[j] * std::pow(sp.w, -p.weights[j]);
        return zeta;
    };

    ComplexPoint zeta0 = lambda_map(q);
    OneOneForm omega_cut = reduced_form(p, chart, zeta0);
    OneOneForm omega_m = ambient_m_metric(p, q);

    // real Jacobian of Lambda by central differences
    double scale = 1.0;
    for (const Complex& c : q.coords) scale = std::max(scale, 1.0 + std::abs(c));
    const double delta = 1e-5 * scale;
    std::vector<std::vector<Complex>> jac(2 * n);
    for (std::size_t dir = 0; dir < 2 * n; ++dir) {
        ComplexPoint qp = q, qm = q;
        std::size_t j = dir / 2;
        Complex step = (dir % 2 == 0) ? Complex(delta, 0.0) : Complex(0.0, delta);
        qp[j] += step;
        qm[j] -= step;
        ComplexPoint zp = lambda_map(qp), zm = lambda_map(qm);
        jac[dir].resize(n);
        for (std::size_t k = 0; k < n; ++k)
            jac[dir][k] = (zp[k] - zm[k]) / (2.0 * delta);
    }

    // compare the two real 2-forms on the coordinate basis
    double defect = 0.0;
    for (std::size_t a = 0; a < 2 * n; ++a) {
        std::vector<Complex> ua(n, Complex(0.0, 0.0));
        ua[a / 2] = (a % 2 == 0) ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
        for (std::size_t b = a + 1; b < 2 * n; ++b) {
            std::vector<Complex> ub(n, Complex(0.0, 0.0));
            ub[b / 2] = (b % 2 == 0) ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
            double pulled = omega_cut.pair(jac[a], jac[b]);
            double ambient = omega_m.pair(ua, ub);
            defect = std::max(defect, std::fabs(pulled - ambient));
        }
    }
    return defect;
}

} // namespace kcut
