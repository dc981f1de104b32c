#include "kcut/hermitian.hpp"

#include <algorithm>
#include <cmath>

namespace kcut {

ComplexPoint make_point(std::initializer_list<Complex> cs)
{
    ComplexPoint p;
    p.coords.assign(cs);
    return p;
}

OneOneForm OneOneForm::zero(std::size_t n)
{
    OneOneForm a;
    a.n = n;
    a.coeffs.assign(n * n, Complex(0.0, 0.0));
    return a;
}

OneOneForm OneOneForm::identity(std::size_t n, double scale)
{
    OneOneForm a = zero(n);
    for (std::size_t j = 0; j < n; ++j) a.at(j, j) = scale;
    return a;
}

double OneOneForm::max_abs() const
{
    double m = 0.0;
    for (const Complex& c : coeffs) m = std::max(m, std::abs(c));
    return m;
}

double OneOneForm::hermitian_defect() const
{
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k)
            d = std::max(d, std::abs(at(j, k) - std::conj(at(k, j))));
    return d;
}

void OneOneForm::symmetrize()
{
    for (std::size_t j = 0; j < n; ++j) {
        at(j, j) = Complex(at(j, j).real(), 0.0);
        for (std::size_t k = j + 1; k < n; ++k) {
            Complex avg = 0.5 * (at(j, k) + std::conj(at(k, j)));
            at(j, k) = avg;
            at(k, j) = std::conj(avg);
        }
    }
}

void OneOneForm::require_hermitian(const char* op) const
{
    double scale = std::max(max_abs(), 1e-300);
    if (hermitian_defect() > 1e-10 * scale)
        fail(ErrorCode::malformed_form, op, "coefficient matrix is not Hermitian");
}

double OneOneForm::pair(const std::vector<Complex>& u, const std::vector<Complex>& v) const
{
    Complex b(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            b += at(j, k) * u[j] * std::conj(v[k]);
    return -2.0 * b.imag();
}

namespace {

double eval_checked(const PotentialField& f, const ComplexPoint& z, const char* op)
{
    if (!f.in_domain(z))
        fail(ErrorCode::domain_violation, op, "stencil point leaves the declared domain");
    double v = f.eval(z);
    if (!std::isfinite(v))
        fail(ErrorCode::numeric_failure, op, "non-finite potential evaluation");
    return v;
}

double point_scale(const ComplexPoint& z)
{
    double m = 0.0;
    for (const Complex& c : z.coords) m = std::max(m, std::abs(c));
    return 1.0 + m;
}

// One central-difference pass at step h.  Real directions are indexed
// 0..2n-1: direction 2j is Re z_j, direction 2j+1 is Im z_j.
OneOneForm ddbar_single(const PotentialField& f, const ComplexPoint& z, double h, const char* op)
{
    const std::size_t n = z.dim();
    auto shifted = [&](std::size_t dir, double step) {
        ComplexPoint p = z;
        std::size_t j = dir / 2;
        if (dir % 2 == 0) p[j] += step; else p[j] += Complex(0.0, step);
        return p;
    };
    auto shifted2 = [&](std::size_t d1, double s1, std::size_t d2, double s2) {
        ComplexPoint p = z;
        std::size_t j1 = d1 / 2, j2 = d2 / 2;
        if (d1 % 2 == 0) p[j1] += s1; else p[j1] += Complex(0.0, s1);
        if (d2 % 2 == 0) p[j2] += s2; else p[j2] += Complex(0.0, s2);
        return p;
    };

    const double f0 = eval_checked(f, z, op);

    // second derivative along one real direction
    auto d2_same = [&](std::size_t dir) {
        double fp = eval_checked(f, shifted(dir, h), op);
        double fm = eval_checked(f, shifted(dir, -h), op);
        return (fp - 2.0 * f0 + fm) / (h * h);
    };
    // mixed second derivative along two distinct real directions
    auto d2_mixed = [&](std::size_t d1, std::size_t d2) {
        double fpp = eval_checked(f, shifted2(d1, h, d2, h), op);
        double fpm = eval_checked(f, shifted2(d1, h, d2, -h), op);
        double fmp = eval_checked(f, shifted2(d1, -h, d2, h), op);
        double fmm = eval_checked(f, shifted2(d1, -h, d2, -h), op);
        return (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    };

    OneOneForm a = OneOneForm::zero(n);
    for (std::size_t j = 0; j < n; ++j) {
        // 4 ∂²/∂z_j∂z̄_j = ∂²/∂x_j² + ∂²/∂y_j²
        a.at(j, j) = 0.25 * (d2_same(2 * j) + d2_same(2 * j + 1));
        for (std::size_t k = j + 1; k < n; ++k) {
            // 4 ∂²/∂z_j∂z̄_k = (xx + yy) + i(xy - yx)
            double xx = d2_mixed(2 * j, 2 * k);
            double yy = d2_mixed(2 * j + 1, 2 * k + 1);
            double xy = d2_mixed(2 * j, 2 * k + 1);
            double yx = d2_mixed(2 * j + 1, 2 * k);
            a.at(j, k) = 0.25 * Complex(xx + yy, xy - yx);
            a.at(k, j) = std::conj(a.at(j, k));
        }
    }
    return a;
}

} // namespace

OneOneForm ddbar(const PotentialField& f, const ComplexPoint& z, double h, const DiffOptions& opt)
{
    if (z.dim() == 0)
        fail(ErrorCode::dimension_error, "ddbar", "empty point");
    if (h <= 0.0) h = opt.ddbar_step * point_scale(z);

    OneOneForm coarse = ddbar_single(f, z, h, "ddbar");
    OneOneForm fine = ddbar_single(f, z, 0.5 * h, "ddbar");
    OneOneForm out = OneOneForm::zero(z.dim());
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] = (4.0 * fine.coeffs[i] - coarse.coeffs[i]) / 3.0;
    out.symmetrize();
    return out;
}

OneOneForm ricci_form(const PotentialField& f, const ComplexPoint& z, double h, const DiffOptions& opt)
{
    // positivity precheck at the stencil center
    OneOneForm g0 = ddbar(f, z, 0.0, opt);
    if (positivity_check(g0) != Positivity::positive)
        fail(ErrorCode::not_kahler_here, "ricci_form",
             "metric is not positive definite at the evaluation point");

    PotentialField logdet;
    logdet.eval = [&f, &opt](const ComplexPoint& p) {
        double hin = opt.ricci_inner_step * point_scale(p);
        OneOneForm g = ddbar(f, p, hin, opt);
        return log_det_positive(g, "ricci_form");
    };
    logdet.domain = nullptr;

    if (h <= 0.0) h = opt.ricci_outer_step * point_scale(z);
    OneOneForm r = ddbar(logdet, z, h, opt);
    for (Complex& c : r.coeffs) c = -c;
    return r;
}

std::vector<double> hermitian_eigenvalues(const OneOneForm& a0)
{
    a0.require_hermitian("hermitian_eigenvalues");
    const std::size_t n = a0.n;
    if (n > 8)
        fail(ErrorCode::dimension_error, "hermitian_eigenvalues", "dimension capped at 8");

    OneOneForm a = a0;
    a.symmetrize();
    const double scale = std::max(a.max_abs(), 1e-300);

    // cyclic Jacobi with unitary plane rotations
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off = std::max(off, std::abs(a.at(p, q)));
        if (off <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                Complex apq = a.at(p, q);
                double mag = std::abs(apq);
                if (mag <= 1e-18 * scale) continue;
                Complex phase = apq / mag;
                double app = a.at(p, p).real();
                double aqq = a.at(q, q).real();
                double mu = (app - aqq) / (2.0 * mag);
                double t = (mu >= 0.0 ? 1.0 : -1.0) / (std::fabs(mu) + std::sqrt(mu * mu + 1.0));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                // columns: A <- A J with J_pp = c, J_pq = s*phase, J_qp = -s*conj(phase), J_qq = c
                for (std::size_t r = 0; r < n; ++r) {
                    Complex arp = a.at(r, p), arq = a.at(r, q);
                    a.at(r, p) = c * arp - s * std::conj(phase) * arq;
                    a.at(r, q) = s * phase * arp + c * arq;
                }
                // rows: A <- J^H A
                for (std::size_t r = 0; r < n; ++r) {
                    Complex apr = a.at(p, r), aqr = a.at(q, r);
                    a.at(p, r) = c * apr - s * phase * aqr;
                    a.at(q, r) = s * std::conj(phase) * apr + c * aqr;
                }
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t j = 0; j < n; ++j) eig[j] = a.at(j, j).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

Positivity positivity_check(const OneOneForm& a)
{
    a.require_hermitian("positivity_check");
    std::vector<double> eig = hermitian_eigenvalues(a);
    double tau = 1e-10 * a.max_abs();
    double mn = eig.front();
    if (mn > tau) return Positivity::positive;
    if (mn < -tau) return Positivity::indefinite;
    return Positivity::semidefinite;
}

double log_det_positive(const OneOneForm& a, const char* op)
{
    const std::size_t n = a.n;
    std::vector<Complex> l(a.coeffs);  // in-place lower Cholesky
    double logdet = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = l[j * n + j].real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l[j * n + k]);
        if (!(d > 0.0))
            fail(ErrorCode::not_kahler_here, op, "metric is not positive definite on the stencil");
        double root = std::sqrt(d);
        logdet += 2.0 * std::log(root);
        l[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex v = l[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * std::conj(l[j * n + k]);
            l[i * n + j] = v / root;
        }
    }
    return logdet;
}

double form_distance(const OneOneForm& a, const OneOneForm& b)
{
    if (a.n != b.n)
        fail(ErrorCode::dimension_error, "form_distance", "dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        d = std::max(d, std::abs(a.coeffs[i] - b.coeffs[i]));
    return d;
}

} // namespace kcut
