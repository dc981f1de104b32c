#include "kcut/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace kcut {

namespace {

using i128 = __int128;

std::int64_t checked_cast(i128 v, const char* op)
{
    if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
        fail(ErrorCode::too_large, op, "integer overflow in exact arithmetic");
    return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b)
{
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_rational(i128 num, i128 den, const char* op)
{
    if (den == 0)
        fail(ErrorCode::invalid_parameter, op, "zero denominator");
    if (den < 0) { num = -num; den = -den; }
    i128 g = gcd128(num, den);
    if (g > 1) { num /= g; den /= g; }
    Rational r;
    r.num = checked_cast(num, op);
    r.den = checked_cast(den, op);
    return r;
}

} // namespace

std::int64_t int_gcd(std::int64_t a, std::int64_t b)
{
    return static_cast<std::int64_t>(gcd128(a, b));
}

Rational::Rational(std::int64_t n, std::int64_t d)
{
    *this = make_rational(n, d, "Rational");
}

Rational Rational::from_double(double x, std::int64_t max_den)
{
    if (!std::isfinite(x))
        fail(ErrorCode::invalid_parameter, "Rational", "non-finite value");
    // continued-fraction expansion
    double v = x;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int i = 0; i < 64; ++i) {
        double fl = std::floor(v);
        if (fl > 9e17 || fl < -9e17) break;
        std::int64_t a = static_cast<std::int64_t>(fl);
        i128 p2 = static_cast<i128>(a) * p1 + p0;
        i128 q2 = static_cast<i128>(a) * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1;
        p1 = checked_cast(p2, "Rational");
        q1 = checked_cast(q2, "Rational");
        double rem = v - fl;
        if (q1 > 0 && std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-12 * (1.0 + std::fabs(x)))
            break;
        if (rem < 1e-15) break;
        v = 1.0 / rem;
    }
    if (q1 == 0)
        fail(ErrorCode::invalid_parameter, "Rational", "cannot approximate value");
    return make_rational(p1, q1, "Rational");
}

Rational Rational::operator+(const Rational& o) const
{
    return make_rational(static_cast<i128>(num) * o.den + static_cast<i128>(o.num) * den,
                         static_cast<i128>(den) * o.den, "Rational+");
}

Rational Rational::operator-(const Rational& o) const
{
    return make_rational(static_cast<i128>(num) * o.den - static_cast<i128>(o.num) * den,
                         static_cast<i128>(den) * o.den, "Rational-");
}

Rational Rational::operator*(const Rational& o) const
{
    return make_rational(static_cast<i128>(num) * o.num, static_cast<i128>(den) * o.den, "Rational*");
}

Rational Rational::operator/(const Rational& o) const
{
    if (o.num == 0)
        fail(ErrorCode::invalid_parameter, "Rational/", "division by zero");
    return make_rational(static_cast<i128>(num) * o.den, static_cast<i128>(den) * o.num, "Rational/");
}

bool Rational::operator<(const Rational& o) const
{
    return static_cast<i128>(num) * o.den < static_cast<i128>(o.num) * den;
}

IntVec primitive(IntVec v)
{
    std::int64_t g = 0;
    for (std::int64_t x : v) g = int_gcd(g, x);
    if (g > 1)
        for (std::int64_t& x : v) x /= g;
    for (std::int64_t x : v) {
        if (x != 0) {
            if (x < 0)
                for (std::int64_t& y : v) y = -y;
            break;
        }
    }
    return v;
}

std::size_t rank_rational(RatMat m)
{
    std::size_t rank = 0;
    if (m.empty()) return 0;
    std::size_t cols = m[0].size();
    for (std::size_t col = 0; col < cols && rank < m.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < m.size() && m[pivot][col].is_zero()) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[rank], m[pivot]);
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == rank || m[r][col].is_zero()) continue;
            Rational factor = m[r][col] / m[rank][col];
            for (std::size_t c2 = col; c2 < cols; ++c2)
                m[r][c2] = m[r][c2] - factor * m[rank][c2];
        }
        ++rank;
    }
    return rank;
}

namespace {

// Diagonalizes m by unimodular row/column operations, accumulating the
// column operations into v (so that ker_Z(m) is spanned by the columns of
// v over the zero diagonal positions).  Returns the diagonal.
IntVec smith_diagonalize(IntMat& m, std::size_t cols, IntMat* v)
{
    const std::size_t rows = m.size();
    if (v) {
        v->assign(cols, IntVec(cols, 0));
        for (std::size_t i = 0; i < cols; ++i) (*v)[i][i] = 1;
    }
    auto add_col = [&](std::size_t dst, std::size_t src, std::int64_t k) {
        for (std::size_t r = 0; r < rows; ++r)
            m[r][dst] = checked_cast(static_cast<i128>(m[r][dst]) + static_cast<i128>(k) * m[r][src], "smith");
        if (v)
            for (std::size_t r = 0; r < cols; ++r)
                (*v)[r][dst] = checked_cast(static_cast<i128>((*v)[r][dst]) + static_cast<i128>(k) * (*v)[r][src], "smith");
    };
    auto swap_col = [&](std::size_t a, std::size_t b) {
        for (std::size_t r = 0; r < rows; ++r) std::swap(m[r][a], m[r][b]);
        if (v)
            for (std::size_t r = 0; r < cols; ++r) std::swap((*v)[r][a], (*v)[r][b]);
    };
    auto add_row = [&](std::size_t dst, std::size_t src, std::int64_t k) {
        for (std::size_t c = 0; c < cols; ++c)
            m[dst][c] = checked_cast(static_cast<i128>(m[dst][c]) + static_cast<i128>(k) * m[src][c], "smith");
    };

    IntVec diag;
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // find the smallest nonzero entry in the remaining block
        std::size_t pr = rows, pc = cols;
        std::int64_t best = 0;
        for (std::size_t r = t; r < rows; ++r)
            for (std::size_t c = t; c < cols; ++c)
                if (m[r][c] != 0 && (best == 0 || std::llabs(m[r][c]) < best)) {
                    best = std::llabs(m[r][c]);
                    pr = r; pc = c;
                }
        if (pr == rows) break;  // block is zero
        std::swap(m[t], m[pr]);
        swap_col(t, pc);

        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t r = t + 1; r < rows; ++r) {
                if (m[r][t] == 0) continue;
                std::int64_t q = m[r][t] / m[t][t];
                add_row(r, t, -q);
                if (m[r][t] != 0) {  // remainder smaller than pivot: swap up and restart
                    std::swap(m[t], m[r]);
                    clean = false;
                }
            }
            for (std::size_t c = t + 1; c < cols; ++c) {
                if (m[t][c] == 0) continue;
                std::int64_t q = m[t][c] / m[t][t];
                add_col(c, t, -q);
                if (m[t][c] != 0) {
                    swap_col(t, c);
                    clean = false;
                }
            }
        }
        diag.push_back(std::llabs(m[t][t]));
        ++t;
    }
    return diag;
}

} // namespace

IntMat integer_kernel(const IntMat& m_in, std::size_t cols)
{
    IntMat m = m_in;
    for (IntVec& row : m)
        if (row.size() != cols)
            fail(ErrorCode::dimension_error, "integer_kernel", "ragged matrix");
    if (m.empty()) {
        IntMat id(cols, IntVec(cols, 0));
        for (std::size_t i = 0; i < cols; ++i) id[i][i] = 1;
        return id;
    }
    IntMat v;
    IntVec diag = smith_diagonalize(m, cols, &v);
    std::size_t rank = 0;
    for (std::int64_t d : diag)
        if (d != 0) ++rank;
    IntMat basis;
    for (std::size_t c = rank; c < cols; ++c) {
        IntVec col(cols);
        for (std::size_t r = 0; r < cols; ++r) col[r] = v[r][c];
        basis.push_back(primitive(std::move(col)));
    }
    return basis;
}

IntMat saturated_row_lattice(const IntMat& m, std::size_t cols)
{
    return integer_kernel(integer_kernel(m, cols), cols);
}

bool in_rational_span(const IntMat& basis, const IntVec& v, std::size_t cols)
{
    RatMat m;
    for (const IntVec& row : basis) {
        RatVec r(cols);
        for (std::size_t c = 0; c < cols; ++c) r[c] = Rational(row[c]);
        m.push_back(std::move(r));
    }
    std::size_t r0 = rank_rational(m);
    RatVec extra(cols);
    for (std::size_t c = 0; c < cols; ++c) extra[c] = Rational(v[c]);
    m.push_back(std::move(extra));
    return rank_rational(m) == r0;
}

IntVec smith_invariant_factors(IntMat m)
{
    if (m.empty() || m[0].empty()) return {};
    std::size_t cols = m[0].size();
    IntVec diag = smith_diagonalize(m, cols, nullptr);
    IntVec factors;
    for (std::int64_t d : diag)
        if (d != 0) factors.push_back(d);
    // enforce the divisibility chain d_i | d_{i+1}
    for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
        for (std::size_t j = i + 1; j < factors.size(); ++j) {
            if (factors[j] % factors[i] != 0) {
                std::int64_t g = int_gcd(factors[i], factors[j]);
                i128 l = static_cast<i128>(factors[i]) / g * factors[j];
                factors[i] = g;
                factors[j] = checked_cast(l, "smith");
            }
        }
    }
    std::sort(factors.begin(), factors.end());
    return factors;
}

// --- Fourier–Motzkin feasibility -----------------------------------------

namespace {

struct Row {
    RatVec a;
    Rational c;
    Rel rel;
};

bool trivially_ok(const Row& r)
{
    // all-zero coefficients: 0 rel c
    Rational zero(0);
    switch (r.rel) {
        case Rel::eq: return r.c == zero;
        case Rel::ge: return zero >= r.c;
        case Rel::gt: return zero > r.c;
    }
    return false;
}

bool all_zero(const RatVec& a)
{
    for (const Rational& x : a)
        if (!x.is_zero()) return false;
    return true;
}

} // namespace

std::optional<RatVec> feasible_point(std::vector<LinConstraint> sys, std::size_t dim)
{
    std::vector<Row> rows;
    rows.reserve(sys.size());
    for (LinConstraint& lc : sys) {
        if (lc.a.size() != dim)
            fail(ErrorCode::dimension_error, "feasible_point", "constraint dimension mismatch");
        rows.push_back(Row{std::move(lc.a), lc.c, lc.rel});
    }

    // substitution records for equality rows: x_var = (c - Σ a_u x_u)/a_var
    struct Subst { std::size_t var; RatVec a; Rational c; Rational pivot; };
    std::vector<Subst> substs;
    std::vector<bool> eliminated(dim, false);

    // eliminate equalities by substitution
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].rel != Rel::eq) continue;
            if (all_zero(rows[i].a)) {
                if (!trivially_ok(rows[i])) return std::nullopt;
                rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
                progress = true;
                break;
            }
            std::size_t var = dim;
            for (std::size_t v = 0; v < dim; ++v)
                if (!rows[i].a[v].is_zero()) { var = v; break; }
            Subst s{var, rows[i].a, rows[i].c, rows[i].a[var]};
            s.a[var] = Rational(0);
            substs.push_back(s);
            eliminated[var] = true;
            Row eq = rows[i];
            rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
            for (Row& r : rows) {
                if (r.a[var].is_zero()) continue;
                Rational factor = r.a[var] / eq.a[var];
                for (std::size_t v = 0; v < dim; ++v)
                    r.a[v] = r.a[v] - factor * eq.a[v];
                r.c = r.c - factor * eq.c;
            }
            progress = true;
            break;
        }
    }

    // Fourier–Motzkin on the remaining inequalities
    struct Level { std::size_t var; std::vector<Row> lowers, uppers; };
    std::vector<Level> levels;
    std::vector<std::size_t> order;
    for (std::size_t v = dim; v-- > 0;)
        if (!eliminated[v]) order.push_back(v);

    for (std::size_t var : order) {
        Level lev;
        lev.var = var;
        std::vector<Row> keep;
        for (Row& r : rows) {
            if (r.a[var].is_zero()) { keep.push_back(std::move(r)); continue; }
            if (r.a[var] > Rational(0)) lev.lowers.push_back(std::move(r));
            else                        lev.uppers.push_back(std::move(r));
        }
        for (const Row& lo : lev.lowers) {
            for (const Row& up : lev.uppers) {
                // lo: a_v x_v >= c - rest  (a_v > 0);  up: a_v' x_v <= ... (a_v' < 0)
                Row combined;
                combined.a.assign(dim, Rational(0));
                Rational av_lo = lo.a[var];
                Rational av_up = Rational(0) - up.a[var];  // positive
                for (std::size_t v = 0; v < dim; ++v)
                    combined.a[v] = lo.a[v] * av_up + up.a[v] * av_lo;
                combined.c = lo.c * av_up + up.c * av_lo;
                combined.a[var] = Rational(0);
                combined.rel = (lo.rel == Rel::gt || up.rel == Rel::gt) ? Rel::gt : Rel::ge;
                if (all_zero(combined.a)) {
                    if (!trivially_ok(combined)) return std::nullopt;
                } else {
                    keep.push_back(std::move(combined));
                }
            }
        }
        // cheap dedup to keep FM from ballooning
        std::sort(keep.begin(), keep.end(), [](const Row& x, const Row& y) {
            if (x.rel != y.rel) return x.rel < y.rel;
            if (x.c.num != y.c.num) return x.c.num < y.c.num;
            if (x.c.den != y.c.den) return x.c.den < y.c.den;
            for (std::size_t v = 0; v < x.a.size(); ++v) {
                if (x.a[v].num != y.a[v].num) return x.a[v].num < y.a[v].num;
                if (x.a[v].den != y.a[v].den) return x.a[v].den < y.a[v].den;
            }
            return false;
        });
        keep.erase(std::unique(keep.begin(), keep.end(), [](const Row& x, const Row& y) {
            return x.rel == y.rel && x.c == y.c && x.a == y.a;
        }), keep.end());
        rows = std::move(keep);
        levels.push_back(std::move(lev));
    }

    for (const Row& r : rows)
        if (!trivially_ok(r)) return std::nullopt;

    // back-substitute a witness
    RatVec x(dim, Rational(0));
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        bool has_lo = false, has_hi = false, lo_strict = false, hi_strict = false;
        Rational lo(0), hi(0);
        auto bound_from = [&](const Row& r) {
            Rational rest = r.c;
            for (std::size_t v = 0; v < dim; ++v)
                if (v != it->var && !r.a[v].is_zero()) rest = rest - r.a[v] * x[v];
            return rest / r.a[it->var];
        };
        for (const Row& r : it->lowers) {
            Rational b = bound_from(r);
            if (!has_lo || b > lo || (b == lo && r.rel == Rel::gt)) {
                if (!has_lo || b > lo) lo_strict = (r.rel == Rel::gt);
                else lo_strict = lo_strict || (r.rel == Rel::gt);
                lo = b;
                has_lo = true;
            }
        }
        for (const Row& r : it->uppers) {
            Rational b = bound_from(r);
            if (!has_hi || b < hi || (b == hi && r.rel == Rel::gt)) {
                if (!has_hi || b < hi) hi_strict = (r.rel == Rel::gt);
                else hi_strict = hi_strict || (r.rel == Rel::gt);
                hi = b;
                has_hi = true;
            }
        }
        Rational val(0);
        if (has_lo && has_hi) {
            if (lo == hi) {
                if (lo_strict || hi_strict) return std::nullopt;  // defensive; FM should have caught it
                val = lo;
            } else {
                val = (lo + hi) / Rational(2);
            }
        } else if (has_lo) {
            val = lo + Rational(1);
        } else if (has_hi) {
            val = hi - Rational(1);
        }
        x[it->var] = val;
    }
    // equality substitutions, most recent first
    for (auto it = substs.rbegin(); it != substs.rend(); ++it) {
        Rational rest = it->c;
        for (std::size_t v = 0; v < dim; ++v)
            if (!it->a[v].is_zero()) rest = rest - it->a[v] * x[v];
        x[it->var] = rest / it->pivot;
    }
    return x;
}

} // namespace kcut
