// lattice.hpp — exact rational/integer linear algebra for the polyhedral
// combinatorics: rationals over int64 with overflow checks, kernel and rank
// computations, saturated integer kernels (Hermite-style elimination),
// Smith normal form for finite-index detection, and a Fourier–Motzkin
// feasibility solver that produces rational interior witnesses.
//
// Desk scale only: dimensions <= ~8, constraint counts <= 20.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kcut/errors.hpp"

namespace kcut {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d);

    static Rational from_double(double x, std::int64_t max_den = 1'000'000'000);

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational operator-() const { return {-num, den}; }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    bool is_zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;
using IntVec = std::vector<std::int64_t>;
using IntMat = std::vector<IntVec>;

std::int64_t int_gcd(std::int64_t a, std::int64_t b);

// Divides out the gcd and normalizes the sign of the leading entry.
IntVec primitive(IntVec v);

std::size_t rank_rational(RatMat m);

// Basis of {x : M x = 0} as primitive integer vectors spanning the
// saturated kernel lattice.
IntMat integer_kernel(const IntMat& m, std::size_t cols);

// Saturation of the integer row span of m: primitive basis of
// span_Q(rows) ∩ Z^cols.  Computed as the kernel of the kernel.
IntMat saturated_row_lattice(const IntMat& m, std::size_t cols);

// true iff v lies in the rational row span of basis.
bool in_rational_span(const IntMat& basis, const IntVec& v, std::size_t cols);

// Invariant factors d_1 | d_2 | ... of the integer matrix (Smith normal
// form diagonal, zeros excluded).
IntVec smith_invariant_factors(IntMat m);

// One linear constraint  a·x  (rel)  c.
enum class Rel { eq, ge, gt };
struct LinConstraint {
    RatVec a;
    Rational c;
    Rel rel = Rel::ge;
};

// Exact feasibility by Fourier–Motzkin elimination; returns a rational
// witness when the system is solvable.
std::optional<RatVec> feasible_point(std::vector<LinConstraint> sys, std::size_t dim);

} // namespace kcut
