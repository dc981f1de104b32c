// hermitian.hpp — numerical complex differential calculus on coordinate
// charts of ℂⁿ.
//
// The workhorse is ddbar: the Hermitian coefficient matrix a_{jk̄} of the
// real (1,1)-form i Σ a_{jk̄} dz_j∧dz̄_k obtained as ∂²f/∂z_j∂z̄_k of a
// scalar potential by central differences in the real/imaginary directions,
// two step sizes combined by Richardson extrapolation, then symmetrized to
// exact Hermitian.  ricci_form is the nested version,
//     Ric = -i ∂∂̄ log det(ddbar f),
// the sign fixed so the Fubini–Study potential (n+1)·log(1+|z|²) has
// Einstein constant 1.  The outer differencing runs at a larger step than
// the inner one so inner rounding noise is not amplified past tolerance.
//
// Everything here is a pure function over immutable inputs; potential
// evaluators must be reentrant.

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "kcut/errors.hpp"

namespace kcut {

using Complex = std::complex<double>;

struct ComplexPoint {
    std::vector<Complex> coords;

    std::size_t dim() const { return coords.size(); }
    Complex& operator[](std::size_t j) { return coords[j]; }
    const Complex& operator[](std::size_t j) const { return coords[j]; }
};

ComplexPoint make_point(std::initializer_list<Complex> cs);

// Coefficient matrix of a real (1,1)-form; row-major n×n.
struct OneOneForm {
    std::size_t n = 0;
    std::vector<Complex> coeffs;

    static OneOneForm zero(std::size_t n);
    static OneOneForm identity(std::size_t n, double scale = 1.0);

    Complex& at(std::size_t j, std::size_t k) { return coeffs[j * n + k]; }
    const Complex& at(std::size_t j, std::size_t k) const { return coeffs[j * n + k]; }

    double max_abs() const;
    // Hermitian deviation max |a_jk - conj(a_kj)|.
    double hermitian_defect() const;
    // Averages with the conjugate transpose.
    void symmetrize();
    // Throws malformed-form when the defect exceeds 1e-10 of max_abs.
    void require_hermitian(const char* op) const;

    // Pairing i Σ a_{jk̄}(u_j v̄_k - v_j ū_k) of the form with two tangent
    // vectors given by their (1,0)-components.
    double pair(const std::vector<Complex>& u, const std::vector<Complex>& v) const;
};

struct PotentialField {
    std::function<double(const ComplexPoint&)> eval;
    std::function<bool(const ComplexPoint&)> domain;   // optional guard

    bool in_domain(const ComplexPoint& z) const { return !domain || domain(z); }
};

enum class Positivity { positive, semidefinite, indefinite };

struct DiffOptions {
    // Base steps are scaled by (1 + max_j |z_j|) at the evaluation point.
    double ddbar_step = 1e-3;
    double ricci_inner_step = 3e-3;
    double ricci_outer_step = 3e-2;
};

// ∂∂̄ of f at z; h <= 0 picks the default step.
OneOneForm ddbar(const PotentialField& f, const ComplexPoint& z, double h = 0.0,
                 const DiffOptions& opt = {});

// -∂∂̄ log det(ddbar f) at z; h <= 0 picks the default outer step.
OneOneForm ricci_form(const PotentialField& f, const ComplexPoint& z, double h = 0.0,
                      const DiffOptions& opt = {});

// Eigenvalue verdict by cyclic Jacobi (dimension capped at 8).
Positivity positivity_check(const OneOneForm& a);

// Eigenvalues of the Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const OneOneForm& a);

// log det of a Hermitian positive definite coefficient matrix (Cholesky);
// throws not-kahler-here when the matrix is not positive definite.
double log_det_positive(const OneOneForm& a, const char* op);

// Max-abs entrywise difference; the comparison metric for every acceptance
// check.
double form_distance(const OneOneForm& a, const OneOneForm& b);

} // namespace kcut
