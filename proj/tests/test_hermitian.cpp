#include "doctest.h"

#include <cmath>
#include <random>

#include "kcut/hermitian.hpp"
#include "kcut/radial.hpp"

using namespace kcut;

namespace {

PotentialField field(std::function<double(const ComplexPoint&)> f)
{
    PotentialField pf;
    pf.eval = std::move(f);
    return pf;
}

double norm_sq(const ComplexPoint& z)
{
    double s = 0.0;
    for (const Complex& c : z.coords) s += std::norm(c);
    return s;
}

} // namespace

TEST_CASE("ddbar of |z|^2 is the identity coefficient")
{
    PotentialField f = field([](const ComplexPoint& z) { return norm_sq(z); });
    for (Complex z0 : {Complex(0.0, 0.0), Complex(0.7, -0.4), Complex(-2.0, 1.5)}) {
        OneOneForm a = ddbar(f, make_point({z0}));
        CHECK(std::abs(a.at(0, 0) - Complex(1.0, 0.0)) < 1e-9);
    }
}

TEST_CASE("ddbar annihilates pluriharmonic functions")
{
    PotentialField f = field([](const ComplexPoint& z) {
        Complex w = z[0] * z[0] * z[0];
        return w.real();
    });
    OneOneForm a = ddbar(f, make_point({Complex(0.3, 0.2)}));
    CHECK(std::abs(a.at(0, 0)) < 1e-8);

    // degree-4 mixed-variable test in two variables
    PotentialField g = field([](const ComplexPoint& z) {
        Complex w = z[0] * z[0] * z[1] + 3.0 * z[1] * z[1] * z[1] * z[1] - Complex(0.0, 2.0) * z[0];
        return w.real();
    });
    OneOneForm b = ddbar(g, make_point({Complex(0.4, -0.1), Complex(-0.2, 0.5)}));
    CHECK(b.max_abs() < 1e-7);
}

TEST_CASE("ddbar of log(1+|z|^2) at the origin")
{
    PotentialField f = field([](const ComplexPoint& z) { return std::log1p(norm_sq(z)); });
    OneOneForm a = ddbar(f, make_point({Complex(0.0, 0.0)}));
    CHECK(std::abs(a.at(0, 0) - Complex(1.0, 0.0)) < 1e-8);

    // analytic radial oracle at a generic point: g = (tf')' with f = log(1+t)
    Complex z0(0.6, -0.3);
    double t = std::norm(z0);
    double oracle = 1.0 / ((1.0 + t) * (1.0 + t));
    OneOneForm b = ddbar(f, make_point({z0}));
    CHECK(std::abs(b.at(0, 0) - Complex(oracle, 0.0)) < 1e-8);
}

TEST_CASE("ddbar is linear")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    PotentialField f = field([](const ComplexPoint& z) { return std::log1p(norm_sq(z)); });
    PotentialField g = field([](const ComplexPoint& z) {
        return std::exp(0.3 * z[0].real()) * std::cos(0.2 * z[1].imag()) + norm_sq(z);
    });
    for (int i = 0; i < 5; ++i) {
        ComplexPoint z = make_point({Complex(dist(rng), dist(rng)), Complex(dist(rng), dist(rng))});
        double al = 1.7, be = -0.6;
        PotentialField comb = field([&, al, be](const ComplexPoint& p) {
            return al * f.eval(p) + be * g.eval(p);
        });
        OneOneForm lhs = ddbar(comb, z);
        OneOneForm fa = ddbar(f, z), gb = ddbar(g, z);
        OneOneForm rhs = OneOneForm::zero(2);
        for (std::size_t idx = 0; idx < rhs.coeffs.size(); ++idx)
            rhs.coeffs[idx] = al * fa.coeffs[idx] + be * gb.coeffs[idx];
        CHECK(form_distance(lhs, rhs) < 1e-8);
    }
}

TEST_CASE("order of accuracy: halving h cuts the error by at least 3")
{
    PotentialField f = field([](const ComplexPoint& z) { return std::log1p(norm_sq(z)); });
    Complex z0(0.7, 0.3);
    double t = std::norm(z0);
    double oracle = 1.0 / ((1.0 + t) * (1.0 + t));
    double h = 0.25;
    double e1 = std::abs(ddbar(f, make_point({z0}), h).at(0, 0).real() - oracle);
    double e2 = std::abs(ddbar(f, make_point({z0}), h / 2).at(0, 0).real() - oracle);
    CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("ricci of the flat metric vanishes")
{
    PotentialField f = field([](const ComplexPoint& z) { return norm_sq(z); });
    OneOneForm r = ricci_form(f, make_point({Complex(0.4, 0.1)}));
    CHECK(r.max_abs() < 1e-8);
}

TEST_CASE("Fubini-Study is Einstein with the right sign")
{
    // n=1, kappa=1: f = 2 log(1+|z|^2), Ric = ddbar f
    PotentialField f1 = field([](const ComplexPoint& z) { return 2.0 * std::log1p(norm_sq(z)); });
    ComplexPoint z1 = make_point({Complex(0.5, 0.0)});
    CHECK(form_distance(ricci_form(f1, z1), ddbar(f1, z1)) < 1e-5);

    // n=2: f = 3 log(1+|z|^2)
    PotentialField f2 = field([](const ComplexPoint& z) { return 3.0 * std::log1p(norm_sq(z)); });
    ComplexPoint z2 = make_point({Complex(0.3, 0.0), Complex(0.0, -0.1)});
    CHECK(form_distance(ricci_form(f2, z2), ddbar(f2, z2)) < 1e-5);
}

TEST_CASE("ricci ignores pluriharmonic additions")
{
    PotentialField f = field([](const ComplexPoint& z) { return 2.0 * std::log1p(norm_sq(z)); });
    PotentialField g = field([](const ComplexPoint& z) {
        Complex w = z[0] * z[0];
        return 2.0 * std::log1p(norm_sq(z)) + 0.7 * w.real();
    });
    ComplexPoint z = make_point({Complex(0.4, 0.2)});
    CHECK(form_distance(ricci_form(f, z), ricci_form(g, z)) < 1e-5);
}

TEST_CASE("ricci refuses non-Kahler points")
{
    PotentialField f = field([](const ComplexPoint& z) { return -norm_sq(z); });
    CHECK_THROWS_AS(ricci_form(f, make_point({Complex(0.1, 0.0)})), Error);
}

TEST_CASE("positivity verdicts")
{
    OneOneForm one = OneOneForm::identity(1);
    CHECK(positivity_check(one) == Positivity::positive);

    OneOneForm zero = OneOneForm::zero(1);
    CHECK(positivity_check(zero) == Positivity::semidefinite);

    // radial potential F = t - 0.1 t^2 at |z|^2 = 4: coefficient H'(4) < 0
    RadialPotential bad = make_custom({0.0, 1.0, -0.1}, 10.0);
    PotentialField f = field([&bad](const ComplexPoint& z) { return bad.F(norm_sq(z)); });
    OneOneForm a = ddbar(f, make_point({Complex(2.0, 0.0)}));
    CHECK(positivity_check(a) == Positivity::indefinite);
    CHECK(a.at(0, 0).real() == doctest::Approx(-0.6).epsilon(1e-6));
}

TEST_CASE("positivity agrees with the radial dichotomy at matched points")
{
    RadialPotential pot = make_custom({0.0, 1.0, -0.1}, 10.0);
    MomentProfile mp = moment_profile(pot);
    PotentialField f = field([&pot](const ComplexPoint& z) { return pot.F(norm_sq(z)); });
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(0.0, 3.0);
    int checked = 0;
    while (checked < 40) {
        double radius = dist(rng);
        double t = radius * radius;
        if (std::fabs(mp.H1(t)) < 1e-3) continue;  // stay off the razor edge
        SymplecticVerdict sv = check_symplectic(pot, {t});
        OneOneForm a = ddbar(f, make_point({Complex(radius, 0.0)}));
        Positivity pv = positivity_check(a);
        if (sv.symplectic) CHECK(pv == Positivity::positive);
        else               CHECK(pv == Positivity::indefinite);
        ++checked;
    }
}

TEST_CASE("hermitian eigenvalues of a known matrix")
{
    OneOneForm a = OneOneForm::zero(2);
    a.at(0, 0) = 2.0;
    a.at(1, 1) = 2.0;
    a.at(0, 1) = Complex(0.0, 1.0);
    a.at(1, 0) = Complex(0.0, -1.0);
    std::vector<double> eig = hermitian_eigenvalues(a);
    CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("malformed forms are rejected")
{
    OneOneForm a = OneOneForm::zero(2);
    a.at(0, 1) = Complex(1.0, 0.0);
    a.at(1, 0) = Complex(0.5, 0.0);  // not the conjugate
    CHECK_THROWS_AS(positivity_check(a), Error);
    try {
        positivity_check(a);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::malformed_form);
    }
}

TEST_CASE("form_distance basics")
{
    OneOneForm a = OneOneForm::identity(2, 1.0);
    CHECK(form_distance(a, a) == 0.0);

    OneOneForm b1 = OneOneForm::identity(1, 1.0);
    OneOneForm b2 = OneOneForm::identity(1, 2.0);
    CHECK(form_distance(b1, b2) == doctest::Approx(1.0));

    CHECK_THROWS_AS(form_distance(a, b1), Error);
}

TEST_CASE("domain guard raises domain-violation")
{
    PotentialField f;
    f.eval = [](const ComplexPoint& z) { return norm_sq(z); };
    f.domain = [](const ComplexPoint& z) { return z[0].real() < 0.5; };
    CHECK_THROWS_AS(ddbar(f, make_point({Complex(0.4999, 0.0)})), Error);
}
