#include "doctest.h"

#include <cmath>
#include <random>

#include "kcut/radial.hpp"

using namespace kcut;

namespace {

// hand-differentiated oracle for the custom series c0 + c1 t + c2 t^2 + ...
double poly_oracle_d1(const std::vector<double>& c, double t)
{
    double s = 0.0, pw = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
        s += static_cast<double>(k) * c[k] * pw;
        pw *= t;
    }
    return s;
}

} // namespace

TEST_CASE("quadratic potential is exactly a0*t")
{
    RadialPotential p = make_quadratic(1.0);
    CHECK(p.F(0.7) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(p.F1(3.2) == 1.0);
    CHECK(p.F2(3.2) == 0.0);
}

TEST_CASE("log_einstein values")
{
    RadialPotential p = make_log_einstein(1.0);
    CHECK(p.F(2.0) == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-14));

    RadialPotential p2 = make_log_einstein(2.0);
    CHECK(p2.F(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("custom series and derivative oracle")
{
    std::vector<double> c = {0.0, 1.0, -0.1};
    RadialPotential p = make_custom(c, 2.0);
    CHECK(p.F1(1.0) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(p.F1(1.7) == doctest::Approx(poly_oracle_d1(c, 1.7)).epsilon(1e-14));
    CHECK(p.F2(0.3) == doctest::Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("construction errors")
{
    CHECK_THROWS_AS(make_quadratic(0.0), Error);
    CHECK_THROWS_AS(make_quadratic(-1.0), Error);
    CHECK_THROWS_AS(make_log_einstein(-2.0), Error);
    CHECK_THROWS_AS(make_custom({}, 1.0), Error);

    try {
        make_quadratic(-1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_parameter);
    }
}

TEST_CASE("inconsistent custom derivatives are rejected")
{
    auto F = [](double t) { return t * t; };
    auto wrong_F1 = [](double) { return 3.0; };
    auto F2 = [](double) { return 2.0; };
    CHECK_THROWS_AS(make_custom_explicit(F, wrong_F1, F2, 2.0), Error);
    try {
        make_custom_explicit(F, wrong_F1, F2, 2.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::inconsistent_derivatives);
    }

    auto good = make_custom_explicit(F, [](double t) { return 2.0 * t; }, F2, 2.0);
    CHECK(good.F1(0.5) == doctest::Approx(1.0));
}

TEST_CASE("moment profiles of the builtin kinds")
{
    MomentProfile mq = moment_profile(make_quadratic(1.0));
    CHECK(mq.H(0.0) == 0.0);
    CHECK(mq.H(2.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(std::isinf(mq.cap_a));

    MomentProfile ml = moment_profile(make_log_einstein(1.0));
    CHECK(ml.H(1.0) == doctest::Approx(1.0).epsilon(1e-14));   // 2t/(1+t) at t=1
    CHECK(ml.H(0.0) == 0.0);
    CHECK(ml.cap_a == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_FALSE(ml.cap_estimated);

    MomentProfile m2 = moment_profile(make_log_einstein(2.0));
    CHECK(m2.H(1.0) == doctest::Approx(0.5).epsilon(1e-14));   // t/(1+t)
    CHECK(m2.cap_a == doctest::Approx(1.0).epsilon(1e-15));

    MomentProfile mc = moment_profile(make_custom({0.0, 1.0, -0.1}, 2.0));
    CHECK(mc.cap_estimated);
    CHECK(mc.cap_a == doctest::Approx(2.0 - 0.2 * 4.0).epsilon(1e-14));  // H(2) = t - 0.2 t^2
    CHECK(mc.H(0.0) == 0.0);
}

TEST_CASE("invert_moment hits the spec examples")
{
    MomentProfile mq = moment_profile(make_quadratic(1.0));
    CHECK(invert_moment(mq, 0.25) == doctest::Approx(0.25).epsilon(1e-12));

    MomentProfile ml = moment_profile(make_log_einstein(1.0));
    CHECK(invert_moment(ml, 1.0) == doctest::Approx(1.0).epsilon(1e-11));

    CHECK_THROWS_AS(invert_moment(ml, 2.0), Error);
    CHECK_THROWS_AS(invert_moment(ml, -0.25), Error);
    try {
        invert_moment(ml, 2.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::out_of_range);
    }
}

TEST_CASE("round trip H(K(s)) and K(H(t)) on builtins")
{
    std::vector<RadialPotential> pots;
    pots.push_back(make_quadratic(1.0));
    pots.push_back(make_quadratic(3.0));
    pots.push_back(make_log_einstein(1.0));
    pots.push_back(make_log_einstein(0.5));

    for (const RadialPotential& p : pots) {
        MomentProfile mp = moment_profile(p);
        double s_hi = std::min(mp.cap_a, 1e3);
        for (int i = 0; i < 60; ++i) {
            double s = s_hi * (static_cast<double>(i) + 0.3) / 61.0;
            double t = invert_moment(mp, s);
            CHECK(std::fabs(mp.H(t) - s) < 1e-12 * std::max(1.0, std::fabs(s)));
        }
        for (int i = 0; i <= 40; ++i) {
            double t = 1e3 * static_cast<double>(i) / 40.0;
            double s = mp.H(t);
            if (s >= mp.cap_a) continue;
            double t2 = invert_moment(mp, s);
            CHECK(std::fabs(t2 - t) < 1e-9 * std::max(1.0, t));
        }
    }
}

TEST_CASE("monotonicity of H where symplectic")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 50.0);
    MomentProfile mp = moment_profile(make_log_einstein(1.0));
    for (int i = 0; i < 200; ++i) {
        double t1 = dist(rng), t2 = dist(rng);
        if (t2 < t1) std::swap(t1, t2);
        if (t2 - t1 < 1e-9) continue;
        CHECK(mp.H(t2) > mp.H(t1));
    }
}

TEST_CASE("derivative consistency of H1 via Richardson")
{
    // central differences of H converge to H1 at second order: halving h
    // divides the error by about 4, and the (h, h/2) extrapolation lands
    // well below either
    MomentProfile mp = moment_profile(make_log_einstein(1.0));
    for (double t : {0.3, 1.0, 4.0}) {
        double h = 0.2;
        double d_h = (mp.H(t + h) - mp.H(t - h)) / (2.0 * h);
        double d_h2 = (mp.H(t + h / 2) - mp.H(t - h / 2)) / h;
        double err_h = std::fabs(d_h - mp.H1(t));
        double err_h2 = std::fabs(d_h2 - mp.H1(t));
        CHECK(err_h / err_h2 > 3.0);
        CHECK(err_h / err_h2 < 5.0);
        double extrap = (4.0 * d_h2 - d_h) / 3.0;
        CHECK(std::fabs(extrap - mp.H1(t)) < 0.1 * err_h2);
    }

    // a quadratic profile has no truncation error at all
    MomentProfile mq = moment_profile(make_quadratic(2.0));
    double d = (mq.H(1.1) - mq.H(0.9)) / 0.2;
    CHECK(d == doctest::Approx(mq.H1(1.0)).epsilon(1e-12));
}

TEST_CASE("check_symplectic dichotomy")
{
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);

    CHECK(check_symplectic(make_log_einstein(1.0), grid).symplectic);
    CHECK(check_symplectic(make_quadratic(1.0), grid).symplectic);

    // F = t - 0.1 t^2: H1(t) = 1 - 0.4 t changes sign at 2.5
    RadialPotential bad = make_custom({0.0, 1.0, -0.1}, 10.0);
    std::vector<double> coarse = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    SymplecticVerdict v = check_symplectic(bad, coarse);
    CHECK_FALSE(v.symplectic);
    CHECK(v.fails_at == doctest::Approx(3.0));

    CHECK_THROWS_AS(check_symplectic(bad, {}), Error);
    CHECK_THROWS_AS(check_symplectic(bad, {-1.0}), Error);
}
