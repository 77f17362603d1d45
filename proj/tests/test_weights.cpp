#include <cmath>

#include "doctest.h"
#include "klab/bessel.hpp"
#include "klab/errors.hpp"
#include "klab/quadrature.hpp"
#include "klab/arith.hpp"
#include "klab/weights.hpp"

using namespace klab;

TEST_CASE("clenshaw-curtis integrator") {
    QuadOptions opt;
    opt.tol = 1e-12;
    CHECK(integrate([](double x) { return x * x; }, 0, 3, opt) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::exp(x); }, 0, 1, opt) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    // oscillatory
    opt.init_panels = 40;
    CHECK(integrate([](double x) { return std::cos(40.0 * x); }, 0, 1, opt) ==
          doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-10));
}

TEST_CASE("bump support and plateau") {
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    CHECK(w(1.0) == 1.0);
    CHECK(w(0.4) == 0.0);
    CHECK(w(2.1) == 0.0);
    CHECK(w(0.5) == 0.0);
    CHECK(w(2.0) == 0.0);
    for (double x : {0.6, 0.9, 1.7, 1.95}) {
        CHECK(w(x) >= 0.0);
        CHECK(w(x) <= 1.0);
    }
    SmoothWeight w4 = make_bump(4.0, 0.5, 2.0);
    CHECK(w4.plateau_lo() == doctest::Approx(0.5 + 0.125));
    CHECK(w4.plateau_hi() == doctest::Approx(2.0 - 0.125));
    CHECK(w4(0.5 + 0.125) == 1.0);
    CHECK_THROWS_AS(make_bump(1.0, 0.9, 1.0), DegenerateSupport);
}

TEST_CASE("derivatives match finite differences and certificate") {
    SmoothWeight w = make_bump(2.0, 0.5, 2.0);
    const double h = 1e-5;
    for (double x : {0.55, 0.58, 0.62, 1.9, 1.93}) {
        double fd1 = (w(x + h) - w(x - h)) / (2 * h);
        CHECK(w.derivative(1, x) == doctest::Approx(fd1).epsilon(1e-5));
        double fd2 = (w(x + h) - 2 * w(x) + w(x - h)) / (h * h);
        CHECK(w.derivative(2, x) == doctest::Approx(fd2).epsilon(1e-4));
    }
    // finite-difference sups respect the certificate with 5% headroom
    for (int j = 1; j <= 3; ++j) {
        double grid_max = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            double x = 0.5 + 1.5 * i / 4000.0;
            grid_max = std::max(grid_max, std::abs(w.derivative(j, x)));
        }
        CHECK(grid_max <= 1.05 * w.deriv_sup(j));
        CHECK(grid_max > 0.0);
    }
}

TEST_CASE("second differences converge to the analytic second derivative") {
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    const double x = 0.6;
    double exact = w.derivative(2, x);
    double prev_err = 1e300;
    for (double h : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
        double fd = (w(x + h) - 2 * w(x) + w(x - h)) / (h * h);
        double err = std::abs(fd - exact);
        CHECK(err < prev_err + 1e-9);
        prev_err = err;
    }
    CHECK(prev_err < 1e-4);
}

TEST_CASE("weight fourier transform and decay certificate") {
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    cdouble at0 = w.fourier(0.0);
    CHECK(at0.real() == doctest::Approx(w.mass()).epsilon(1e-10));
    CHECK(std::abs(at0.imag()) < 1e-11);
    // |hat W(t)| <= mass always, and below the certificate at t = 50
    for (double t : {0.5, 3.0, 17.0, 50.0}) {
        double v = std::abs(w.fourier(t));
        CHECK(v <= w.mass() + 1e-11);
        CHECK(v <= w.fourier_bound(t) + 1e-11);
    }
    // certificate has the right shape on a log grid (j = 1..3)
    for (int j = 1; j <= 3; ++j) {
        for (double t = 1.0; t <= 1e4; t *= 10.0) {
            double bound = w.deriv_l1(j) / std::pow(2 * std::numbers::pi * t, j);
            CHECK(w.fourier_bound(t) <= bound + 1e-15);
        }
    }
    double v50 = std::abs(w.fourier(50.0));
    double c2 = w.deriv_l1(2) / std::pow(2 * std::numbers::pi, 2);
    CHECK(v50 <= c2 / (50.0 * 50.0));
}

TEST_CASE("sharp cutoff sandwich") {
    CHECK_THROWS_AS(sharp_cutoff_sandwich(0.6), InvalidDelta);
    SandwichPair sw = sharp_cutoff_sandwich(0.1);
    CHECK(sw.outer.support_lo() == doctest::Approx(0.9));
    CHECK(sw.outer.support_hi() == doctest::Approx(1.6));
    CHECK(sw.inner.support_lo() == doctest::Approx(1.0));
    CHECK(sw.inner.support_hi() == doctest::Approx(1.5));
    // sandwich property: inner <= indicator of [1, 3/2] <= outer
    for (int i = 0; i <= 2000; ++i) {
        double x = 0.8 + 0.9 * i / 2000.0;
        double ind = (x > 1.0 && x <= 1.5) ? 1.0 : 0.0;
        CHECK(sw.inner(x) <= ind + 1e-12);
        CHECK(ind <= sw.outer(x) + 1e-12);
    }
    CHECK(sw.outer(1.0) == 1.0);
    CHECK(sw.outer(1.5) == 1.0);
    CHECK(sw.inner(1.0 + 0.1) == 1.0);
}

TEST_CASE("factorized fourier equals quadrature") {
    SmoothWeight w = make_bump(2.0, 0.5, 2.0);
    for (double t : {0.02, 0.7, 4.0, 33.0, 210.0}) {
        CHECK(std::abs(w.fourier(t) - w.fourier_direct(t)) < 1e-12);
        CHECK(std::abs(w.fourier(-t) - std::conj(w.fourier(t))) < 1e-13);
    }
}

TEST_CASE("sandwich counting check against a sieve") {
    // |#{X < p <= 3X/2} - sum_p W_outer(p/X)| <= #fringe primes
    const double X = 5000.0, delta = 0.1;
    SandwichPair sw = sharp_cutoff_sandwich(delta);
    ArithTables at = arith_tables(9000);
    double count = 0.0, smooth = 0.0, fringe = 0.0;
    for (int64_t p : at.primes) {
        double pd = static_cast<double>(p);
        if (pd > X && pd <= 1.5 * X) count += 1.0;
        smooth += sw.outer(pd / X);
        bool lo_fringe = pd > X * (1 - delta) && pd <= X;
        bool hi_fringe = pd > 1.5 * X && pd <= X * (1.5 + delta);
        if (lo_fringe || hi_fringe) fringe += 1.0;
    }
    CHECK(std::abs(count - smooth) <= fringe + 1e-9);
    CHECK(fringe > 0.0);
}

TEST_CASE("oscillation budget guard") {
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    CHECK_THROWS_AS(bessel_transform(w, 12, 1e13), OscillationBudgetExceeded);
    CHECK_THROWS_AS(bessel_transform(w, 7, 1.0), ParameterOutOfRange);
}

TEST_CASE("bessel J basics") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(11, 0.0) == 0.0);
    CHECK(bessel_j(0, 1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-13));
    CHECK(bessel_j(1, 1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-13));
    CHECK(bessel_j(0, 2.404825557695773) == doctest::Approx(0.0).epsilon(1e-10));
    // recurrence J_{v-1} + J_{v+1} = (2v/u) J_v across all three regimes
    for (double u = 0.1; u <= 100.0; u += 0.37) {
        for (int nu = 1; nu <= 12; ++nu) {
            double lhs = bessel_j(nu - 1, u) + bessel_j(nu + 1, u);
            double rhs = 2.0 * nu / u * bessel_j(nu, u);
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
    // |J_n| <= 1
    for (double u : {5.0, 20.0, 39.0, 41.0, 300.0}) CHECK(std::abs(bessel_j(11, u)) <= 1.0);
}

TEST_CASE("bessel transform of the standard bump") {
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    // k = 12: J_11(0) = 0 forces W~(0) = 0
    CHECK(bessel_transform(w, 12, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    // doubled-node oracle at y = 1
    double v1 = bessel_transform(w, 12, 1.0);
    QuadOptions opt;
    opt.tol = 1e-13;
    opt.init_panels = 64;
    double ref = 2.0 * std::numbers::pi *
                 integrate(
                     [&](double v) {
                         return 2.0 * v * w(v * v) *
                                bessel_j(11, 4.0 * std::numbers::pi * v);
                     },
                     std::sqrt(0.5), std::sqrt(2.0), opt);
    CHECK(v1 == doctest::Approx(ref).epsilon(1e-9));
    CHECK(std::abs(bessel_transform(w, 12, 100.0)) < std::abs(v1));
}

TEST_CASE("bessel transform table agrees with direct quadrature") {
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    BesselTransform bt(w, 12, 900.0);
    for (double y : {0.25, 1.0, 7.3, 55.0, 301.0, 880.0}) {
        CHECK(bt(y) == doctest::Approx(bessel_transform(w, 12, y)).epsilon(1e-8));
        CHECK(std::abs(bt(y)) <= bt.bound(y) * 1.0000001);
    }
    // envelope decays and stays valid beyond the table
    CHECK(bt.bound(1e6) < bt.bound(100.0));
    CHECK(bt.bound(1e6) < 1e-6);
}
