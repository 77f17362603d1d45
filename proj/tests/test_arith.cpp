#include <cmath>
#include <numbers>

#include "doctest.h"
#include "klab/arith.hpp"
#include "klab/errors.hpp"
#include "klab/summation.hpp"

using namespace klab;

TEST_CASE("primality") {
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK(is_prime(1009));
    CHECK(is_prime(100003));
    CHECK(is_prime(2147483647));  // 2^31 - 1
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(6));
    CHECK_FALSE(is_prime(3215031751));  // strong pseudoprime to 2,3,5,7
}

TEST_CASE("prime context construction") {
    CHECK_THROWS_AS(PrimeContext(6), CompositeModulus);

    PrimeContext two(2);
    CHECK(two.inv(1) == 1);

    PrimeContext ctx(7);
    CHECK(ctx.inv(3) == 5);  // extended-gcd oracle
    for (int64_t x = 1; x < 7; ++x) {
        CHECK(mod_inverse(x, 7) == ctx.inv(x));
        CHECK((x * ctx.inv(x)) % 7 == 1);
    }
    // dlog is a bijection 1..q-1 -> 0..q-2
    std::vector<bool> seen(6, false);
    for (int64_t n = 1; n < 7; ++n) {
        int64_t d = ctx.dlog(n);
        CHECK(d >= 0);
        CHECK(d < 6);
        CHECK_FALSE(seen[static_cast<std::size_t>(d)]);
        seen[static_cast<std::size_t>(d)] = true;
    }
}

TEST_CASE("kloosterman small values") {
    PrimeContext q2(2), q3(3), q5(5);
    CHECK(kloosterman_direct(1, q2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(kloosterman_direct(1, q3) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-12));
    // q=5, m=1: (2 cos(4 pi/5) + 2 cos(2 pi .. )) direct definitional value
    double expect = 0.0;
    for (int x = 1; x < 5; ++x) {
        int inv = 1;
        while ((x * inv) % 5 != 1) ++inv;
        expect += std::cos(2.0 * std::numbers::pi * (inv + x) / 5.0);
    }
    expect /= std::sqrt(5.0);
    CHECK(kloosterman_direct(1, q5) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(kloosterman_direct(1, q5) == doctest::Approx(0.170820393249937).epsilon(1e-9));
}

TEST_CASE("kloosterman realness against complex evaluation") {
    PrimeContext ctx(101);
    for (int64_t m : {1, 2, 50, 100}) {
        KahanSumComplex z;
        for (int64_t x = 1; x < 101; ++x) z.add(ctx.eq(ctx.inv(x) + m * x));
        CHECK(std::abs(z.value().imag()) < 1e-12);
        CHECK(kloosterman_direct(m, ctx) ==
              doctest::Approx(z.value().real() / std::sqrt(101.0)).epsilon(1e-10));
    }
}

TEST_CASE("fast table equals direct sums") {
    for (int64_t q : {5, 101, 1009}) {
        PrimeContext ctx(q);
        auto kl = kloosterman_all(ctx);
        double worst = 0.0;
        for (int64_t m = 0; m < q; ++m)
            worst = std::max(worst, std::abs(kl[static_cast<std::size_t>(m)] -
                                             kloosterman_direct(m, ctx)));
        CHECK(worst < 1e-10);
        // full-average vanishes: sum_m Kl(m;q) = 0
        KahanSum s;
        for (double v : kl) s.add(v);
        CHECK(std::abs(s.value()) < 1e-9);
    }
}

TEST_CASE("weil bound and product dependence") {
    for (int64_t q : {11, 97, 199}) {
        PrimeContext ctx(q);
        auto kl = kloosterman_all(ctx);
        for (int64_t m = 1; m < q; ++m)
            CHECK(std::abs(kl[static_cast<std::size_t>(m)]) <= 2.0 + 1e-9);
        // change of variable x -> tx: the twisted sum with coefficients (a, b)
        // equals Kl(ab; q); exhaustive over a for fixed b
        for (int64_t a = 1; a < q; ++a) {
            const int64_t b = 3 % q;
            KahanSum s;
            for (int64_t x = 1; x < q; ++x) s.add(ctx.eq_cos(a * x + b * ctx.inv(x)));
            double twisted = s.value() / std::sqrt(static_cast<double>(q));
            CHECK(twisted ==
                  doctest::Approx(kl[static_cast<std::size_t>((a * b) % q)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("arith tables") {
    ArithTables t = arith_tables(1000);
    CHECK(t.mangoldt[8] == doctest::Approx(std::log(2.0)));
    CHECK(t.mangoldt[6] == 0.0);
    CHECK(t.divisor[6] == 4);
    CHECK(t.moebius[30] == -1);
    CHECK(t.moebius[12] == 0);
    // sum_{d|n} mu(d) = [n=1] spot check by brute force
    for (int64_t n : {1, 2, 12, 360, 997}) {
        int64_t s = 0;
        for (int64_t d = 1; d <= n; ++d)
            if (n % d == 0) s += t.moebius[static_cast<std::size_t>(d)];
        CHECK(s == (n == 1 ? 1 : 0));
    }
    CHECK(t.primes.size() == 168);  // pi(1000)
}

TEST_CASE("dirichlet characters") {
    PrimeContext ctx(5);
    DirichletCharacter chi0 = character(ctx, 0);
    for (int64_t n = 1; n < 5; ++n) CHECK(std::abs(chi0(n) - cdouble(1, 0)) < 1e-12);

    // j=2 is the quadratic character: chi(2) = -1, chi(4) = 1
    DirichletCharacter chi2 = character(ctx, 2);
    CHECK(std::abs(chi2(2) - cdouble(-1, 0)) < 1e-12);
    CHECK(std::abs(chi2(4) - cdouble(1, 0)) < 1e-12);
    // Legendre oracle: chi2(n) = n^{(q-1)/2} mod q mapped to +-1
    for (int64_t n = 1; n < 5; ++n) {
        int64_t ls = mod_pow(n, 2, 5);
        double expect = (ls == 1) ? 1.0 : -1.0;
        CHECK(chi2(n).real() == doctest::Approx(expect).epsilon(1e-12));
    }

    // j=1 with g=2: chi(2) = i (order-4 character)
    CHECK(ctx.primitive_root() == 2);
    DirichletCharacter chi1 = character(ctx, 1);
    CHECK(std::abs(chi1(2) - cdouble(0, 1)) < 1e-12);

    CHECK_THROWS_AS(character(ctx, 4), IndexOutOfRange);

    // multiplicativity on a bigger modulus
    PrimeContext big(101);
    DirichletCharacter chi = character(big, 7);
    for (int64_t m : {2, 3, 50}) {
        for (int64_t n : {5, 7, 99}) {
            CHECK(std::abs(chi(m * n % 101) - chi(m) * chi(n)) < 1e-12);
        }
    }
    for (int64_t n = 1; n < 101; ++n) CHECK(std::abs(std::abs(chi(n)) - 1.0) < 1e-12);
}
