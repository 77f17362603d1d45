#include <cmath>

#include "doctest.h"
#include "klab/bilinear.hpp"
#include "klab/errors.hpp"
#include "klab/summation.hpp"

using namespace klab;

TEST_CASE("bilinear sharp single cells and representation-count oracle") {
    PrimeContext ctx(101);
    auto kl = kloosterman_all(ctx);

    for (int64_t m : {1, 7}) {
        for (int64_t n : {3, 90}) {
            BoundReport rep = bilinear_sharp(ctx, kl, m, m, n, n);
            CHECK(std::abs(rep.sum_value - cdouble(kl[(m * n) % 101], 0)) < 1e-12);
            CHECK(rep.magnitude() <= 2.0 + 1e-9);
        }
    }

    // full box against the multiplicative representation-count collapse
    BoundReport rep = bilinear_sharp(ctx, kl, 1, 100, 1, 100);
    std::vector<int64_t> count(101, 0);
    for (int64_t m = 1; m <= 100; ++m)
        for (int64_t n = 1; n <= 100; ++n) ++count[(m * n) % 101];
    KahanSum expect;
    for (int64_t t = 0; t < 101; ++t) expect.add(static_cast<double>(count[t]) * kl[t]);
    CHECK(rep.sum_value.real() == doctest::Approx(expect.value()).epsilon(1e-10));

    CHECK_THROWS_AS(bilinear_sharp(ctx, kl, 0, 5, 1, 5), RangeOutOfBounds);
    CHECK_THROWS_AS(bilinear_sharp(ctx, kl, 1, 101, 1, 5), RangeOutOfBounds);
}

TEST_CASE("row sums over a full period vanish") {
    // sum_{m mod q} Kl(mn;q) = 0 for (n,q) = 1, exhaustive over q <= 200
    double worst = 0.0;
    for (int64_t q = 2; q <= 200; ++q) {
        if (!is_prime(q)) continue;
        PrimeContext ctx(q);
        auto kl = kloosterman_all(ctx);
        for (int64_t n = 1; n < q; ++n) {
            KahanSum s;
            for (int64_t m = 0; m < q; ++m) s.add(kl[(m * n) % q]);
            worst = std::max(worst, std::abs(s.value()));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("bilinear smooth with tables-off oracle") {
    PrimeContext ctx(211);
    auto kl = kloosterman_all(ctx);
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);

    BoundReport rep = bilinear_smooth(ctx, kl, 1, w, w, 16.0, 16.0);
    // per-term direct evaluation without the table
    KahanSum expect;
    for (int64_t m = 8; m <= 32; ++m) {
        double wm = w(m / 16.0);
        if (wm == 0) continue;
        for (int64_t n = 8; n <= 32; ++n) {
            double wn = w(n / 16.0);
            if (wn == 0) continue;
            expect.add(wm * wn * kloosterman_direct(m * n, ctx));
        }
    }
    CHECK(rep.sum_value.real() == doctest::Approx(expect.value()).epsilon(1e-8));
    CHECK_THROWS_AS(bilinear_smooth(ctx, kl, 0, w, w, 16.0, 16.0), NotCoprime);

    // empty support when M < 1/4: no integer in [M/2, 2M]
    BoundReport empty = bilinear_smooth(ctx, kl, 1, w, w, 0.2, 16.0);
    CHECK(std::abs(empty.sum_value) == 0.0);
}

TEST_CASE("three-weight variant matches two-weight on a plateau cover") {
    PrimeContext ctx(211);
    auto kl = kloosterman_all(ctx);
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    // W3 == 1 on the reachable product range [MN/4, 4MN]
    const double M = 20.0, N = 20.0, Y = 400.0;
    SmoothWeight w3(1.0, 0.1, 8.0, 0.04);  // plateau [0.18, 7.92] covers [1/4, 4]
    BoundReport two = bilinear_smooth(ctx, kl, 1, w, w, M, N);
    BoundReport three = bilinear_smooth(ctx, kl, 1, w, w, M, N, &w3, Y);
    CHECK(three.sum_value.real() == doctest::Approx(two.sum_value.real()).epsilon(1e-12));

    // disjoint supports give an empty sum
    BoundReport empty = bilinear_smooth(ctx, kl, 1, w, w, M, N, &w3, 1e9);
    CHECK(std::abs(empty.sum_value) == 0.0);
}

TEST_CASE("type II sums") {
    PrimeContext ctx(1009);
    auto kl = kloosterman_all(ctx);

    SUBCASE("single point sequences") {
        CoefficientSeq a, b;
        a.scale = b.scale = 10;
        a.lo = a.hi = 10;
        b.lo = b.hi = 17;
        a.values = {cdouble(1, 0)};
        b.values = {cdouble(1, 0)};
        BoundReport rep = type_ii_sum(ctx, kl, a, b, nullptr, 0.0);
        CHECK(std::abs(rep.sum_value - cdouble(kl[170], 0)) < 1e-12);
        CHECK(rep.magnitude() <= 2.0 * a.l2_norm() * b.l2_norm() + 1e-9);
    }

    SUBCASE("beta sampled from a smooth weight recovers bilinear_smooth") {
        SmoothWeight w = make_bump(1.0, 0.5, 2.0);
        const double M = 16.0, N = 16.0;
        CoefficientSeq a, b;
        a.scale = b.scale = 16;
        a.lo = 8;
        a.hi = 32;
        b.lo = 8;
        b.hi = 32;
        a.values.resize(25);
        b.values.resize(25);
        for (int64_t m = 8; m <= 32; ++m) a.values[m - 8] = w(m / 16.0);
        for (int64_t n = 8; n <= 32; ++n) b.values[n - 8] = w(n / 16.0);
        BoundReport t2 = type_ii_sum(ctx, kl, a, b, nullptr, 0.0);
        BoundReport bs = bilinear_smooth(ctx, kl, 1, w, w, M, N);
        CHECK(t2.sum_value.real() == doctest::Approx(bs.sum_value.real()).epsilon(1e-11));
    }
}

TEST_CASE("envelope formulas recompute") {
    PrimeContext ctx(1009);
    auto kl = kloosterman_all(ctx);
    BoundReport rep = bilinear_sharp(ctx, kl, 1, 64, 1, 64);
    double rq = std::sqrt(1009.0);
    CHECK(rep.envelopes[0].second == doctest::Approx(rq + 64.0 * 64.0 / rq).epsilon(1e-14));
    // paper envelope in MN is minimized (2 sqrt(q)) at MN = q
    auto env = [&](double mn) { return rq + mn / rq; };
    CHECK(env(1009.0) == doctest::Approx(2.0 * rq));
    CHECK(env(1009.0) < env(2000.0));
}
