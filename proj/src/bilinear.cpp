#include "klab/bilinear.hpp"

#include <cmath>

#include "klab/errors.hpp"
#include "klab/summation.hpp"

namespace klab {

double CoefficientSeq::l2_norm() const {
    KahanSum s;
    for (const auto& v : values) s.add(std::norm(v));
    return std::sqrt(s.value());
}

BoundReport bilinear_sharp(const PrimeContext& ctx, const std::vector<double>& kl,
                           int64_t m_lo, int64_t m_hi, int64_t n_lo, int64_t n_hi) {
    const int64_t q = ctx.q();
    if (m_lo < 1 || n_lo < 1 || m_hi > q - 1 || n_hi > q - 1 || m_lo > m_hi || n_lo > n_hi)
        throw RangeOutOfBounds("bilinear_sharp: intervals must lie in [1, q-1]");
    KahanSum s;
    for (int64_t m = m_lo; m <= m_hi; ++m) {
        for (int64_t n = n_lo; n <= n_hi; ++n) {
            int64_t idx = static_cast<int64_t>((__int128)m * n % q);
            s.add(kl[static_cast<std::size_t>(idx)]);
        }
    }
    const double M = static_cast<double>(m_hi - m_lo + 1);
    const double N = static_cast<double>(n_hi - n_lo + 1);
    const double rq = std::sqrt(static_cast<double>(q));

    BoundReport rep;
    rep.experiment = "bilinear-sharp";
    rep.sum_value = s.value();
    rep.param("q", static_cast<double>(q));
    rep.param("m_lo", static_cast<double>(m_lo));
    rep.param("m_hi", static_cast<double>(m_hi));
    rep.param("n_lo", static_cast<double>(n_lo));
    rep.param("n_hi", static_cast<double>(n_hi));
    rep.param("M", M);
    rep.param("N", N);
    rep.envelope("predicted", rq + M * N / rq);
    return rep;
}

BoundReport bilinear_smooth(const PrimeContext& ctx, const std::vector<double>& kl, int64_t a,
                            const SmoothWeight& w1, const SmoothWeight& w2, double M, double N,
                            const SmoothWeight* w3, double Y) {
    const int64_t q = ctx.q();
    const int64_t ar = ctx.reduce(a);
    if (ar == 0) throw NotCoprime(a, q);
    if (w3 && Y < 1.0) throw ParameterOutOfRange("bilinear_smooth: Y >= 1 with three weights");

    BoundReport rep;
    rep.experiment = "bilinear-smooth";
    rep.param("q", static_cast<double>(q));
    rep.param("a", static_cast<double>(ar));
    rep.param("M", M);
    rep.param("N", N);
    double Q = std::max(w1.q_param(), w2.q_param());
    if (w3) {
        Q = std::max(Q, w3->q_param());
        rep.param("Y", Y);
    }
    rep.param("Q", Q);
    const double rq = std::sqrt(static_cast<double>(q));
    const double mn = M * N;
    rep.envelope("predicted", Q * Q * (rq + mn / rq));
    rep.envelope("q_eighth", mn * std::sqrt(1.0 + static_cast<double>(q) / mn) *
                             std::pow(static_cast<double>(q), -0.125));

    // three-weight support check: products live in [MN/4-ish, 4MN-ish]
    if (w3) {
        double plo = M * w1.support_lo() * N * w2.support_lo();
        double phi = M * w1.support_hi() * N * w2.support_hi();
        if (phi < Y * w3->support_lo() || plo > Y * w3->support_hi()) {
            rep.sum_value = 0.0;  // empty by support geometry
            return rep;
        }
    }

    const int64_t m_lo = static_cast<int64_t>(std::ceil(M * w1.support_lo()));
    const int64_t m_hi = static_cast<int64_t>(std::floor(M * w1.support_hi()));
    const int64_t n_lo = static_cast<int64_t>(std::ceil(N * w2.support_lo()));
    const int64_t n_hi = static_cast<int64_t>(std::floor(N * w2.support_hi()));
    KahanSum s;
    for (int64_t m = std::max<int64_t>(1, m_lo); m <= m_hi; ++m) {
        double wm = w1(static_cast<double>(m) / M);
        if (wm == 0.0) continue;
        for (int64_t n = std::max<int64_t>(1, n_lo); n <= n_hi; ++n) {
            double wn = w2(static_cast<double>(n) / N);
            if (wn == 0.0) continue;
            double wy = 1.0;
            if (w3) {
                wy = (*w3)(static_cast<double>(m) * static_cast<double>(n) / Y);
                if (wy == 0.0) continue;
            }
            int64_t idx = static_cast<int64_t>((__int128)(ar)*m % q * n % q);
            s.add(wm * wn * wy * kl[static_cast<std::size_t>(idx)]);
        }
    }
    rep.sum_value = s.value();
    return rep;
}

BoundReport type_ii_sum(const PrimeContext& ctx, const std::vector<double>& kl,
                        const CoefficientSeq& alpha, const CoefficientSeq& beta,
                        const SmoothWeight* w, double Y) {
    const int64_t q = ctx.q();
    if (alpha.lo < 1 || beta.lo < 1 || alpha.hi > q || beta.hi > q)
        throw RangeOutOfBounds("type_ii_sum: supports must lie in [1, q]");
    KahanSumComplex s;
    for (int64_t m = alpha.lo; m <= alpha.hi; ++m) {
        cdouble am = alpha.at(m);
        if (am == cdouble(0.0, 0.0)) continue;
        for (int64_t n = beta.lo; n <= beta.hi; ++n) {
            cdouble bn = beta.at(n);
            if (bn == cdouble(0.0, 0.0)) continue;
            double wy = 1.0;
            if (w) {
                wy = (*w)(static_cast<double>(m) * static_cast<double>(n) / Y);
                if (wy == 0.0) continue;
            }
            int64_t idx = static_cast<int64_t>((__int128)m * n % q);
            s.add(am * bn * (wy * kl[static_cast<std::size_t>(idx)]));
        }
    }
    const double M = static_cast<double>(alpha.scale);
    const double N = static_cast<double>(beta.scale);
    const double Q = w ? w->q_param() : 1.0;
    const double rq = std::sqrt(static_cast<double>(q));

    BoundReport rep;
    rep.experiment = "type-ii";
    rep.sum_value = s.value();
    rep.param("q", static_cast<double>(q));
    rep.param("M", M);
    rep.param("N", N);
    rep.param("Q", Q);
    if (w) rep.param("Y", Y);
    rep.param("alpha_l2", alpha.l2_norm());
    rep.param("beta_l2", beta.l2_norm());
    rep.envelope("type_ii", alpha.l2_norm() * beta.l2_norm() * std::sqrt(M * N) *
                                std::sqrt(1.0 / M + Q * rq / N));
    return rep;
}

}  // namespace klab
