#include "klab/transforms.hpp"

#include <cmath>
#include <numbers>

#include "klab/errors.hpp"
#include "klab/summation.hpp"

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;
}

PeriodicFunction kloosterman_function(const PrimeContext& ctx, int64_t a) {
    const int64_t q = ctx.q();
    std::vector<double> kl = kloosterman_all(ctx);
    PeriodicFunction K;
    K.q = q;
    K.values.resize(static_cast<std::size_t>(q));
    int64_t ar = ctx.reduce(a);
    for (int64_t n = 0; n < q; ++n) {
        int64_t idx = static_cast<int64_t>((__int128)ar * n % q);
        K.values[static_cast<std::size_t>(n)] = kl[static_cast<std::size_t>(idx)];
    }
    return K;
}

PeriodicFunction fourier_transform(const PeriodicFunction& K) {
    PeriodicFunction out;
    out.q = K.q;
    out.values = dft(K.values, +1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(K.q));
    for (auto& v : out.values) v *= scale;
    return out;
}

PeriodicFunction fourier_transform_direct(const PeriodicFunction& K) {
    const int64_t q = K.q;
    PeriodicFunction out;
    out.q = q;
    out.values.assign(static_cast<std::size_t>(q), cdouble(0, 0));
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    for (int64_t h = 0; h < q; ++h) {
        KahanSumComplex acc;
        for (int64_t n = 0; n < q; ++n) {
            double ang = 2.0 * kPi * static_cast<double>((h * n) % q) / static_cast<double>(q);
            acc.add(K.values[static_cast<std::size_t>(n)] * cdouble(std::cos(ang), std::sin(ang)));
        }
        out.values[static_cast<std::size_t>(h)] = acc.value() * scale;
    }
    return out;
}

PeriodicFunction voronoi_transform(const PeriodicFunction& K, const PrimeContext& ctx) {
    if (K.q != ctx.q()) throw ParameterOutOfRange("voronoi_transform: modulus mismatch");
    PeriodicFunction hat = fourier_transform(K);
    // check K = positive-kernel transform of u -> hat K(u^{-1}), zero at u = 0
    PeriodicFunction twisted;
    twisted.q = K.q;
    twisted.values.assign(static_cast<std::size_t>(K.q), cdouble(0, 0));
    for (int64_t u = 1; u < K.q; ++u)
        twisted.values[static_cast<std::size_t>(u)] =
            hat.values[static_cast<std::size_t>(ctx.inv(u))];
    return fourier_transform(twisted);
}

double verify_kloosterman_lemma(const PrimeContext& ctx, int64_t a) {
    const int64_t q = ctx.q();
    int64_t ar = ctx.reduce(a);
    if (ar == 0) throw NotCoprime(a, q);
    PeriodicFunction K = kloosterman_function(ctx, ar);
    PeriodicFunction hat = fourier_transform(K);
    PeriodicFunction chk = voronoi_transform(K, ctx);

    double err = std::abs(hat.values[0]);
    const double rq = std::sqrt(static_cast<double>(q));
    for (int64_t h = 1; h < q; ++h) {
        // closed form: hat K(h) = e_q(-a hbar)
        cdouble expect = ctx.eq(-((__int128)ar * ctx.inv(h) % q));
        err = std::max(err, std::abs(hat.values[static_cast<std::size_t>(h)] - expect));
    }
    for (int64_t n = 0; n < q; ++n) {
        double expect = (n == ar) ? (q - 1) / rq : -1.0 / rq;
        err = std::max(err, std::abs(chk.values[static_cast<std::size_t>(n)] - expect));
    }
    return err;
}

namespace {

// sum_{|m| > T} bound(m) for a certified per-index envelope, split into an
// explicitly summed head and an integral-comparison remainder.
double lattice_tail(const std::function<double(double)>& bound, int64_t T, double scale_per_unit,
                    double decay_order, double decay_const) {
    // numeric part out to 4T (or T + 64), then integral comparison with the
    // pure power certificate beyond.
    int64_t H = std::max<int64_t>(4 * T, T + 64);
    KahanSum s;
    for (int64_t m = T + 1; m <= H; ++m) s.add(2.0 * bound(static_cast<double>(m)));
    // remainder: 2 * sum_{m > H} c |m s|^{-A} <= 2 c s^{-A} (H^{1-A}/(A-1) + H^{-A})
    double A = decay_order;
    double rem = 2.0 * decay_const * std::pow(scale_per_unit, -A) *
                 (std::pow(static_cast<double>(H), 1.0 - A) / (A - 1.0) +
                  std::pow(static_cast<double>(H), -A));
    return s.value() + rem;
}

}  // namespace

double tempered_voronoi_residual(const PeriodicFunction& K, const TestFunction2D& G,
                                 const TailPolicy& policy, const PrimeContext& ctx) {
    const int64_t q = ctx.q();
    if (K.q != q) throw ParameterOutOfRange("tempered_voronoi_residual: modulus mismatch");

    // ---- left side: direct double sum over the support box ----
    KahanSumComplex lhs;
    const int64_t mx_lo = static_cast<int64_t>(std::ceil(G.x_lo()));
    const int64_t mx_hi = static_cast<int64_t>(std::floor(G.x_hi()));
    const int64_t ny_lo = static_cast<int64_t>(std::ceil(G.y_lo()));
    const int64_t ny_hi = static_cast<int64_t>(std::floor(G.y_hi()));
    for (int64_t m = mx_lo; m <= mx_hi; ++m) {
        double wm = (*G.w1)(static_cast<double>(m) / G.M);
        if (wm == 0.0) continue;
        for (int64_t n = ny_lo; n <= ny_hi; ++n) {
            double wn = (*G.w2)(static_cast<double>(n) / G.N);
            if (wn == 0.0) continue;
            lhs.add(K.at(m * n) * (wm * wn));
        }
    }

    // ---- right side: transforms + quadrature ----
    PeriodicFunction hat = fourier_transform(K);
    PeriodicFunction chk = voronoi_transform(K, ctx);
    double sup_chk = 0.0;
    for (auto& v : chk.values) sup_chk = std::max(sup_chk, std::abs(v));

    // main term
    KahanSum gm, gn;
    for (int64_t m = mx_lo; m <= mx_hi; ++m) gm.add((*G.w1)(static_cast<double>(m) / G.M));
    for (int64_t n = ny_lo; n <= ny_hi; ++n) gn.add((*G.w2)(static_cast<double>(n) / G.N));
    cdouble rhs = hat.values[0] / std::sqrt(static_cast<double>(q)) * gm.value() * gn.value();

    // dual lattice truncation radii from the weight decay certificates
    const double dq = static_cast<double>(q);
    const double budget = 0.1 * policy.tol;
    auto bound_m = [&](double m) { return G.bound_u(m / dq); };
    auto bound_n = [&](double n) { return G.bound_v(n / dq); };

    // full-axis certified sums (head + remainder), used in the tail bookkeeping
    const int decay_j = std::min(6, G.w1->max_decay_order());
    auto axis_budgeted_radius = [&](const std::function<double(double)>& bnd, double scale,
                                    double dconst, double other_full) -> int64_t {
        int64_t T = 16;
        while (T <= policy.max_radius) {
            double tail = lattice_tail(bnd, T, scale, decay_j, dconst);
            if (tail * other_full * sup_chk / dq < 0.5 * budget) return T;
            T *= 2;
        }
        throw TruncationNotCertified("tempered_voronoi_residual: axis tail");
    };

    // certified full-axis totals
    auto axis_total = [&](const std::function<double(double)>& bnd, double scale,
                          double dconst) {
        KahanSum s;
        s.add(bnd(0.0));
        int64_t H = 1024;
        for (int64_t m = 1; m <= H; ++m) s.add(2.0 * bnd(static_cast<double>(m)));
        double A = decay_j;
        s.add(2.0 * dconst * std::pow(scale, -A) *
              (std::pow(static_cast<double>(H), 1.0 - A) / (A - 1.0) +
               std::pow(static_cast<double>(H), -A)));
        return s.value();
    };

    const double dconst_m = G.M * G.w1->deriv_l1(decay_j) / std::pow(2 * kPi, decay_j);
    const double dconst_n = G.N * G.w2->deriv_l1(decay_j) / std::pow(2 * kPi, decay_j);
    const double scale_m = G.M / dq;
    const double scale_n = G.N / dq;

    double full_m = axis_total(bound_m, scale_m, dconst_m);
    double full_n = axis_total(bound_n, scale_n, dconst_n);
    int64_t Tm = axis_budgeted_radius(bound_m, scale_m, dconst_m, full_n);
    int64_t Tn = axis_budgeted_radius(bound_n, scale_n, dconst_n, full_m);

    // cached 1D weight transforms
    std::vector<cdouble> wm_hat(static_cast<std::size_t>(Tm) + 1), wn_hat(static_cast<std::size_t>(Tn) + 1);
    for (int64_t m = 0; m <= Tm; ++m)
        wm_hat[static_cast<std::size_t>(m)] = G.M * G.w1->fourier(static_cast<double>(m) * G.M / dq);
    for (int64_t n = 0; n <= Tn; ++n)
        wn_hat[static_cast<std::size_t>(n)] = G.N * G.w2->fourier(static_cast<double>(n) * G.N / dq);

    KahanSumComplex dual;
    for (int64_t m = -Tm; m <= Tm; ++m) {
        cdouble am = (m >= 0) ? wm_hat[static_cast<std::size_t>(m)]
                              : std::conj(wm_hat[static_cast<std::size_t>(-m)]);
        if (std::abs(am) < 1e-22) continue;
        for (int64_t n = -Tn; n <= Tn; ++n) {
            cdouble an = (n >= 0) ? wn_hat[static_cast<std::size_t>(n)]
                                  : std::conj(wn_hat[static_cast<std::size_t>(-n)]);
            dual.add(chk.at(m * n) * am * an);
        }
    }
    rhs += dual.value() / dq;
    return std::abs(lhs.value() - rhs);
}

}  // namespace klab
