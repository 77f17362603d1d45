#include "klab/moments.hpp"

#include <cmath>
#include <numbers>

#include "klab/errors.hpp"
#include "klab/parallel.hpp"
#include "klab/summation.hpp"

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kGammaQuarter = 3.6256099082219083119306851558676720030;        // Gamma(1/4)
constexpr double kGammaThreeQuarter = 1.2254167024651776451290983033628905268;   // Gamma(3/4)

const double kBern[7] = {1.0 / 6,   -1.0 / 30, 1.0 / 42,      -1.0 / 30,
                         5.0 / 66, -691.0 / 2730, 7.0 / 6};
}  // namespace

double hurwitz_zeta_half(double x) {
    if (!(x > 0.0) || x > 1.0 + 1e-12)
        throw ParameterOutOfRange("hurwitz_zeta_half: x in (0,1]");
    const double s = 0.5;
    const int K = 24, p = 6;
    KahanSum sum;
    for (int k = 0; k < K; ++k) sum.add(1.0 / std::sqrt(k + x));
    const double Kx = K + x;
    sum.add(-2.0 * std::sqrt(Kx));          // (K+x)^{1-s}/(s-1)
    sum.add(0.5 / std::sqrt(Kx));           // (K+x)^{-s}/2
    double rising = s;                      // prod_{i=0}^{2r-2} (s+i)
    double power = std::pow(Kx, -s - 1.0);  // (K+x)^{-s-2r+1} at r=1
    for (int r = 1; r <= p; ++r) {
        double fact = 1.0;
        for (int i = 2; i <= 2 * r; ++i) fact *= i;
        sum.add(kBern[r - 1] / fact * rising * power);
        rising *= (s + 2.0 * r - 1.0) * (s + 2.0 * r);
        power /= Kx * Kx;
    }
    // first omitted term certifies the remainder
    double fact = 1.0;
    for (int i = 2; i <= 2 * (p + 1); ++i) fact *= i;
    double rem = std::abs(kBern[p] / fact * rising * power);
    if (rem > 1e-12) throw ConvergenceFailure("hurwitz_zeta_half: remainder not certified");
    return sum.value();
}

namespace {
std::vector<double> hurwitz_table(const PrimeContext& ctx) {
    const int64_t q = ctx.q();
    std::vector<double> hz(static_cast<std::size_t>(q), 0.0);
    parallel_for_chunks(1, q, [&](int64_t lo, int64_t hi) {
        for (int64_t a = lo; a < hi; ++a)
            hz[static_cast<std::size_t>(a)] =
                hurwitz_zeta_half(static_cast<double>(a) / static_cast<double>(q));
    });
    return hz;
}

cdouble principal_l_half(const PrimeContext& ctx) {
    double zeta_half = hurwitz_zeta_half(1.0);
    return zeta_half * (1.0 - 1.0 / std::sqrt(static_cast<double>(ctx.q())));
}
}  // namespace

LValueRecord l_half_oracle(const PrimeContext& ctx, const DirichletCharacter& chi) {
    const int64_t q = ctx.q();
    LValueRecord rec;
    rec.q = q;
    rec.j = chi.j;
    rec.method = "oracle";
    if (chi.is_principal()) {
        rec.L_half = principal_l_half(ctx);
        return rec;
    }
    KahanSumComplex s;
    for (int64_t a = 1; a < q; ++a)
        s.add(chi.values[static_cast<std::size_t>(a)] *
              hurwitz_zeta_half(static_cast<double>(a) / static_cast<double>(q)));
    rec.L_half = s.value() / std::sqrt(static_cast<double>(q));
    return rec;
}

namespace {
// h_c(n) = int_1^inf e^{-pi n^2 t / q} t^{c-1} dt via t = e^u substitution
double theta_kernel(double a, double c) {
    double U = std::log(std::max(60.0 / a, 4.0));
    QuadOptions opt;
    opt.tol = 1e-14;
    opt.init_panels = 8 + static_cast<int>(2.0 * U);
    return integrate([a, c](double u) { return std::exp(-a * std::exp(u) + c * u); }, 0.0,
                     U, opt);
}

struct AfeKernels {
    std::vector<double> weight;  // per n: h(n) (even) or n * h1(n) (odd)
    double norm;
    int64_t n_cut;
    double tail_bound;
};

AfeKernels afe_kernels(const PrimeContext& ctx, bool even) {
    const int64_t q = ctx.q();
    const double c = even ? 0.25 : 0.75;
    AfeKernels K;
    K.n_cut = static_cast<int64_t>(std::ceil(std::sqrt(45.0 * q / kPi))) + 1;
    K.weight.assign(static_cast<std::size_t>(K.n_cut) + 1, 0.0);
    for (int64_t n = 1; n <= K.n_cut; ++n) {
        double a = kPi * static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(q);
        double h = theta_kernel(a, c);
        K.weight[static_cast<std::size_t>(n)] = even ? h : static_cast<double>(n) * h;
    }
    K.norm = even ? std::pow(static_cast<double>(q) / kPi, 0.25) * kGammaQuarter
                  : std::pow(static_cast<double>(q) / kPi, 0.75) * kGammaThreeQuarter;
    // geometric tail certificate: terms n^w e^{-pi n^2/q} / a
    int64_t n0 = K.n_cut;
    double a0 = kPi * static_cast<double>(n0 + 1) * static_cast<double>(n0 + 1) /
                static_cast<double>(q);
    double t0 = static_cast<double>(n0 + 1) * std::exp(-a0) / a0;
    double ratio = std::exp(-kPi * (2.0 * n0 + 3.0) / static_cast<double>(q)) * 2.0;
    K.tail_bound = (ratio < 1.0) ? t0 / (1.0 - ratio) : 1e300;
    if (K.tail_bound > 1e-12)
        throw ConvergenceFailure("afe_kernels: tail not certified");
    return K;
}
}  // namespace

LValueRecord l_half_afe(const PrimeContext& ctx, const DirichletCharacter& chi) {
    const int64_t q = ctx.q();
    if (chi.is_principal())
        throw ParameterOutOfRange("l_half_afe: principal character not covered");
    LValueRecord rec;
    rec.q = q;
    rec.j = chi.j;
    rec.method = "afe";

    const bool even = chi.is_even();
    AfeKernels K = afe_kernels(ctx, even);

    // Gauss sum and root number
    KahanSumComplex gs;
    for (int64_t b = 1; b < q; ++b)
        gs.add(chi.values[static_cast<std::size_t>(b)] * ctx.eq(b));
    cdouble tau = gs.value();
    double rq = std::sqrt(static_cast<double>(q));
    if (std::abs(std::abs(tau) - rq) > 1e-6 * rq)
        throw GaussSumDegenerate("l_half_afe: |tau| != sqrt(q)");
    cdouble eps = even ? tau / rq : tau / (cdouble(0.0, 1.0) * rq);

    KahanSumComplex main, dual;
    for (int64_t n = 1; n <= K.n_cut; ++n) {
        cdouble chin = chi(n);
        if (chin == cdouble(0.0, 0.0)) continue;
        double wn = K.weight[static_cast<std::size_t>(n)];
        main.add(chin * wn);
        dual.add(std::conj(chin) * wn);
    }
    rec.L_half = (main.value() + eps * dual.value()) / K.norm;
    return rec;
}

namespace {
// values indexed by character j via one positive-kernel transform of the
// dlog-ordered sequence
std::vector<cdouble> group_transform(const PrimeContext& ctx, const std::vector<cdouble>& by_residue) {
    const int64_t q = ctx.q();
    std::vector<cdouble> u(static_cast<std::size_t>(q - 1));
    int64_t pw = 1;
    for (int64_t k = 0; k < q - 1; ++k) {
        u[static_cast<std::size_t>(k)] = by_residue[static_cast<std::size_t>(pw)];
        pw = static_cast<int64_t>((__int128)pw * ctx.primitive_root() % q);
    }
    return dft(u, +1);
}
}  // namespace

std::vector<cdouble> l_half_all_oracle(const PrimeContext& ctx) {
    const int64_t q = ctx.q();
    std::vector<double> hz = hurwitz_table(ctx);
    std::vector<cdouble> by_res(static_cast<std::size_t>(q));
    for (int64_t a = 1; a < q; ++a) by_res[static_cast<std::size_t>(a)] = hz[static_cast<std::size_t>(a)];
    std::vector<cdouble> out = group_transform(ctx, by_res);
    const double rq = std::sqrt(static_cast<double>(q));
    for (auto& v : out) v /= rq;
    out[0] = principal_l_half(ctx);
    return out;
}

std::vector<cdouble> l_half_all_afe(const PrimeContext& ctx) {
    const int64_t q = ctx.q();
    AfeKernels Ke = afe_kernels(ctx, true);
    AfeKernels Ko = afe_kernels(ctx, false);

    std::vector<cdouble> res_e(static_cast<std::size_t>(q), 0.0), res_o(static_cast<std::size_t>(q), 0.0);
    for (int64_t n = 1; n <= Ke.n_cut; ++n)
        res_e[static_cast<std::size_t>(n % q)] += Ke.weight[static_cast<std::size_t>(n)];
    for (int64_t n = 1; n <= Ko.n_cut; ++n)
        res_o[static_cast<std::size_t>(n % q)] += Ko.weight[static_cast<std::size_t>(n)];
    std::vector<cdouble> Se = group_transform(ctx, res_e);
    std::vector<cdouble> So = group_transform(ctx, res_o);

    // Gauss sums for all characters via the same transform of e_q(.)
    std::vector<cdouble> eq_res(static_cast<std::size_t>(q));
    for (int64_t b = 1; b < q; ++b) eq_res[static_cast<std::size_t>(b)] = ctx.eq(b);
    std::vector<cdouble> taus = group_transform(ctx, eq_res);

    const double rq = std::sqrt(static_cast<double>(q));
    const int64_t order = q - 1;
    std::vector<cdouble> out(static_cast<std::size_t>(order));
    out[0] = principal_l_half(ctx);
    for (int64_t j = 1; j < order; ++j) {
        // chi_j(-1): -1 = g^{(q-1)/2}, so parity from j * (q-1)/2 mod (q-1)
        bool even = (j % 2 == 0);
        const AfeKernels& K = even ? Ke : Ko;
        cdouble main = even ? Se[static_cast<std::size_t>(j)] : So[static_cast<std::size_t>(j)];
        cdouble dual = even ? Se[static_cast<std::size_t>(order - j)] : So[static_cast<std::size_t>(order - j)];
        cdouble tau = taus[static_cast<std::size_t>(j)];
        cdouble eps = even ? tau / rq : tau / (cdouble(0.0, 1.0) * rq);
        out[static_cast<std::size_t>(j)] = (main + eps * dual) / K.norm;
    }
    return out;
}

double fourth_moment(const PrimeContext& ctx) {
    std::vector<cdouble> ls = l_half_all_oracle(ctx);
    KahanSum s;
    for (const auto& v : ls) {
        double m2 = std::norm(v);
        s.add(m2 * m2);
    }
    return s.value() / static_cast<double>(ctx.q() - 1);
}

double fourth_moment_direct(const PrimeContext& ctx) {
    const int64_t q = ctx.q();
    KahanSum s;
    for (int64_t j = 0; j < q - 1; ++j) {
        DirichletCharacter chi = character(ctx, j);
        double m2 = std::norm(l_half_oracle(ctx, chi).L_half);
        s.add(m2 * m2);
    }
    return s.value() / static_cast<double>(q - 1);
}

MomentSeries moment_series(int64_t q_lo, int64_t q_hi) {
    MomentSeries ser;
    for (int64_t q = q_lo; q <= q_hi; ++q)
        if (is_prime(q)) ser.q.push_back(q);
    ser.moment.assign(ser.q.size(), 0.0);
    parallel_for_chunks(0, static_cast<int64_t>(ser.q.size()), [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) {
            PrimeContext ctx(ser.q[static_cast<std::size_t>(i)]);
            ser.moment[static_cast<std::size_t>(i)] = fourth_moment(ctx);
        }
    });
    fit_degree4(ser);
    return ser;
}

void fit_degree4(MomentSeries& ser) {
    // least squares in the basis {1, L, .., L^4}; 5x5 normal equations
    long double ata[5][5] = {};
    long double atb[5] = {};
    for (std::size_t i = 0; i < ser.q.size(); ++i) {
        long double L = std::log(static_cast<long double>(ser.q[i]));
        long double basis[5] = {1.0L, L, L * L, L * L * L, L * L * L * L};
        for (int r = 0; r < 5; ++r) {
            atb[r] += basis[r] * static_cast<long double>(ser.moment[i]);
            for (int c = 0; c < 5; ++c) ata[r][c] += basis[r] * basis[c];
        }
    }
    // Gaussian elimination with partial pivoting
    for (int c = 0; c < 5; ++c) {
        int best = c;
        for (int r = c + 1; r < 5; ++r)
            if (std::abs(static_cast<double>(ata[r][c])) >
                std::abs(static_cast<double>(ata[best][c])))
                best = r;
        std::swap(ata[c], ata[best]);
        std::swap(atb[c], atb[best]);
        for (int r = c + 1; r < 5; ++r) {
            long double f = ata[r][c] / ata[c][c];
            for (int k = c; k < 5; ++k) ata[r][k] -= f * ata[c][k];
            atb[r] -= f * atb[c];
        }
    }
    for (int r = 4; r >= 0; --r) {
        long double v = atb[r];
        for (int k = r + 1; k < 5; ++k) v -= ata[r][k] * static_cast<long double>(ser.fit[static_cast<std::size_t>(k)]);
        ser.fit[static_cast<std::size_t>(r)] = static_cast<double>(v / ata[r][r]);
    }
    long double ss = 0.0L;
    for (std::size_t i = 0; i < ser.q.size(); ++i) {
        long double L = std::log(static_cast<long double>(ser.q[i]));
        long double pred = 0.0L, pw = 1.0L;
        for (int k = 0; k < 5; ++k) {
            pred += ser.fit[static_cast<std::size_t>(k)] * pw;
            pw *= L;
        }
        long double r = static_cast<long double>(ser.moment[i]) - pred;
        ss += r * r;
    }
    ser.fit_rms = ser.q.empty() ? 0.0
                                : std::sqrt(static_cast<double>(ss) /
                                            static_cast<double>(ser.q.size()));
}

cdouble shifted_convolution(const PrimeContext& ctx, const SmoothWeight& w1,
                            const SmoothWeight& w2, double M, double N, int sign,
                            const ArithTables& at) {
    if (sign != 1 && sign != -1)
        throw ParameterOutOfRange("shifted_convolution: sign must be +-1");
    const int64_t q = ctx.q();
    const int64_t m_lo = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(M * w1.support_lo())));
    const int64_t m_hi = static_cast<int64_t>(std::floor(M * w1.support_hi()));
    const int64_t n_lo = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(N * w2.support_lo())));
    const int64_t n_hi = static_cast<int64_t>(std::floor(N * w2.support_hi()));
    if (m_hi > at.n_max || n_hi > at.n_max)
        throw ParameterOutOfRange("shifted_convolution: divisor table too short");

    KahanSum cong, full_m, full_n;
    for (int64_t m = m_lo; m <= m_hi; ++m) {
        double wm = w1(static_cast<double>(m) / M) * static_cast<double>(at.divisor[static_cast<std::size_t>(m)]);
        if (wm == 0.0) continue;
        full_m.add(wm);
        // n = sign * m (mod q)
        int64_t r = (sign == 1) ? m % q : (q - m % q) % q;
        int64_t start = n_lo + ((r - n_lo) % q + q) % q;
        for (int64_t n = start; n <= n_hi; n += q) {
            if (n == m) continue;
            double wn = w2(static_cast<double>(n) / N) *
                        static_cast<double>(at.divisor[static_cast<std::size_t>(n)]);
            cong.add(wm * wn);
        }
    }
    for (int64_t n = n_lo; n <= n_hi; ++n)
        full_n.add(w2(static_cast<double>(n) / N) *
                   static_cast<double>(at.divisor[static_cast<std::size_t>(n)]));

    const double root_mn = std::sqrt(M * N);
    double val = cong.value() / root_mn -
                 full_m.value() * full_n.value() / (static_cast<double>(q) * root_mn);
    return {val, 0.0};
}

BoundReport quadrilinear_sum(const PrimeContext& ctx, const std::vector<double>& kl,
                             const std::array<const SmoothWeight*, 4>& w,
                             const std::array<double, 4>& M, int sign) {
    if (sign != 1 && sign != -1)
        throw ParameterOutOfRange("quadrilinear_sum: sign must be +-1");
    for (int i = 0; i < 3; ++i)
        if (M[static_cast<std::size_t>(i)] > M[static_cast<std::size_t>(i + 1)] + 1e-12)
            throw ParameterOutOfRange("quadrilinear_sum: M1 <= M2 <= M3 <= M4");
    const int64_t q = ctx.q();

    auto collapse_pair = [&](int i, int j, std::vector<double>& coeffs) {
        // coeffs[t] = sum_{mi mj = t} Wi(mi/Mi) Wj(mj/Mj)
        int64_t ihi = static_cast<int64_t>(std::floor(M[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)]->support_hi()));
        int64_t jhi = static_cast<int64_t>(std::floor(M[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)]->support_hi()));
        coeffs.assign(static_cast<std::size_t>(ihi * jhi) + 1, 0.0);
        for (int64_t mi = 1; mi <= ihi; ++mi) {
            double wi = (*w[static_cast<std::size_t>(i)])(static_cast<double>(mi) / M[static_cast<std::size_t>(i)]);
            if (wi == 0.0) continue;
            for (int64_t mj = 1; mj <= jhi; ++mj) {
                double wj = (*w[static_cast<std::size_t>(j)])(static_cast<double>(mj) / M[static_cast<std::size_t>(j)]);
                if (wj == 0.0) continue;
                coeffs[static_cast<std::size_t>(mi * mj)] += wi * wj;
            }
        }
    };

    std::vector<double> c12, c34;
    collapse_pair(0, 1, c12);
    collapse_pair(2, 3, c34);
    std::vector<double> R1(static_cast<std::size_t>(q), 0.0), R2(static_cast<std::size_t>(q), 0.0);
    for (std::size_t t = 1; t < c12.size(); ++t)
        if (c12[t] != 0.0) R1[t % static_cast<std::size_t>(q)] += c12[t];
    for (std::size_t t = 1; t < c34.size(); ++t)
        if (c34[t] != 0.0) R2[t % static_cast<std::size_t>(q)] += c34[t];

    KahanSum s;
    for (int64_t r1 = 0; r1 < q; ++r1) {
        if (R1[static_cast<std::size_t>(r1)] == 0.0) continue;
        for (int64_t r2 = 0; r2 < q; ++r2) {
            if (R2[static_cast<std::size_t>(r2)] == 0.0) continue;
            int64_t u = static_cast<int64_t>((__int128)r1 * r2 % q);
            if (sign == -1) u = (q - u) % q;
            s.add(R1[static_cast<std::size_t>(r1)] * R2[static_cast<std::size_t>(r2)] *
                  kl[static_cast<std::size_t>(u)]);
        }
    }
    const double Mprod = M[0] * M[1];
    const double Nprod = M[2] * M[3];
    const double norm = std::sqrt(static_cast<double>(q) * Mprod * Nprod);

    BoundReport rep;
    rep.experiment = "quadrilinear";
    rep.sum_value = s.value() / norm;
    rep.param("q", static_cast<double>(q));
    for (int i = 0; i < 4; ++i)
        rep.param("M" + std::to_string(i + 1), M[static_cast<std::size_t>(i)]);
    rep.param("sign", static_cast<double>(sign));

    double Qmax = 1.0;
    for (const auto* wp : w) Qmax = std::max(Qmax, wp->q_param());
    const double rq = std::sqrt(static_cast<double>(q));

    // strategy 1: smooth bilinear bound on (m3, m4) with (m1, m2) trivial
    KahanSum s1, s2;
    for (int64_t m = 1; m <= static_cast<int64_t>(std::floor(M[0] * w[0]->support_hi())); ++m)
        s1.add((*w[0])(static_cast<double>(m) / M[0]));
    for (int64_t m = 1; m <= static_cast<int64_t>(std::floor(M[1] * w[1]->support_hi())); ++m)
        s2.add((*w[1])(static_cast<double>(m) / M[1]));
    double env1 = s1.value() * s2.value() * Qmax * Qmax * (rq + M[2] * M[3] / rq) / norm;
    rep.envelope("smooth_route", env1);

    // strategy 2: type-II with alpha on m4, beta the m1 m2 m3 collapse
    std::vector<double> c123;
    {
        int64_t c12hi = static_cast<int64_t>(c12.size()) - 1;
        int64_t m3hi = static_cast<int64_t>(std::floor(M[2] * w[2]->support_hi()));
        c123.assign(static_cast<std::size_t>(c12hi * m3hi) + 1, 0.0);
        for (std::size_t t = 1; t < c12.size(); ++t) {
            if (c12[t] == 0.0) continue;
            for (int64_t m3 = 1; m3 <= m3hi; ++m3) {
                double w3 = (*w[2])(static_cast<double>(m3) / M[2]);
                if (w3 != 0.0) c123[t * static_cast<std::size_t>(m3)] += c12[t] * w3;
            }
        }
    }
    KahanSum a2, b2;
    for (int64_t m = 1; m <= static_cast<int64_t>(std::floor(M[3] * w[3]->support_hi())); ++m) {
        double v = (*w[3])(static_cast<double>(m) / M[3]);
        a2.add(v * v);
    }
    for (double v : c123) b2.add(v * v);
    double MM = M[3], NN = M[0] * M[1] * M[2];
    double env2 = std::sqrt(a2.value()) * std::sqrt(b2.value()) * std::sqrt(MM * NN) *
                  std::sqrt(1.0 / MM + Qmax * rq / NN) / norm;
    rep.envelope("typeii_route", env2);
    rep.envelope("best", std::min(env1, env2));
    return rep;
}

MomentCertificate moment_exponent_certificate(double eta, double grid_step, bool tightened) {
    if (!(eta > 0.0) || eta > 1.0 / 8.0 + 1e-12)
        throw ParameterOutOfRange("moment_exponent_certificate: eta in (0, 1/8]");
    if (grid_step > 1.0 / 40.0 + 1e-12)
        throw GridTooCoarse("moment_exponent_certificate: grid step must be <= 1/40");
    const int U = static_cast<int>(std::lround(1.0 / grid_step));
    const double B = tightened ? 2.0 : 4.0;

    auto worst_for = [&](double e) {
        const int sum_lo = static_cast<int>(std::ceil((1.0 - 2.0 * e) * U - 1e-9));
        const int sum_hi = static_cast<int>(std::floor((1.0 + B * e) * U + 1e-9));
        const int gap_hi = static_cast<int>(std::floor(2.0 * e * U + 1e-9));
        double worst = 1e300;
        for (int u1 = 0; u1 <= sum_hi; ++u1)
            for (int u2 = u1; u1 + u2 <= sum_hi; ++u2)
                for (int u3 = u2; u1 + u2 + u3 <= sum_hi; ++u3)
                    for (int u4 = u3; u1 + u2 + u3 + u4 <= sum_hi; ++u4) {
                        int total = u1 + u2 + u3 + u4;
                        if (total < sum_lo) continue;
                        int gap = (u3 + u4) - (u1 + u2);
                        if (gap < 0 || gap > gap_hi) continue;
                        double m1 = -e - (static_cast<double>(u1 + u2 + u3) / U - 1.0) / 2.0;
                        double m2 = -e - (-0.25 + static_cast<double>(u4) / (2.0 * U));
                        worst = std::min(worst, std::min(m1, m2));
                    }
        return worst;
    };

    MomentCertificate cert;
    cert.eta = eta;
    cert.tightened = tightened;
    cert.worst_margin = worst_for(eta);
    cert.pass = cert.worst_margin >= -1e-9;
    for (int k = 1; k <= 2 * U / 10; ++k) {
        double e = static_cast<double>(k) / (2.0 * U);
        if (worst_for(e) >= -1e-9) cert.largest_passing_eta = e;
    }
    return cert;
}

}  // namespace klab
