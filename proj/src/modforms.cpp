#include "klab/modforms.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <numbers>

#include "klab/errors.hpp"
#include "klab/parallel.hpp"
#include "klab/summation.hpp"

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;
// 12 * (6e6)^{5.5} stays inside 127 bits; the |lambda| <= 12 check below turns
// any wrap into a loud failure (observed |lambda(n)| stays below ~4, and a
// mod-2^128 wrap lands at |lambda| ~ 2^128/n^{5.5} >> 12).
constexpr int64_t kTauHardCap = 6'000'000;

// Jacobi: prod (1-q^n)^3 = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}
struct SparseCube {
    std::vector<int64_t> offset;
    std::vector<int64_t> coeff;
};

SparseCube jacobi_cube(int64_t len) {
    SparseCube s;
    for (int64_t k = 0;; ++k) {
        int64_t t = k * (k + 1) / 2;
        if (t >= len) break;
        s.offset.push_back(t);
        s.coeff.push_back((k % 2 == 0 ? 1 : -1) * (2 * k + 1));
    }
    return s;
}

// Accumulation runs in unsigned (wraparound) arithmetic: partial sums may
// transiently exceed 127 bits, but the pass outputs are eta-power
// coefficients far inside the representable range, so the mod-2^128 result
// is exact.
void sparse_multiply(const std::vector<int128>& in, const SparseCube& s,
                     std::vector<int128>& out) {
    const int64_t len = static_cast<int64_t>(in.size());
    using u128 = unsigned __int128;
    parallel_for_chunks(0, len, [&](int64_t lo, int64_t hi) {
        for (int64_t n = lo; n < hi; ++n) {
            u128 acc = 0;
            for (std::size_t i = 0; i < s.offset.size(); ++i) {
                int64_t t = s.offset[i];
                if (t > n) break;
                u128 prev = static_cast<u128>(in[static_cast<std::size_t>(n - t)]);
                int64_t c = s.coeff[i];
                if (c >= 0)
                    acc += prev * static_cast<u128>(c);
                else
                    acc -= prev * static_cast<u128>(-c);
            }
            out[static_cast<std::size_t>(n)] = static_cast<int128>(acc);
        }
    });
}
}  // namespace

HeckeData delta_coefficients(int64_t n_max) {
    if (n_max < 1) throw ParameterOutOfRange("delta_coefficients: n_max >= 1");
    if (n_max > kTauHardCap)
        throw OverflowError("delta_coefficients: tau exceeds 128-bit range beyond n ~ 4e6");
    HeckeData hd;
    hd.n_max = n_max;
    const int64_t len = n_max;  // coefficients of q^0 .. q^{n_max-1} of Delta/q
    SparseCube cube = jacobi_cube(len);
    std::vector<int128> acc(static_cast<std::size_t>(len), 0);
    for (std::size_t i = 0; i < cube.offset.size(); ++i)
        acc[static_cast<std::size_t>(cube.offset[i])] = cube.coeff[i];
    std::vector<int128> tmp(static_cast<std::size_t>(len));
    for (int pass = 0; pass < 7; ++pass) {  // cube^8
        sparse_multiply(acc, cube, tmp);
        std::swap(acc, tmp);
    }
    hd.tau.assign(static_cast<std::size_t>(n_max) + 1, 0);
    hd.lambda.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int64_t n = 1; n <= n_max; ++n) {
        int128 t = acc[static_cast<std::size_t>(n - 1)];
        hd.tau[static_cast<std::size_t>(n)] = t;
        double lam = static_cast<double>(t) / std::pow(static_cast<double>(n), 5.5);
        if (n > 100 && std::abs(lam) > 12.0)
            throw OverflowError("delta_coefficients: coefficient wrap detected");
        hd.lambda[static_cast<std::size_t>(n)] = lam;
    }
    return hd;
}

std::string int128_to_string(int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

void write_tau_cache(const std::string& path, const HeckeData& hd) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error("write_tau_cache: cannot open " + path);
    std::fwrite("TAU1", 1, 4, f);
    uint64_t n = static_cast<uint64_t>(hd.n_max);
    std::fwrite(&n, 8, 1, f);
    for (int64_t i = 1; i <= hd.n_max; ++i) {
        unsigned char buf[16];
        unsigned __int128 u = static_cast<unsigned __int128>(hd.tau[static_cast<std::size_t>(i)]);
        for (int b = 0; b < 16; ++b) buf[b] = static_cast<unsigned char>(u >> (8 * b));
        std::fwrite(buf, 1, 16, f);
    }
    std::fclose(f);
}

bool read_tau_cache(const std::string& path, HeckeData& hd) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return false;
    char magic[4];
    uint64_t n = 0;
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "TAU1", 4) != 0 ||
        std::fread(&n, 8, 1, f) != 1) {
        std::fclose(f);
        return false;
    }
    hd.n_max = static_cast<int64_t>(n);
    hd.tau.assign(static_cast<std::size_t>(n) + 1, 0);
    hd.lambda.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (uint64_t i = 1; i <= n; ++i) {
        unsigned char buf[16];
        if (std::fread(buf, 1, 16, f) != 16) {
            std::fclose(f);
            return false;
        }
        unsigned __int128 u = 0;
        for (int b = 15; b >= 0; --b) u = (u << 8) | buf[b];
        int128 t = static_cast<int128>(u);
        hd.tau[i] = t;
        hd.lambda[i] = static_cast<double>(t) / std::pow(static_cast<double>(i), 5.5);
    }
    std::fclose(f);
    return true;
}

HeckeData delta_coefficients_cached(int64_t n_max, const std::string& dir) {
    std::string cache_dir = dir;
    if (cache_dir.empty()) {
        const char* env = std::getenv("KLAB_CACHE_DIR");
        if (env) cache_dir = env;
    }
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        std::string path = cache_dir + "/tau.bin";
        HeckeData hd;
        if (read_tau_cache(path, hd) && hd.n_max >= n_max) return hd;
        hd = delta_coefficients(n_max);
        write_tau_cache(path, hd);
        return hd;
    }
    return delta_coefficients(n_max);
}

DualTailPlan plan_dual_tail(double coef_full, double coef_arith, int64_t q, int64_t residue,
                            double kappa, const BesselTransform& wt,
                            const std::vector<int32_t>& div, double budget) {
    const double y_ver = wt.y_max();
    const int64_t n_ver = static_cast<int64_t>(std::floor(y_ver / kappa));
    if (n_ver > static_cast<int64_t>(div.size()) - 1)
        throw TailNotCertified("plan_dual_tail: divisor table shorter than verification range");

    // beyond the table: dyadic blocks against the best power branch
    double C = 0.0;
    double A = wt.tail_exponent(0.98 * y_ver, C);
    if (A <= 2.5)
        throw TailNotCertified("plan_dual_tail: no decaying branch beyond table");
    auto f = [&](double x) { return C * std::pow(kappa * x, -A); };
    double rem = 0.0;
    {
        double x1 = static_cast<double>(n_ver);
        for (int k = 0; k < 500; ++k) {
            double x2 = 2.0 * x1;
            double d_full = x2 * (std::log(x2) + 1.0);
            double d_ap = x2 * (std::log(x2) + 2.0) / static_cast<double>(q) +
                          2.0 * std::sqrt(x2);
            double t = f(x1) * (coef_full * d_full + coef_arith * d_ap);
            rem += t;
            if (t < 1e-12 * std::max(rem, budget)) {
                rem += t * std::pow(2.0, 2.2 - A) / (1.0 - std::pow(2.0, 2.2 - A));
                break;
            }
            x1 = x2;
        }
    }
    if (rem >= 0.5 * budget)
        throw TailNotCertified("plan_dual_tail: table range too short for budget");

    double acc = rem;
    int64_t n = n_ver;
    for (; n >= 1; --n) {
        double b = wt.bound(kappa * static_cast<double>(n));
        double dn = static_cast<double>(div[static_cast<std::size_t>(n)]);
        double term = coef_full * dn * b;
        if (coef_arith > 0.0 && n % q == residue) term += coef_arith * dn * b;
        if (acc + term >= budget) break;
        acc += term;
    }
    DualTailPlan plan;
    plan.t_eval = n;
    plan.tail_bound = acc;
    return plan;
}

namespace {
// LHS sum over the weight support; Kl values from the fast table.
double cusp_lhs(const HeckeData& hd, const PrimeContext& ctx, int64_t a,
                const SmoothWeight& w, double N, const std::vector<double>& kl) {
    const int64_t q = ctx.q();
    int64_t lo = static_cast<int64_t>(std::ceil(N * w.support_lo()));
    int64_t hi = static_cast<int64_t>(std::floor(N * w.support_hi()));
    if (hi > hd.n_max) throw TailNotCertified("cusp sum: lambda table too short for LHS");
    KahanSum s;
    for (int64_t n = std::max<int64_t>(1, lo); n <= hi; ++n) {
        int64_t idx = static_cast<int64_t>((__int128)ctx.reduce(a) * n % q);
        s.add(hd.lam(n) * kl[static_cast<std::size_t>(idx)] * w(static_cast<double>(n) / N));
    }
    return s.value();
}
}  // namespace

double cusp_voronoi_residual(const HeckeData& hd, const PrimeContext& ctx, int64_t a,
                             const SmoothWeight& w, double N, const BesselTransform& wt,
                             const std::vector<int32_t>& div, double tol) {
    const int64_t q = ctx.q();
    const int64_t ar = ctx.reduce(a);
    if (ar == 0) throw NotCoprime(a, q);
    if (N < 1.0) throw ParameterOutOfRange("cusp_voronoi_residual: N >= 1");

    std::vector<double> kl = kloosterman_all(ctx);
    const double lhs = cusp_lhs(hd, ctx, ar, w, N, kl);

    const double rq = std::sqrt(static_cast<double>(q));
    const double coef_arith = N / rq;
    const double coef_full = N / (rq * static_cast<double>(q));
    const double kappa = N / static_cast<double>(q * q);

    DualTailPlan plan =
        plan_dual_tail(coef_full, coef_arith, q, ar, kappa, wt, div, 0.1 * tol);
    if (plan.t_eval > hd.n_max)
        throw TailNotCertified("cusp_voronoi_residual: lambda table shorter than certified cutoff");

    KahanSum arith, full;
    for (int64_t n = ar == 0 ? q : ar; n <= plan.t_eval; n += q)
        arith.add(hd.lam(n) * wt(kappa * static_cast<double>(n)));
    for (int64_t n = 1; n <= plan.t_eval; ++n)
        full.add(hd.lam(n) * wt(kappa * static_cast<double>(n)));
    double rhs = hd.eps * (coef_arith * arith.value() - coef_full * full.value());
    return std::abs(lhs - rhs);
}

double twisted_voronoi_residual(const HeckeData& hd, const PrimeContext& ctx, int64_t a,
                                const SmoothWeight& w, double N, const BesselTransform& wt,
                                const std::vector<int32_t>& div, double tol) {
    const int64_t q = ctx.q();
    const int64_t ar = ctx.reduce(a);
    if (ar == 0) throw NotCoprime(a, q);
    if (N < 1.0) throw ParameterOutOfRange("twisted_voronoi_residual: N >= 1");

    int64_t lo = static_cast<int64_t>(std::ceil(N * w.support_lo()));
    int64_t hi = static_cast<int64_t>(std::floor(N * w.support_hi()));
    if (hi > hd.n_max) throw TailNotCertified("twisted sum: lambda table too short for LHS");
    KahanSumComplex lhs;
    for (int64_t n = std::max<int64_t>(1, lo); n <= hi; ++n)
        lhs.add(hd.lam(n) * w(static_cast<double>(n) / N) * ctx.eq(-ar * n));

    const double coef = N / static_cast<double>(q);
    const double kappa = N / static_cast<double>(q * q);
    DualTailPlan plan = plan_dual_tail(coef, 0.0, q, 0, kappa, wt, div, 0.1 * tol);
    if (plan.t_eval > hd.n_max)
        throw TailNotCertified("twisted_voronoi_residual: lambda table shorter than certified cutoff");

    const int64_t abar = ctx.inv(ar);
    KahanSumComplex dual;
    for (int64_t n = 1; n <= plan.t_eval; ++n)
        dual.add(hd.lam(n) * wt(kappa * static_cast<double>(n)) * ctx.eq(abar * n));
    cdouble rhs = static_cast<double>(hd.eps) * coef * dual.value();
    return std::abs(lhs.value() - rhs);
}

namespace {
// dyadic beyond-table remainder for a candidate verification range y_ver
double dyadic_remainder(const BesselTransform& wt, double y_ver, double kappa,
                        double coef_full, double coef_arith, int64_t q) {
    double C = 0.0;
    double A = wt.tail_exponent(0.98 * y_ver, C);
    if (A <= 2.5) return 1e300;
    double rem = 0.0;
    double x1 = y_ver / kappa;
    for (int k = 0; k < 500; ++k) {
        double x2 = 2.0 * x1;
        double d_full = x2 * (std::log(x2) + 1.0);
        double d_ap = x2 * (std::log(x2) + 2.0) / static_cast<double>(q) + 2.0 * std::sqrt(x2);
        double t = C * std::pow(kappa * x1, -A) * (coef_full * d_full + coef_arith * d_ap);
        rem += t;
        if (t < 1e-14 * rem) break;
        x1 = x2;
    }
    return rem;
}

struct CuspWorkspace {
    // widest mollifier the (Wbound) Q=1 class admits on [1/2, 2]: it has the
    // smallest high-order derivative constants, which sets how far the dual
    // tail must be evaluated before the certificates take over
    SmoothWeight w = SmoothWeight(1.0, 0.5, 2.0, 0.35);
    std::unique_ptr<BesselTransform> bt;
    std::vector<int32_t> div;
    HeckeData hd;
};

CuspWorkspace& cusp_workspace() {
    static CuspWorkspace ws;
    return ws;
}
}  // namespace

CuspCheckResult cusp_check_auto(int64_t q, int64_t a, double N, double tol,
                                const std::string& cache_dir) {
    CuspWorkspace& ws = cusp_workspace();
    PrimeContext ctx(q);
    const double rq = std::sqrt(static_cast<double>(q));
    const double kappa = N / static_cast<double>(q * q);
    const double budget = 0.1 * tol;

    // probe transform for the integration-by-parts constants only
    if (!ws.bt) ws.bt = std::make_unique<BesselTransform>(ws.w, 12, 400.0);

    // the three (coef_full, coef_arith, kappa) shapes this check runs
    struct Shape {
        double cf, ca, kap;
    };
    const Shape shapes[2] = {
        {N / (rq * static_cast<double>(q)), N / rq, kappa},      // cusp identity
        {N / static_cast<double>(q), 0.0, kappa},                // twisted identity
    };
    double y_need = 400.0;
    for (const Shape& sh : shapes) {
        double y = 2000.0;
        while (dyadic_remainder(*ws.bt, y, sh.kap, sh.cf, sh.ca, q) >= 0.45 * budget) {
            y *= 1.3;
            if (y > 5e7) throw TailNotCertified("cusp_check_auto: no feasible table range");
        }
        y_need = std::max(y_need, y);
    }
    if (!ws.bt || ws.bt->y_max() < y_need)
        ws.bt = std::make_unique<BesselTransform>(ws.w, 12, 1.1 * y_need);

    int64_t n_ver = static_cast<int64_t>(std::floor(ws.bt->y_max() / kappa)) + 2;
    if (static_cast<int64_t>(ws.div.size()) <= n_ver) ws.div = divisor_table(n_ver + 8);

    // tau extent from the tail plans
    DualTailPlan p1 = plan_dual_tail(shapes[0].cf, shapes[0].ca, q, ctx.reduce(a), kappa,
                                     *ws.bt, ws.div, budget);
    DualTailPlan p2 = plan_dual_tail(shapes[1].cf, 0.0, q, 0, kappa, *ws.bt, ws.div, budget);
    int64_t need = std::max({p1.t_eval, p2.t_eval,
                             static_cast<int64_t>(std::ceil(2.0 * N * 1.01))});
    if (ws.hd.n_max < need) ws.hd = delta_coefficients_cached(need + need / 16, cache_dir);

    CuspCheckResult res;
    res.t_eval = std::max(p1.t_eval, p2.t_eval);
    res.y_max = ws.bt->y_max();
    res.cusp_residual = cusp_voronoi_residual(ws.hd, ctx, a, ws.w, N, *ws.bt, ws.div, tol);
    res.twisted_residual =
        twisted_voronoi_residual(ws.hd, ctx, a, ws.w, N, *ws.bt, ws.div, tol);
    return res;
}

BoundReport cuspidal_bound_report(const HeckeData& hd, const PrimeContext& ctx, int64_t a,
                                  const SmoothWeight& w, double N) {
    const int64_t q = ctx.q();
    const int64_t ar = ctx.reduce(a);
    if (ar == 0) throw NotCoprime(a, q);
    std::vector<double> kl = kloosterman_all(ctx);
    double s = cusp_lhs(hd, ctx, ar, w, N, kl);

    BoundReport rep;
    rep.experiment = "cuspidal-correlation";
    rep.sum_value = s;
    rep.param("q", static_cast<double>(q));
    rep.param("a", static_cast<double>(ar));
    rep.param("N", N);
    rep.param("Q", w.q_param());
    const double rq = std::sqrt(static_cast<double>(q));
    rep.envelope("predicted", rq + N / rq);
    rep.envelope("q_eighth", N * std::sqrt(1.0 + static_cast<double>(q) / N) *
                             std::pow(static_cast<double>(q), -0.125));
    return rep;
}

}  // namespace klab
