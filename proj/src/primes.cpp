#include "klab/primes.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <map>

#include "klab/errors.hpp"
#include "klab/summation.hpp"

namespace klab {

namespace {
// Dirichlet convolution out[n] = sum_{d e = n} f[d] g[e], arrays 1-indexed.
std::vector<double> dirichlet_conv(const std::vector<double>& f, const std::vector<double>& g) {
    const int64_t X = static_cast<int64_t>(f.size()) - 1;
    std::vector<double> out(static_cast<std::size_t>(X) + 1, 0.0);
    for (int64_t d = 1; d <= X; ++d) {
        double fd = f[static_cast<std::size_t>(d)];
        if (fd == 0.0) continue;
        for (int64_t e = 1; d * e <= X; ++e) {
            double ge = g[static_cast<std::size_t>(e)];
            if (ge != 0.0) out[static_cast<std::size_t>(d * e)] += fd * ge;
        }
    }
    return out;
}

int64_t binom(int n, int k) {
    int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace

double hb_lambda_check(int J, int64_t X) {
    if (J < 2 || J > 10) throw ParameterOutOfRange("hb_lambda_check: J in 2..10");
    if (X < 2 || X > 1'000'000) throw ParameterOutOfRange("hb_lambda_check: X in 2..1e6");
    ArithTables at = arith_tables(X);
    const std::size_t sz = static_cast<std::size_t>(X) + 1;
    const int64_t M = static_cast<int64_t>(std::floor(std::pow(static_cast<double>(X), 1.0 / J) + 1e-9));

    std::vector<double> mu_trunc(sz, 0.0), ones(sz, 1.0), logn(sz, 0.0);
    ones[0] = 0.0;
    for (int64_t n = 1; n <= std::min(M, X); ++n)
        mu_trunc[static_cast<std::size_t>(n)] = static_cast<double>(at.moebius[static_cast<std::size_t>(n)]);
    for (int64_t n = 1; n <= X; ++n) logn[static_cast<std::size_t>(n)] = std::log(static_cast<double>(n));

    std::vector<double> result(sz, 0.0);
    std::vector<double> mu_pow(sz, 0.0);
    mu_pow[1] = 1.0;  // Dirichlet identity
    for (int j = 1; j <= J; ++j) {
        mu_pow = dirichlet_conv(mu_pow, mu_trunc);
        std::vector<double> term = mu_pow;
        for (int r = 0; r < j - 1; ++r) term = dirichlet_conv(term, ones);
        term = dirichlet_conv(term, logn);
        double coef = ((j % 2 == 1) ? 1.0 : -1.0) * static_cast<double>(binom(J, j));
        for (std::size_t n = 1; n < sz; ++n) result[n] += coef * term[n];
    }

    double err = 0.0;
    for (int64_t n = 1; n <= X; ++n)
        err = std::max(err, std::abs(result[static_cast<std::size_t>(n)] -
                                     at.mangoldt[static_cast<std::size_t>(n)]));
    return err;
}

BoundReport prime_kloosterman_smooth(const PrimeContext& ctx, const std::vector<double>& kl,
                                     const SmoothWeight& w, double X, const ArithTables& at) {
    const int64_t q = ctx.q();
    const int64_t hi = static_cast<int64_t>(std::floor(X * w.support_hi()));
    if (hi > at.n_max) throw ParameterOutOfRange("prime_kloosterman_smooth: tables too short");

    KahanSum prime_sum, weight_mass, lambda_sum, lambda_primes;
    for (int64_t p : at.primes) {
        if (p > hi) break;
        double wp = w(static_cast<double>(p) / X);
        if (wp == 0.0) continue;
        double klv = kl[static_cast<std::size_t>(p % q)];
        prime_sum.add(wp * klv);
        weight_mass.add(wp);
        lambda_primes.add(std::log(static_cast<double>(p)) * wp * klv);
    }
    const int64_t lo = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(X * w.support_lo())));
    for (int64_t n = lo; n <= hi; ++n) {
        double lam = at.mangoldt[static_cast<std::size_t>(n)];
        if (lam == 0.0) continue;
        lambda_sum.add(lam * w(static_cast<double>(n) / X) * kl[static_cast<std::size_t>(n % q)]);
    }
    // exact bound on the prime-power part of the von Mangoldt sum
    KahanSum pp_bound;
    for (int64_t p : at.primes) {
        if (p * p > hi) break;
        for (int64_t pk = p * p; pk <= hi; pk *= p) {
            pp_bound.add(2.0 * std::log(static_cast<double>(p)));
            if (pk > hi / p) break;
        }
    }

    BoundReport rep;
    rep.experiment = "primes-smooth";
    rep.sum_value = prime_sum.value();
    rep.param("q", static_cast<double>(q));
    rep.param("X", X);
    rep.param("Q", w.q_param());
    rep.param("lambda_sum", lambda_sum.value());
    rep.param("lambda_primes_only", lambda_primes.value());
    rep.param("prime_power_part", lambda_sum.value() - lambda_primes.value());
    rep.param("prime_power_bound", pp_bound.value());
    rep.envelope("predicted", std::pow(static_cast<double>(q), 0.25) * std::sqrt(w.q_param()) *
                              std::pow(X, 2.0 / 3.0));
    rep.envelope("trivial", 2.0 * weight_mass.value());
    return rep;
}

BoundReport prime_kloosterman_sharp(const PrimeContext& ctx, const std::vector<double>& kl,
                                    double X, const ArithTables& at) {
    const int64_t q = ctx.q();
    const int64_t Xi = static_cast<int64_t>(std::floor(X));
    if (Xi > at.n_max) throw ParameterOutOfRange("prime_kloosterman_sharp: tables too short");

    KahanSum direct;
    int64_t prime_count = 0;
    for (int64_t p : at.primes) {
        if (p > Xi) break;
        direct.add(kl[static_cast<std::size_t>(p % q)]);
        ++prime_count;
    }

    // 5.2-style reproduction: windows (Y, 3Y/2], smooth sandwich on each
    const double X0 = std::min(X, 100.0);
    KahanSum sandwich, fringe_bound;
    std::vector<std::pair<double, double>> windows;  // (lo, hi]
    double hi = X;
    while (hi > X0) {
        double lo = hi / 1.5;
        if (lo < X0) lo = X0;
        windows.emplace_back(lo, hi);
        hi = lo;
    }
    for (int64_t p : at.primes) {  // base segment p <= X0 taken exactly
        if (p > static_cast<int64_t>(std::floor(std::min(X0, X)))) break;
        sandwich.add(kl[static_cast<std::size_t>(p % q)]);
    }
    int trivial_windows = 0;
    for (auto it = windows.rbegin(); it != windows.rend(); ++it) {
        double Y = it->first, top = it->second;
        double delta = std::pow(static_cast<double>(q), 1.0 / 6.0) * std::pow(Y, -2.0 / 9.0);
        if (delta >= 0.5 || top < 1.5 * Y - 1e-9) {
            // sandwich shape unavailable (delta too big or clipped window): exact
            for (int64_t p : at.primes) {
                if (p > static_cast<int64_t>(std::floor(top))) break;
                if (p > static_cast<int64_t>(std::floor(Y)))
                    sandwich.add(kl[static_cast<std::size_t>(p % q)]);
            }
            ++trivial_windows;
            continue;
        }
        SandwichPair sw = sharp_cutoff_sandwich(delta);
        int64_t reach = static_cast<int64_t>(std::floor(Y * sw.outer.support_hi()));
        for (int64_t p : at.primes) {
            if (p > reach) break;
            double wp = sw.outer(static_cast<double>(p) / Y);
            if (wp != 0.0) sandwich.add(wp * kl[static_cast<std::size_t>(p % q)]);
        }
        // fringes (Y(1-delta), Y] and (3Y/2, Y(3/2+delta)]
        for (int64_t p : at.primes) {
            if (p > reach) break;
            double pd = static_cast<double>(p);
            bool low_fringe = pd > Y * (1.0 - delta) && pd <= Y;
            bool high_fringe = pd > 1.5 * Y && pd <= Y * (1.5 + delta);
            if (low_fringe || high_fringe) fringe_bound.add(2.0);
        }
    }

    BoundReport rep;
    rep.experiment = "primes-sharp";
    rep.sum_value = direct.value();
    rep.param("q", static_cast<double>(q));
    rep.param("X", X);
    rep.param("prime_count", static_cast<double>(prime_count));
    rep.param("sandwich_value", sandwich.value());
    rep.param("sandwich_diff", std::abs(direct.value() - sandwich.value()));
    rep.param("fringe_bound", fringe_bound.value());
    rep.param("trivial_windows", static_cast<double>(trivial_windows));
    rep.envelope("predicted", std::pow(static_cast<double>(q), 1.0 / 6.0) * std::pow(X, 7.0 / 9.0));
    rep.envelope("trivial", 2.0 * static_cast<double>(prime_count));
    return rep;
}

double eta_exponent(const ExponentTuple& t) {
    const std::size_t J = t.mu.size();
    if (t.nu.size() != J || J < 2 || J > 12)
        throw TupleInvariantViolated("eta_exponent: need 2 <= J <= 12 with equal-size tuples");
    double total = 0.0;
    for (double m : t.mu) {
        if (m < -1e-12 || m > t.x / static_cast<double>(J) + 1e-9)
            throw TupleInvariantViolated("eta_exponent: mu_i outside [0, x/J]");
        total += m;
    }
    for (std::size_t i = 0; i < J; ++i) {
        if (t.nu[i] < -1e-12) throw TupleInvariantViolated("eta_exponent: negative nu");
        if (i + 1 < J && t.nu[i] + 1e-12 < t.nu[i + 1])
            throw TupleInvariantViolated("eta_exponent: nu not sorted descending");
        total += t.nu[i];
    }
    if (std::abs(total - t.x) > 1e-9 || t.x > 1.0 + 1e-12)
        throw TupleInvariantViolated("eta_exponent: mass constraint violated");

    double branch1 = t.nu[0] + t.nu[1] - 0.5 - 2.0 * t.kappa;

    // meet-in-the-middle over subset sums; the tent is unimodal with peak x/2 - 1/4
    std::vector<double> all(t.mu);
    all.insert(all.end(), t.nu.begin(), t.nu.end());
    const std::size_t half = all.size() / 2;
    auto subset_sums = [](const double* v, std::size_t n) {
        std::vector<double> out(static_cast<std::size_t>(1) << n, 0.0);
        for (std::size_t mask = 1; mask < out.size(); ++mask) {
            std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
            out[mask] = out[mask ^ (static_cast<std::size_t>(1) << low)] + v[low];
        }
        return out;
    };
    std::vector<double> sa = subset_sums(all.data(), half);
    std::vector<double> sb = subset_sums(all.data() + half, all.size() - half);
    std::sort(sb.begin(), sb.end());
    auto tent = [&](double sigma) {
        return std::min(sigma / 2.0, (t.x - sigma) / 2.0 - 0.25);
    };
    const double peak = t.x / 2.0 - 0.25;
    double best = -1e300;
    for (double a : sa) {
        double want = peak - a;
        auto it = std::lower_bound(sb.begin(), sb.end(), want);
        if (it != sb.end()) best = std::max(best, tent(a + *it));
        if (it != sb.begin()) best = std::max(best, tent(a + *std::prev(it)));
    }
    double branch2 = best - t.kappa / 2.0;
    return std::max(branch1, branch2);
}

namespace {
// enumerate nondecreasing mu unit-tuples (size J, entries <= cap, sum <= U)
template <typename F>
void enum_mu(int J, int cap, int U, std::vector<int>& cur, int sum, const F& emit) {
    if (static_cast<int>(cur.size()) == J) {
        emit(cur, sum);
        return;
    }
    int start = cur.empty() ? 0 : cur.back();
    for (int v = start; v <= cap && sum + v <= U; ++v) {
        cur.push_back(v);
        enum_mu(J, cap, U, cur, sum + v, emit);
        cur.pop_back();
    }
}

// enumerate nonincreasing nu unit-tuples (size J, sum exactly rem, entries <= maxv)
template <typename F>
void enum_nu(int J, int maxv, int rem, std::vector<int>& cur, const F& emit) {
    if (static_cast<int>(cur.size()) == J) {
        if (rem == 0) emit(cur);
        return;
    }
    int slots = J - static_cast<int>(cur.size());
    int cap = cur.empty() ? maxv : std::min(maxv, cur.back());
    // remaining slots must be able to absorb rem
    for (int v = std::min(cap, rem); v >= 0; --v) {
        if (v * slots < rem) break;
        cur.push_back(v);
        enum_nu(J, maxv, rem - v, cur, emit);
        cur.pop_back();
    }
}
}  // namespace

double eta_case_certificate(double x, double kappa, int J, double grid_step) {
    if (!(x >= 0.74 && x <= 1.0))
        throw ParameterOutOfRange("eta_case_certificate: x in [3/4, 1]");
    if (J < 2 || J > 12) throw ParameterOutOfRange("eta_case_certificate: J in 2..12");
    if (x * grid_step > 0.05)
        throw GridTooCoarse("eta_case_certificate: per-variable resolution above 0.05");
    const int U = static_cast<int>(std::lround(1.0 / grid_step));
    if (U < 2 || U > 250) throw ParameterOutOfRange("eta_case_certificate: grid step");

    const double unit = x / static_cast<double>(U);
    const int mu_cap = static_cast<int>(std::floor(static_cast<double>(U) / J + 1e-9));
    const double bound =
        std::min(x / 3.0 - 0.25 - kappa / 2.0, 5.0 * x / 6.0 - 0.5 - 2.0 * kappa);
    auto tent = [&](double sigma) {
        return std::min(sigma / 2.0, (x - sigma) / 2.0 - 0.25);
    };

    double worst = 1e300;
    std::vector<int> mu_cur, nu_cur;
    enum_mu(J, mu_cap, U, mu_cur, 0, [&](const std::vector<int>& mu, int mu_sum) {
        int rem = U - mu_sum;
        std::vector<int> nc;
        enum_nu(J, U, rem, nc, [&](const std::vector<int>& nu) {
            // subset sums over all 2J unit values
            std::bitset<256> reach;
            reach[0] = 1;
            for (int v : mu)
                if (v > 0) reach |= reach << v; else reach |= reach;
            for (int v : nu)
                if (v > 0) reach |= reach << v; else reach |= reach;
            double branch1 = (nu[0] + nu[1]) * unit - 0.5 - 2.0 * kappa;
            double best_tent = -1e300;
            for (int u = 0; u <= U; ++u)
                if (reach[static_cast<std::size_t>(u)])
                    best_tent = std::max(best_tent, tent(u * unit));
            double eta = std::max(branch1, best_tent - kappa / 2.0);
            worst = std::min(worst, eta - bound);
        });
    });
    return worst;
}

DecompositionCheck sigma_decomposition_check(const PrimeContext& ctx,
                                             const std::vector<double>& kl, int64_t X, int J,
                                             const ArithTables& at) {
    if (J < 2 || J > 3) throw ParameterOutOfRange("sigma_decomposition_check: J in {2,3}");
    if (X < 16 || X > 100'000) throw ParameterOutOfRange("sigma_decomposition_check: X in 16..1e5");
    if (2 * X > at.n_max) throw ParameterOutOfRange("sigma_decomposition_check: tables too short");
    const int64_t q = ctx.q();
    SmoothWeight W = make_bump(1.0, 0.5, 2.0);

    // direct evaluation
    KahanSum direct;
    for (int64_t n = std::max<int64_t>(1, X / 2); n <= 2 * X; ++n) {
        double lam = at.mangoldt[static_cast<std::size_t>(n)];
        if (lam == 0.0) continue;
        direct.add(lam * W(static_cast<double>(n) / X) * kl[static_cast<std::size_t>(n % q)]);
    }

    // smooth step and dyadic partition of unity: B(x) = S(x) - S(x/2)
    auto S = [](double t) { return psi_cdf((t - 0.75) / 0.25); };
    auto B = [&](double t) { return S(t) - S(t / 2.0); };
    const int64_t M = static_cast<int64_t>(
        std::floor(std::pow(2.0 * static_cast<double>(X), 1.0 / J) + 1e-9));

    // key: [j, m-blocks..., n-scales...]; value: accumulated signed sum
    std::map<std::vector<int>, KahanSum> terms;
    const double two_x = 2.0 * static_cast<double>(X);

    auto mu_at = [&](int64_t m) {
        return static_cast<double>(at.moebius[static_cast<std::size_t>(m)]);
    };
    auto mblock = [](int64_t m) {  // m in (2^{b-1}, 2^b]
        int b = 0;
        while ((int64_t(1) << b) < m) ++b;
        return b;
    };

    for (int j = 1; j <= J; ++j) {
        double coef = ((j % 2 == 1) ? 1.0 : -1.0) * static_cast<double>(binom(J, j));
        // iterate lattice: rough m_1..m_j (<= M, squarefree), smooth n_2..n_j, then n_1
        std::vector<int64_t> ms(static_cast<std::size_t>(j), 1), ns(static_cast<std::size_t>(j), 1);
        std::vector<int> key;

        // recursive enumeration without std::function overhead is overkill here;
        // a plain lambda recursion keeps it readable.
        auto emit_point = [&](int64_t prod_m, int64_t prod_n, double mu_prod) {
            int64_t total = prod_m * prod_n;
            double wv = W(static_cast<double>(total) / static_cast<double>(X));
            if (wv == 0.0) return;
            double base = coef * mu_prod * std::log(static_cast<double>(ns[0])) * wv *
                          kl[static_cast<std::size_t>(total % q)];
            if (base == 0.0) return;
            // distribute across the <=2 dyadic scales holding each n_i
            std::vector<std::pair<int, double>> choices[8];
            for (int i = 0; i < j; ++i) {
                double nd = static_cast<double>(ns[static_cast<std::size_t>(i)]);
                int k0 = static_cast<int>(std::floor(std::log2(nd)));
                for (int k = std::max(0, k0); k <= k0 + 1; ++k) {
                    double bv = B(nd / static_cast<double>(int64_t(1) << k));
                    if (bv > 0.0) choices[i].emplace_back(k, bv);
                }
            }
            key.assign(1, j);
            for (int i = 0; i < j; ++i) key.push_back(mblock(ms[static_cast<std::size_t>(i)]));
            key.resize(static_cast<std::size_t>(1 + 2 * j));
            // cartesian product over scale choices
            std::vector<int> pick(static_cast<std::size_t>(j), 0);
            while (true) {
                double bprod = 1.0;
                for (int i = 0; i < j; ++i) {
                    auto& c = choices[i][static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
                    key[static_cast<std::size_t>(1 + j + i)] = c.first;
                    bprod *= c.second;
                }
                terms[key].add(base * bprod);
                int i = 0;
                for (; i < j; ++i) {
                    if (++pick[static_cast<std::size_t>(i)] <
                        static_cast<int>(choices[i].size()))
                        break;
                    pick[static_cast<std::size_t>(i)] = 0;
                }
                if (i == j) break;
            }
        };

        std::function<void(int, int64_t, double)> rec_m = [&](int pos, int64_t prod, double mu_prod) {
            if (pos == j) {
                // smooth variables n_2..n_j then n_1
                std::function<void(int, int64_t)> rec_n = [&](int npos, int64_t nprod) {
                    if (npos == j) {
                        int64_t lo = std::max<int64_t>(
                            1, static_cast<int64_t>(std::ceil(static_cast<double>(X) /
                                                              (2.0 * static_cast<double>(prod * nprod)))));
                        int64_t hi = static_cast<int64_t>(
                            std::floor(two_x / static_cast<double>(prod * nprod)));
                        for (int64_t n1 = lo; n1 <= hi; ++n1) {
                            ns[0] = n1;
                            emit_point(prod, nprod * n1, mu_prod);
                        }
                        return;
                    }
                    for (int64_t v = 1; static_cast<double>(prod * nprod * v) <= two_x; ++v) {
                        ns[static_cast<std::size_t>(npos)] = v;
                        rec_n(npos + 1, nprod * v);
                    }
                };
                rec_n(1, 1);
                return;
            }
            for (int64_t m = 1; m <= M && static_cast<double>(prod * m) <= two_x; ++m) {
                double mv = mu_at(m);
                if (mv == 0.0) continue;
                ms[static_cast<std::size_t>(pos)] = m;
                rec_m(pos + 1, prod * m, mu_prod * mv);
            }
        };
        rec_m(0, 1, 1.0);
    }

    DecompositionCheck out;
    out.direct = direct.value();
    KahanSum recomb;
    for (auto& [key, val] : terms) recomb.add(val.value());
    out.recombined = recomb.value();
    out.rel_error = std::abs(out.recombined - out.direct) /
                    std::max(std::abs(out.direct), 1e-30);
    out.term_count = static_cast<int64_t>(terms.size());
    out.rough_cap = M;
    for (auto& [key, val] : terms) {
        int j = key[0];
        double prod_lo = 1.0, prod_hi = 1.0;
        for (int i = 0; i < j; ++i) {
            int b = key[static_cast<std::size_t>(1 + i)];
            double hi = std::min(std::ldexp(1.0, b), static_cast<double>(M));
            out.max_range_hi = std::max(out.max_range_hi, hi);
            prod_lo *= std::max(1.0, std::ldexp(1.0, b - 1));
            prod_hi *= hi;
        }
        for (int i = 0; i < j; ++i) {
            int k = key[static_cast<std::size_t>(1 + j + i)];
            prod_lo *= std::max(1.0, std::ldexp(1.0, k - 1));
            prod_hi *= std::ldexp(1.0, k + 1);
        }
        // the term must be able to reach the support of W(./X)
        if (prod_hi < static_cast<double>(X) / 2.0 || prod_lo > 2.0 * static_cast<double>(X))
            out.ranges_consistent = false;
        (void)val;
    }
    return out;
}

}  // namespace klab
