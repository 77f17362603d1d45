#include "klab/arith.hpp"

#include <cmath>
#include <numbers>

#include "klab/errors.hpp"
#include "klab/summation.hpp"

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;

int64_t mul_mod(int64_t a, int64_t b, int64_t m) {
    return static_cast<int64_t>((__int128)a * b % m);
}
}  // namespace

int64_t mod_pow(int64_t base, int64_t exp, int64_t mod) {
    int64_t r = 1 % mod;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) r = mul_mod(r, base, mod);
        base = mul_mod(base, base, mod);
        exp >>= 1;
    }
    return r;
}

bool is_prime(int64_t n) {
    if (n < 2) return false;
    for (int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    int64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (int64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        int64_t x = mod_pow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

std::vector<int64_t> distinct_prime_factors(int64_t n) {
    std::vector<int64_t> out;
    for (int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

int64_t mod_inverse(int64_t a, int64_t mod) {
    int64_t t = 0, new_t = 1;
    int64_t r = mod, new_r = a % mod;
    if (new_r < 0) new_r += mod;
    while (new_r != 0) {
        int64_t quot = r / new_r;
        t -= quot * new_t;
        std::swap(t, new_t);
        r -= quot * new_r;
        std::swap(r, new_r);
    }
    if (r != 1) throw NotCoprime(a, mod);
    return t < 0 ? t + mod : t;
}

PrimeContext::PrimeContext(int64_t q) : q_(q) {
    if (!is_prime(q)) throw CompositeModulus(q);

    // inv[x] by the standard recurrence inv[x] = -(q/x) * inv[q mod x]
    inv_table_.assign(static_cast<std::size_t>(q), 0);
    if (q >= 2) inv_table_[1] = 1;
    for (int64_t x = 2; x < q; ++x) {
        inv_table_[static_cast<std::size_t>(x)] =
            mul_mod(q - q / x, inv_table_[static_cast<std::size_t>(q % x)], q);
    }

    // smallest primitive root
    g_ = 1;
    if (q == 2) {
        g_ = 1;
    } else {
        auto factors = distinct_prime_factors(q - 1);
        for (int64_t cand = 2; cand < q; ++cand) {
            bool ok = true;
            for (int64_t p : factors) {
                if (mod_pow(cand, (q - 1) / p, q) == 1) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                g_ = cand;
                break;
            }
        }
    }

    dlog_table_.assign(static_cast<std::size_t>(q), -1);
    int64_t pw = 1;
    for (int64_t k = 0; k < q - 1; ++k) {
        dlog_table_[static_cast<std::size_t>(pw)] = k;
        pw = mul_mod(pw, g_, q);
    }

    unit_roots_.resize(static_cast<std::size_t>(q));
    for (int64_t k = 0; k < q; ++k) {
        double ang = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(q);
        unit_roots_[static_cast<std::size_t>(k)] = cdouble(std::cos(ang), std::sin(ang));
    }
}

PrimeContext make_prime_context(int64_t q) { return PrimeContext(q); }

double kloosterman_direct(int64_t m, const PrimeContext& ctx) {
    const int64_t q = ctx.q();
    KahanSum sum;
    int64_t mr = ctx.reduce(m);
    for (int64_t x = 1; x < q; ++x) {
        int64_t idx = (ctx.inv(x) + mr * x) % q;
        sum.add(ctx.eq_cos(idx));
    }
    return sum.value() / std::sqrt(static_cast<double>(q));
}

std::vector<double> kloosterman_all(const PrimeContext& ctx) {
    const int64_t q = ctx.q();
    std::vector<cdouble> f(static_cast<std::size_t>(q), cdouble(0.0, 0.0));
    for (int64_t x = 1; x < q; ++x)
        f[static_cast<std::size_t>(x)] = ctx.eq(ctx.inv(x));
    std::vector<cdouble> hat = dft(f, +1);
    std::vector<double> out(static_cast<std::size_t>(q));
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    for (int64_t m = 0; m < q; ++m)
        out[static_cast<std::size_t>(m)] = hat[static_cast<std::size_t>(m)].real() * scale;
    return out;
}

ArithTables arith_tables(int64_t n_max) {
    if (n_max < 1) throw ParameterOutOfRange("arith_tables: n_max must be >= 1");
    ArithTables t;
    t.n_max = n_max;
    const std::size_t n = static_cast<std::size_t>(n_max);
    t.spf.assign(n + 1, 0);
    for (int64_t i = 2; i <= n_max; ++i) {
        if (t.spf[static_cast<std::size_t>(i)] == 0) {
            t.primes.push_back(i);
            for (int64_t j = i; j <= n_max; j += i) {
                if (t.spf[static_cast<std::size_t>(j)] == 0)
                    t.spf[static_cast<std::size_t>(j)] = i;
            }
        }
    }
    t.mangoldt.assign(n + 1, 0.0);
    t.divisor.assign(n + 1, 0);
    t.moebius.assign(n + 1, 0);
    if (n_max >= 1) {
        t.divisor[1] = 1;
        t.moebius[1] = 1;
    }
    for (int64_t i = 2; i <= n_max; ++i) {
        const int64_t p = t.spf[static_cast<std::size_t>(i)];
        int64_t m = i, e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        // i = p^e * m with p not dividing m
        if (m == 1) t.mangoldt[static_cast<std::size_t>(i)] = std::log(static_cast<double>(p));
        t.divisor[static_cast<std::size_t>(i)] =
            t.divisor[static_cast<std::size_t>(m)] * (e + 1);
        t.moebius[static_cast<std::size_t>(i)] =
            (e > 1) ? 0 : -t.moebius[static_cast<std::size_t>(m)];
    }
    return t;
}

std::vector<int32_t> divisor_table(int64_t n_max) {
    std::vector<int32_t> d(static_cast<std::size_t>(n_max) + 1, 0);
    for (int64_t e = 1; e <= n_max; ++e)
        for (int64_t m = e; m <= n_max; m += e) ++d[static_cast<std::size_t>(m)];
    return d;
}

bool DirichletCharacter::is_even() const {
    return std::abs((*this)(q - 1) - cdouble(1.0, 0.0)) < 1e-9;
}

DirichletCharacter character(const PrimeContext& ctx, int64_t j) {
    const int64_t q = ctx.q();
    if (j < 0 || j > q - 2)
        throw IndexOutOfRange("character index " + std::to_string(j) + " not in 0.." +
                              std::to_string(q - 2));
    DirichletCharacter chi;
    chi.q = q;
    chi.j = j;
    chi.values.assign(static_cast<std::size_t>(q), cdouble(0.0, 0.0));
    const int64_t order = q - 1;
    int64_t pw = 1;
    for (int64_t k = 0; k < order; ++k) {
        int64_t e = static_cast<int64_t>((__int128)j * k % order);
        double ang = 2.0 * kPi * static_cast<double>(e) / static_cast<double>(order);
        chi.values[static_cast<std::size_t>(pw)] = cdouble(std::cos(ang), std::sin(ang));
        pw = static_cast<int64_t>((__int128)pw * ctx.primitive_root() % q);
    }
    return chi;
}

}  // namespace klab
