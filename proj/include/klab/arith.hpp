#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "klab/fft.hpp"

namespace klab {

using std::int64_t;

// Deterministic Miller-Rabin, witness set valid below 3.3e24.
bool is_prime(int64_t n);

// Distinct prime factors by trial division (desk scale).
std::vector<int64_t> distinct_prime_factors(int64_t n);

int64_t mod_pow(int64_t base, int64_t exp, int64_t mod);
int64_t mod_inverse(int64_t a, int64_t mod);  // extended gcd

// Prime modulus with every per-q table the rest of the library wants:
// inverses, a primitive root, discrete logs, and the q-th roots of unity.
// Immutable after construction; shareable across threads.
class PrimeContext {
  public:
    explicit PrimeContext(int64_t q);

    int64_t q() const { return q_; }
    int64_t primitive_root() const { return g_; }

    int64_t inv(int64_t x) const { return inv_table_[x]; }
    const std::vector<int64_t>& inv_table() const { return inv_table_; }

    // discrete log base g of n in 1..q-1
    int64_t dlog(int64_t n) const { return dlog_table_[n]; }

    // e_q(k) = exp(2 pi i k / q), k any integer
    cdouble eq(int64_t k) const {
        int64_t r = k % q_;
        if (r < 0) r += q_;
        return unit_roots_[static_cast<std::size_t>(r)];
    }
    double eq_cos(int64_t k) const { return eq(k).real(); }

    int64_t reduce(int64_t x) const {
        int64_t r = x % q_;
        return r < 0 ? r + q_ : r;
    }

  private:
    int64_t q_;
    int64_t g_;
    std::vector<int64_t> inv_table_;
    std::vector<int64_t> dlog_table_;
    std::vector<cdouble> unit_roots_;
};

PrimeContext make_prime_context(int64_t q);

// Kl(m;q) = q^{-1/2} sum_{x=1}^{q-1} cos(2 pi (x^{-1} + m x)/q).
// The sine part cancels in pairs (x <-> -x), so the sum is real by
// construction and is accumulated as such.
double kloosterman_direct(int64_t m, const PrimeContext& ctx);

// All residues at once: Kl(.;q) is the normalized positive-kernel Fourier
// transform of x -> e_q(x^{-1}) (zero at x = 0); one chirp-z transform.
std::vector<double> kloosterman_all(const PrimeContext& ctx);

struct ArithTables {
    int64_t n_max = 0;
    std::vector<int64_t> primes;
    std::vector<double> mangoldt;   // Lambda(n), natural log
    std::vector<int64_t> divisor;   // d(n)
    std::vector<int> moebius;       // mu(n)
    std::vector<int64_t> spf;       // smallest prime factor
};

ArithTables arith_tables(int64_t n_max);

// d(n) alone, 1-indexed, int32 — the large dual-tail scans only need this.
std::vector<int32_t> divisor_table(int64_t n_max);

struct DirichletCharacter {
    int64_t q = 0;
    int64_t j = 0;  // index in 0..q-2; chi(g^k) = e((j k)/(q-1))
    std::vector<cdouble> values;  // length q, values[0] = 0

    cdouble operator()(int64_t n) const {
        int64_t r = n % q;
        if (r < 0) r += q;
        return values[static_cast<std::size_t>(r)];
    }
    bool is_principal() const { return j == 0; }
    bool is_even() const;  // chi(-1) == 1
};

DirichletCharacter character(const PrimeContext& ctx, int64_t j);

}  // namespace klab
