#pragma once

#include <array>
#include <string>
#include <vector>

#include "klab/arith.hpp"
#include "klab/report.hpp"
#include "klab/weights.hpp"

namespace klab {

// zeta_H(1/2, x) for 0 < x <= 1 by Euler-Maclaurin with a certified remainder.
double hurwitz_zeta_half(double x);

struct LValueRecord {
    int64_t q = 0;
    int64_t j = 0;
    cdouble L_half{0.0, 0.0};
    std::string method;  // "oracle" or "afe"
};

// L(1/2, chi) = q^{-1/2} sum_a chi(a) zeta_H(1/2, a/q); principal character
// gets zeta(1/2)(1 - q^{-1/2}).
LValueRecord l_half_oracle(const PrimeContext& ctx, const DirichletCharacter& chi);

// Theta-kernel smoothed approximate functional equation: both sides of
// length ~ 4 sqrt(q log q), root number from the Gauss sum, exponentially
// certified tails.
LValueRecord l_half_afe(const PrimeContext& ctx, const DirichletCharacter& chi);

// All non-principal L-values at once through one group transform (index j);
// entry 0 holds the principal value.
std::vector<cdouble> l_half_all_oracle(const PrimeContext& ctx);
std::vector<cdouble> l_half_all_afe(const PrimeContext& ctx);

double fourth_moment(const PrimeContext& ctx);         // batched oracle path
double fourth_moment_direct(const PrimeContext& ctx);  // per-character loop

struct MomentSeries {
    std::vector<int64_t> q;
    std::vector<double> moment;
    std::array<double, 5> fit{};  // coefficients of 1, L, L^2, L^3, L^4, L = log q
    double fit_rms = 0.0;
};

MomentSeries moment_series(int64_t q_lo, int64_t q_hi);
void fit_degree4(MomentSeries& series);

// B^{+-}(M,N): congruence-restricted divisor correlation minus its q-average.
cdouble shifted_convolution(const PrimeContext& ctx, const SmoothWeight& w1,
                            const SmoothWeight& w2, double M, double N, int sign,
                            const ArithTables& at);

// S^{+-}(M1..M4) with the two envelope strategies of the moment argument.
BoundReport quadrilinear_sum(const PrimeContext& ctx, const std::vector<double>& kl,
                             const std::array<const SmoothWeight*, 4>& w,
                             const std::array<double, 4>& M, int sign);

struct MomentCertificate {
    double eta = 0.0;
    bool tightened = false;
    double worst_margin = 0.0;  // min over admissible tuples of the two exponent margins
    bool pass = false;
    double largest_passing_eta = 0.0;
};

MomentCertificate moment_exponent_certificate(double eta, double grid_step,
                                              bool tightened = false);

}  // namespace klab
