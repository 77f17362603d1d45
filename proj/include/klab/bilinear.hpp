#pragma once

#include <optional>
#include <vector>

#include "klab/arith.hpp"
#include "klab/report.hpp"
#include "klab/weights.hpp"

namespace klab {

// Complex coefficients supported on [scale, 2*scale] (type-II inputs).
struct CoefficientSeq {
    int64_t scale = 1;           // L with support in [L, 2L]
    int64_t lo = 0, hi = -1;     // actual index range
    std::vector<cdouble> values; // index m-lo

    cdouble at(int64_t m) const {
        if (m < lo || m > hi) return {0.0, 0.0};
        return values[static_cast<std::size_t>(m - lo)];
    }
    double l2_norm() const;
};

// sum over integer boxes of Kl(mn;q) via the precomputed table.
BoundReport bilinear_sharp(const PrimeContext& ctx, const std::vector<double>& kl,
                           int64_t m_lo, int64_t m_hi, int64_t n_lo, int64_t n_hi);

// smoothed two- or three-weight variant: sum W1(m/M) W2(n/N) [W3(mn/Y)] Kl(amn;q)
BoundReport bilinear_smooth(const PrimeContext& ctx, const std::vector<double>& kl, int64_t a,
                            const SmoothWeight& w1, const SmoothWeight& w2, double M, double N,
                            const SmoothWeight* w3 = nullptr, double Y = 0.0);

// sum alpha_m beta_n Kl(mn;q) W(mn/Y); w == nullptr means the constant weight 1.
BoundReport type_ii_sum(const PrimeContext& ctx, const std::vector<double>& kl,
                        const CoefficientSeq& alpha, const CoefficientSeq& beta,
                        const SmoothWeight* w, double Y);

}  // namespace klab
