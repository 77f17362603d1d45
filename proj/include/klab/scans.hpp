#pragma once

#include <string>
#include <vector>

#include "klab/modforms.hpp"
#include "klab/report.hpp"

namespace klab {

// One bound-ratio experiment series: same experiment shape at increasing q.
struct RatioSeries {
    std::string name;
    std::vector<double> q;
    std::vector<double> ratio;

    double max_ratio() const;
    double slope() const;           // d log(ratio) / d log(q), all points
    double slope_top_half() const;  // fitted over the ceil(n/2) largest q
};

// The gate is two-sided: every single ratio stays below the ceiling, and the
// family trend (per-q max over the non-q axes, fitted over the top half of
// the q grid where the envelope crossover transient has died out) does not
// grow faster than the slope cap.
struct ScanOutcome {
    std::vector<BoundReport> rows;
    std::vector<RatioSeries> series;  // per non-q-axis combination, for reporting
    RatioSeries trend;                // per-q max across the family
    bool pass(double ceiling = 10.0, double slope_cap = 0.05) const;
};

inline constexpr double kRatioCeiling = 10.0;  // pilot-calibrated
inline constexpr double kSlopeCap = 0.05;

// q in {211 .. 316531}, M = N = ceil(q^{1/2+delta}), delta in {0.05, 0.15}
ScanOutcome bilinear_sharp_scan();

// q in {211 .. 316531}, MN = q^{1/2} * q^e, e in {.05, .15, .3}, a in {1, g}
ScanOutcome bilinear_smooth_scan();

// seeded +-1 coefficients, q in {211 .. 100003}, M = N = 32
ScanOutcome typeii_scan(uint64_t seed);

// q in {211 .. 31627}, a in {1, g, 7, 31}, N in {q/2, q, 2q};
// needs lambda(n) for n <= 4*qmax
ScanOutcome cuspidal_scan(const HeckeData& hd);

// smooth (q, X, Q) grid plus the sharp sums, q up to 100003; tables to 2*qmax
ScanOutcome primes_scan(const ArithTables& at);

// q in {211, 1009, 10007}, M_i = (q^2)^{1/4}, both signs
ScanOutcome quadrilinear_scan();

}  // namespace klab
