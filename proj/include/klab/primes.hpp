#pragma once

#include <vector>

#include "klab/arith.hpp"
#include "klab/report.hpp"
#include "klab/weights.hpp"

namespace klab {

// Reconstructs Lambda(n), n <= X, from the J-fold Heath-Brown identity by
// Dirichlet-convolution sieving; returns max |reconstructed - Lambda|.
double hb_lambda_check(int J, int64_t X);

// sum_p W(p/X) Kl(p;q) plus the von-Mangoldt variant and its exact
// prime-power correction.
BoundReport prime_kloosterman_smooth(const PrimeContext& ctx, const std::vector<double>& kl,
                                     const SmoothWeight& w, double X, const ArithTables& at);

// Sharp sum over p <= X, plus the window-subdivision + smooth-sandwich
// reconstruction with its fringe certificate.
BoundReport prime_kloosterman_sharp(const PrimeContext& ctx, const std::vector<double>& kl,
                                    double X, const ArithTables& at);

struct ExponentTuple {
    double x = 1.0;      // X = q^x
    double kappa = 0.0;  // Q = q^kappa
    std::vector<double> mu;
    std::vector<double> nu;  // sorted descending
};

// max( nu1+nu2 - 1/2 - 2 kappa ; max_sigma min(sigma/2, (x-sigma)/2 - 1/4) - kappa/2 )
double eta_exponent(const ExponentTuple& t);

// Grid certificate for the case analysis: min over admissible grid tuples of
// eta(tuple) - min(x/3 - 1/4 - kappa/2, 5x/6 - 1/2 - 2 kappa).
double eta_case_certificate(double x, double kappa, int J, double grid_step);

struct DecompositionCheck {
    double direct = 0.0;
    double recombined = 0.0;
    double rel_error = 0.0;
    int64_t term_count = 0;
    int64_t rough_cap = 0;       // truncation bound on the Moebius factors
    double max_range_hi = 0.0;   // largest rough-range endpoint over all terms
    bool ranges_consistent = true;  // every term's range product meets the X window
};

// Materializes the dyadic Heath-Brown decomposition of sum Lambda(n) Kl(n;q) W(n/X)
// with a smooth dyadic partition of unity, and recombines it.
DecompositionCheck sigma_decomposition_check(const PrimeContext& ctx,
                                             const std::vector<double>& kl, int64_t X, int J,
                                             const ArithTables& at);

}  // namespace klab
