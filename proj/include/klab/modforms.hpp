#pragma once

#include <string>
#include <vector>

#include "klab/arith.hpp"
#include "klab/report.hpp"
#include "klab/transforms.hpp"
#include "klab/weights.hpp"

namespace klab {

using int128 = __int128;

// Ramanujan tau and the normalized eigenvalues lambda(n) = tau(n)/n^{11/2}
// of the level-1 weight-12 form; sign of the functional equation is +1.
struct HeckeData {
    int k = 12;
    int eps = +1;
    int64_t n_max = 0;
    std::vector<int128> tau;     // index n, tau[0] unused
    std::vector<double> lambda;  // index n

    double lam(int64_t n) const { return lambda[static_cast<std::size_t>(n)]; }
};

// Exact expansion of Delta = q prod (1-q^n)^24 as (prod(1-q^n)^3)^8 with the
// cube expanded by Jacobi's identity; 7 sparse multiplies, parallel over
// coefficient blocks.  Hard cap keeps every coefficient inside 128 bits.
HeckeData delta_coefficients(int64_t n_max);

// Flat cache: magic "TAU1", u64 n_max, then n_max 16-byte little-endian
// signed coefficients tau(1)..tau(n_max).
void write_tau_cache(const std::string& path, const HeckeData& hd);
bool read_tau_cache(const std::string& path, HeckeData& hd);

// Uses KLAB_CACHE_DIR (or dir argument if nonempty) when available.
HeckeData delta_coefficients_cached(int64_t n_max, const std::string& dir = "");

std::string int128_to_string(int128 v);

// Shared tail planning for the dual-side series: largest index that must be
// evaluated so everything beyond is certified below `budget`.  The in-table
// part walks the divisor table against the transform envelope; beyond the
// table a dyadic partial-summation remainder (sum_{n<=x} d(n) <= x(log x + 1),
// and its arithmetic-progression analogue) closes the sum.
struct DualTailPlan {
    int64_t t_eval = 0;
    double tail_bound = 0.0;
};

DualTailPlan plan_dual_tail(double coef_full, double coef_arith, int64_t q, int64_t residue,
                            double kappa, const BesselTransform& wt,
                            const std::vector<int32_t>& div, double budget);

// |LHS - RHS| of the cusp-form Voronoi identity specialized to K = Kl(a.;q).
double cusp_voronoi_residual(const HeckeData& hd, const PrimeContext& ctx, int64_t a,
                             const SmoothWeight& w, double N, const BesselTransform& wt,
                             const std::vector<int32_t>& div, double tol = 1e-6);

// |LHS - RHS| of the additively twisted summation formula.
double twisted_voronoi_residual(const HeckeData& hd, const PrimeContext& ctx, int64_t a,
                                const SmoothWeight& w, double N, const BesselTransform& wt,
                                const std::vector<int32_t>& div, double tol = 1e-6);

// S = sum lambda(n) Kl(an;q) W(n/N) against the correlation-bound envelopes.
BoundReport cuspidal_bound_report(const HeckeData& hd, const PrimeContext& ctx, int64_t a,
                                  const SmoothWeight& w, double N);

// Self-sizing driver: works out the transform range and tau extent the
// certificates demand for (q, N, tol), builds the tables (tau through the
// cache dir when set), and evaluates both residuals.  Tables are kept and
// grown across calls within the process.
struct CuspCheckResult {
    double cusp_residual = 0.0;
    double twisted_residual = 0.0;
    int64_t t_eval = 0;     // dual-series evaluation cutoff
    double y_max = 0.0;     // transform table range used
};

CuspCheckResult cusp_check_auto(int64_t q, int64_t a, double N, double tol,
                                const std::string& cache_dir = "");

}  // namespace klab
