#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "klab/quadrature.hpp"

namespace klab {

using cdouble = std::complex<double>;

// Derivatives of the unit mollifier psi(t) = exp(-1/(1-t^2)) / mass on
// [-1, 1]: psi^(j) = N_j(t) / (1-t^2)^{2j} * psi with N_j polynomial.
// Shared static machinery; order capped at kPsiMaxDeriv.
inline constexpr int kPsiMaxDeriv = 13;

double psi_value(double t);            // normalized, unit mass
double psi_derivative(int j, double t);
double psi_cdf(double t);              // int_{-1}^{t} psi
double psi_deriv_sup(int j);           // sup |psi^(j)|
double psi_deriv_l1(int j);            // int |psi^(j)|

// hat psi(s) = int psi(u) e(-su) du (real, even); spectral table + Lagrange,
// valid for |s| <= 500
double psi_hat(double s);

// Mollified indicator: the indicator of [lo+margin, hi-margin] convolved with
// the unit mollifier scaled to half-width `margin`.  Support is exactly
// [lo, hi], plateau [lo+2*margin, hi-2*margin], 0 <= W <= 1.
class SmoothWeight {
  public:
    SmoothWeight(double Q, double lo, double hi, double margin);

    double operator()(double x) const;
    double derivative(int j, double x) const;  // analytic, j up to kPsiMaxDeriv+1

    double q_param() const { return Q_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    double plateau_lo() const { return lo_ + 2 * margin_; }
    double plateau_hi() const { return hi_ - 2 * margin_; }
    double margin() const { return margin_; }
    double mass() const { return (hi_ - lo_) - 2 * margin_; }  // exact

    // |W^(j)| <= deriv_sup(j); certificate constants c_j with
    // |W^(j)| <= c_j (kappa Q)^j are deriv_sup(j) / (kappa Q)^j, kappa = 1/(margin Q).
    double deriv_sup(int j) const;
    double deriv_l1(int j) const;  // int |W^(j)|

    // hat W(t) = int W(x) e(-t x) dx; exact boxcar x mollifier factorization
    cdouble fourier(double t) const;
    cdouble fourier_direct(double t) const;  // adaptive quadrature oracle
    // certified |hat W(t)| <= fourier_bound(t) = min_j deriv_l1(j)/(2 pi |t|)^j
    double fourier_bound(double t) const;
    int max_decay_order() const { return kPsiMaxDeriv + 1; }

  private:
    double Q_, lo_, hi_, margin_;
};

// (Wbound)-style bump on [lo, hi] with derivative scale Q: margin 1/(4Q).
SmoothWeight make_bump(double Q, double lo, double hi);

struct SandwichPair {
    SmoothWeight outer;  // support [1-delta, 3/2+delta], == 1 on [1, 3/2]
    SmoothWeight inner;  // support [1, 3/2],            == 1 on [1+delta, 3/2-delta]
};

SandwichPair sharp_cutoff_sandwich(double delta);

// W~(y) = 2 pi i^k int_0^inf W(u) J_{k-1}(4 pi sqrt(u y)) du, real for even k.
// One-off evaluation by oscillation-aware quadrature.
double bessel_transform(const SmoothWeight& w, int k, double y);

// Batched evaluator for W~ plus its certified decay data.  Builds an
// interpolation table in s = sqrt(y) (where the oscillation is uniform),
// verified against direct quadrature, plus integration-by-parts constants
// |W~(y)| <= 2 pi min_j ||h_j||_1 (4 pi sqrt(y))^{-j} for the far tail.
class BesselTransform {
  public:
    BesselTransform(const SmoothWeight& w, int k, double y_max);

    double operator()(double y) const;   // table interpolation (or direct near 0)
    double bound(double y) const;        // certified envelope, valid for all y >= 0
    // pick the strongest power-law branch at y: |W~(u)| <= C u^{-A} for u >= y
    double tail_exponent(double y, double& constant) const;
    double y_max() const { return y_max_; }
    int weight_k() const { return k_; }
    // decay constants ||h_j||_1 (j = 0 is the plain mass bound)
    const std::vector<double>& ibp_constants() const { return h_l1_; }

  private:
    double direct(double s) const;  // quadrature at s = sqrt(y)

    SmoothWeight w_;
    int k_;
    double sign_;     // i^k for even k
    double y_max_;
    double s_max_;
    double step_;
    std::vector<double> table_;      // W~(s_i^2)
    std::vector<double> h_l1_;
    std::vector<double> emp_env_;    // per-node |W~| envelope with safety
    double v_lo_, v_hi_;             // sqrt of support
    // composite-GL v-grids, one per octave of s (coarser panels for small s)
    struct Tier {
        double s_cap;
        std::vector<double> v, gw;
    };
    std::vector<Tier> tiers_;
};

}  // namespace klab
