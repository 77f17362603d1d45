#pragma once

#include <complex>
#include <vector>

#include "klab/arith.hpp"
#include "klab/weights.hpp"

namespace klab {

// q-periodic complex function as a length-q table indexed by residue.
struct PeriodicFunction {
    int64_t q = 0;
    std::vector<cdouble> values;

    cdouble at(int64_t n) const {
        int64_t r = n % q;
        if (r < 0) r += q;
        return values[static_cast<std::size_t>(r)];
    }
};

PeriodicFunction kloosterman_function(const PrimeContext& ctx, int64_t a = 1);

// hat K(h) = q^{-1/2} sum_n K(n) e_q(h n); unitary.
PeriodicFunction fourier_transform(const PeriodicFunction& K);
PeriodicFunction fourier_transform_direct(const PeriodicFunction& K);  // O(q^2) oracle

// check K(n) = q^{-1/2} sum_{(h,q)=1} hat K(h) e_q(hbar n)
PeriodicFunction voronoi_transform(const PeriodicFunction& K, const PrimeContext& ctx);

// K(n) = Kl(an;q): max deviation of hat K / check K from their closed forms.
double verify_kloosterman_lemma(const PrimeContext& ctx, int64_t a);

// G(x,y) = W1(x/M) W2(y/N); hat G separates into weight transforms.
struct TestFunction2D {
    const SmoothWeight* w1;
    const SmoothWeight* w2;
    double M, N;

    double operator()(double x, double y) const { return (*w1)(x / M) * (*w2)(y / N); }
    cdouble fourier(double u, double v) const {
        return M * w1->fourier(u * M) * N * w2->fourier(v * N);
    }
    // certified |hat G(u,v)| factor bounds
    double bound_u(double u) const { return M * w1->fourier_bound(u * M); }
    double bound_v(double v) const { return N * w2->fourier_bound(v * N); }
    double x_lo() const { return M * w1->support_lo(); }
    double x_hi() const { return M * w1->support_hi(); }
    double y_lo() const { return N * w2->support_lo(); }
    double y_hi() const { return N * w2->support_hi(); }
};

struct TailPolicy {
    double tol = 1e-8;          // target for the certified lattice tail
    int64_t max_radius = 2'000'000;  // per-axis truncation cap
};

// |LHS - RHS| of the tempered Voronoi identity, the two sides evaluated
// by disjoint code paths (direct double sum vs transforms + quadrature).
double tempered_voronoi_residual(const PeriodicFunction& K, const TestFunction2D& G,
                                 const TailPolicy& policy, const PrimeContext& ctx);

}  // namespace klab
