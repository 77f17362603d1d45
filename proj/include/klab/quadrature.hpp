#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace klab {

// Adaptive Clenshaw-Curtis panels: each panel is estimated at 9 and 17 nodes,
// split until the two estimates agree within the panel's share of the
// tolerance.  init_panels seeds the subdivision for oscillatory integrands.
struct QuadOptions {
    double tol = 1e-11;
    int init_panels = 1;
    int max_depth = 32;
    long max_panels = 4'000'000;
};

// nodes (cos(j pi / n)) and weights for the n+1 point rule on [-1, 1]
const std::vector<double>& cc_nodes(int n);
const std::vector<double>& cc_weights(int n);

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadOptions& opt = {});

// Fixed composite Gauss-Legendre(16); no adaptivity, deterministic cost.
double integrate_gl16(const std::function<double(double)>& f, double a, double b, int panels);

const double* gl16_nodes();
const double* gl16_weights();

}  // namespace klab
