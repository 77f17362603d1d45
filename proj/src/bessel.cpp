#include "klab/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;

double bessel_taylor(int nu, double x) {
    // J_nu(x) = sum_k (-1)^k (x/2)^{nu+2k} / (k! (nu+k)!)
    double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= nu; ++i) term *= half / i;
    double sum = term;
    double h2 = half * half;
    for (int k = 1; k <= 64; ++k) {
        term *= -h2 / (static_cast<double>(k) * (nu + k));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return sum;
}

// Hankel asymptotic expansion for nu <= 1, used once x >= 120.
double bessel_asymptotic01(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0;
    double a = 1.0;
    double sign_p = -1.0, sign_q = 1.0;
    for (int k = 1; k <= 14; ++k) {
        double odd = 2.0 * k - 1.0;
        a *= (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(a) < 1e-19) break;
        if (k % 2 == 1) {
            q += sign_q * a;
            sign_q = -sign_q;
        } else {
            p += sign_p * a;
            sign_p = -sign_p;
        }
    }
    double chi = x - (2 * nu + 1) * kPi / 4.0;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_miller(int nu, double x) {
    int m = std::max(nu, static_cast<int>(x)) + 32;
    if (m % 2) ++m;
    double jp = 0.0, j = 1e-280;
    double result = (nu == m) ? j : 0.0;
    double norm = 0.0;
    for (int n = m; n > 0; --n) {
        double jm = (2.0 * n / x) * j - jp;
        jp = j;
        j = jm;
        if (n - 1 == nu) result = j;
        if ((n - 1) % 2 == 0) norm += (n - 1 == 0) ? j : 2.0 * j;
        if (std::abs(j) > 1e270) {
            j *= 1e-270;
            jp *= 1e-270;
            result *= 1e-270;
            norm *= 1e-270;
        }
    }
    return result / norm;
}
}  // namespace

double bessel_j(int nu, double x) {
    if (nu < 0 || nu > 40) throw std::invalid_argument("bessel_j: order out of range");
    if (x < 0) throw std::invalid_argument("bessel_j: negative argument");
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    if (x <= 12.0) return bessel_taylor(nu, x);
    // Hankel truncation error only reaches ~1e-19 past x ~ 120; Miller covers
    // the long middle range at full precision
    if (x < 120.0) return bessel_miller(nu, x);
    double j0 = bessel_asymptotic01(0, x);
    if (nu == 0) return j0;
    double j1 = bessel_asymptotic01(1, x);
    double prev = j0, cur = j1;
    for (int n = 1; n < nu; ++n) {
        double next = (2.0 * n / x) * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace klab
