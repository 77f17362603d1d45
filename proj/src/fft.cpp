#include "klab/fft.hpp"

#include <cmath>
#include <numbers>

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
}  // namespace

void fft_pow2(std::vector<cdouble>& a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    // tabulated twiddles; incremental w *= wl drifts too much at n ~ 2^18
    std::vector<cdouble> tw(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = sign * 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        tw[k] = cdouble(std::cos(ang), std::sin(ang));
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble u = a[i + k];
                cdouble v = a[i + k + len / 2] * tw[k * stride];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

BluesteinPlan::BluesteinPlan(std::size_t n) : n_(n) {
    len_ = next_pow2(2 * n - 1);
    chirp_.resize(n);
    // j^2 mod 2n keeps the sincos argument small for large n
    const std::size_t two_n = 2 * n;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t j2 = (j * j) % two_n;  // assumes n < 2^31 so j*j fits
        double ang = kPi * static_cast<double>(j2) / static_cast<double>(n);
        chirp_[j] = cdouble(std::cos(ang), std::sin(ang));
    }
    std::vector<cdouble> b(len_, cdouble(0.0, 0.0));
    b[0] = std::conj(chirp_[0]);
    for (std::size_t j = 1; j < n; ++j) {
        b[j] = std::conj(chirp_[j]);
        b[len_ - j] = std::conj(chirp_[j]);
    }
    fft_pow2(b, +1);
    kernel_fft_ = std::move(b);
}

std::vector<cdouble> BluesteinPlan::forward(const std::vector<cdouble>& x) const {
    std::vector<cdouble> a(len_, cdouble(0.0, 0.0));
    for (std::size_t j = 0; j < n_; ++j) a[j] = x[j] * chirp_[j];
    fft_pow2(a, +1);
    for (std::size_t j = 0; j < len_; ++j) a[j] *= kernel_fft_[j];
    fft_pow2(a, -1);
    const double inv = 1.0 / static_cast<double>(len_);
    std::vector<cdouble> out(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = a[k] * inv * chirp_[k];
    return out;
}

std::vector<cdouble> BluesteinPlan::backward(const std::vector<cdouble>& x) const {
    std::vector<cdouble> xc(n_);
    for (std::size_t j = 0; j < n_; ++j) xc[j] = std::conj(x[j]);
    std::vector<cdouble> y = forward(xc);
    for (auto& v : y) v = std::conj(v);
    return y;
}

std::vector<cdouble> dft(const std::vector<cdouble>& x, int sign) {
    const std::size_t n = x.size();
    if (n <= 16) return dft_naive(x, sign);
    BluesteinPlan plan(n);
    return sign >= 0 ? plan.forward(x) : plan.backward(x);
}

std::vector<cdouble> dft_naive(const std::vector<cdouble>& x, int sign) {
    const std::size_t n = x.size();
    std::vector<cdouble> out(n, cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cdouble acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double ang = sign * 2.0 * kPi * static_cast<double>((j * k) % n) /
                         static_cast<double>(n);
            acc += x[j] * cdouble(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace klab
