#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace klab {

using cdouble = std::complex<double>;

// In-place radix-2 FFT, n a power of two.  sign = +1 computes
// X_k = sum_n x_n e^{+2*pi*i*nk/n}, sign = -1 the conjugate kernel.
// No normalization.
void fft_pow2(std::vector<cdouble>& a, int sign);

// Chirp-z (Bluestein) plan for a fixed arbitrary length n: reduces the
// length-n DFT to three power-of-two FFTs.  Positive-exponent kernel,
// no normalization.  Reusable across many transforms of the same length.
class BluesteinPlan {
  public:
    explicit BluesteinPlan(std::size_t n);
    std::size_t size() const { return n_; }
    // X_k = sum_{j<n} x_j e^{+2 pi i jk/n}
    std::vector<cdouble> forward(const std::vector<cdouble>& x) const;
    // conjugate-kernel transform (e^{-2 pi i jk/n})
    std::vector<cdouble> backward(const std::vector<cdouble>& x) const;

  private:
    std::size_t n_;
    std::size_t len_;                  // padded power of two, >= 2n-1
    std::vector<cdouble> chirp_;       // e^{i pi j^2 / n}, j < n
    std::vector<cdouble> kernel_fft_;  // FFT of the wrapped conjugate chirp
};

// One-shot positive-exponent DFT of arbitrary length (naive for tiny n,
// Bluestein otherwise).
std::vector<cdouble> dft(const std::vector<cdouble>& x, int sign = +1);

// Naive O(n^2) reference transform; the oracle the fast path is tested against.
std::vector<cdouble> dft_naive(const std::vector<cdouble>& x, int sign = +1);

}  // namespace klab
