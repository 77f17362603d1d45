#pragma once

#include <complex>

namespace klab {

// Neumaier variant of Kahan accumulation.  All long sums in this project run
// through one of these so that q ~ 1e6 unit-modulus terms keep ~1e-12 absolute
// accuracy regardless of ordering.
class KahanSum {
  public:
    void add(double x) {
        double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

class KahanSumComplex {
  public:
    void add(std::complex<double> z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

  private:
    KahanSum re_;
    KahanSum im_;
};

}  // namespace klab
