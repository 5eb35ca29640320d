#pragma once

#include <cmath>
#include <complex>

namespace ztl {

/// Neumaier (improved Kahan) accumulator. The result does not depend on the
/// magnitude ordering of the addends, only on their sequence.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) {
    add(value);
    return *this;
  }

  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Componentwise compensated accumulation of complex values.
class CompensatedComplexSum {
 public:
  CompensatedComplexSum& operator+=(std::complex<double> value) {
    re_.add(value.real());
    im_.add(value.imag());
    return *this;
  }

  [[nodiscard]] std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace ztl
