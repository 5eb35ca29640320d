#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ztl/shifts.hpp"

namespace ztl {

using Complex = std::complex<double>;

/// Mathematical constants used across the library.
struct MathConstants {
  static constexpr double euler_gamma = 0.57721566490153286061;
  static constexpr double pi = std::numbers::pi;
};

/// Euler-Maclaurin configuration for zeta. The cutoff is
/// N = max(n_min, ceil(terms_per_unit_height * |Im s|)) and K Bernoulli
/// correction terms are added.
struct ZetaParams {
  double terms_per_unit_height = 1.3;
  int n_min = 32;
  int bernoulli_order = 12;

  /// Throws DomainError when a field is out of range.
  void validate() const;

  [[nodiscard]] std::int64_t cutoff(double height) const;
};

/// Riemann zeta by Euler-Maclaurin summation with compensated accumulation.
/// Requires s != 1, |Im s| <= 1e5 and Re s >= -2.
Complex zeta(Complex s, const ZetaParams& params = {});

/// zeta(1 + x) with x supplied directly, so that the pole part 1/x keeps full
/// relative precision for tiny x.
Complex zeta_one_plus(Complex x, const ZetaParams& params = {});

/// Evaluates zeta(1/2 + shift_i + it) for a fixed set of shifts at many
/// heights t. Tables (logarithms, smallest prime factors and the per-shift
/// coefficients n^{-1/2-shift}) are built once; the phases n^{-it} are
/// generated once per height and shared by all shifts. Immutable after
/// construction, so one kernel may be used from any number of threads.
class CriticalLineZeta {
 public:
  CriticalLineZeta(std::vector<Complex> shifts, double max_height, const ZetaParams& params = {});

  /// Values in the order of the constructor's shift list.
  [[nodiscard]] std::vector<Complex> evaluate(double t) const;

  [[nodiscard]] std::span<const Complex> shifts() const { return shifts_; }
  [[nodiscard]] double max_height() const { return max_height_; }

 private:
  std::vector<Complex> shifts_;
  double max_height_;
  ZetaParams params_;
  std::vector<double> log_n_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::vector<Complex>> coefficients_;  // [shift][n] = n^{-1/2-shift}
};

/// zeta(1/2 + shift_i + it) for every shift, sharing the phases n^{-it}.
/// Requires t >= 1 and |shift_i| <= 0.5.
std::vector<Complex> zeta_critical_batch(double t, std::span<const Complex> shifts, const ZetaParams& params = {});

/// A logarithm of Gamma(z) (the imaginary part is not branch-normalized).
/// Lanczos approximation with reflection for Re z < 1/2.
Complex log_gamma(Complex z);

/// Gamma(z). Throws PoleError at non-positive integers and RangeError for
/// |z| > 1e5.
Complex gamma(Complex z);

enum class XFactorMode { exact, asymptotic };

/// The product of gamma ratios X_{alpha,beta,gamma,delta,t} (exact), or its
/// Stirling leading term (t / 2 pi)^{-alpha-beta-gamma-delta} (asymptotic).
/// Requires t >= 2.
Complex x_factor(const ShiftQuad& shifts, double t, XFactorMode mode);

/// X(s) = pi^s Gamma((1/2 - s)/2) / Gamma((1/2 + s)/2), so that
/// zeta(1/2 + s) = X(s) zeta(1/2 - s).
Complex chi_symmetric(Complex s);

}  // namespace ztl
