#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "ztl/arithmetic.hpp"
#include "ztl/shifts.hpp"

namespace ztl {

/// Local factors with a removable (1 - x) or (x - y) denominator use the
/// polynomial form below this distance (and always for exponents up to 64).
inline constexpr double kLocalConfluenceThreshold = 1e-6;

/// A(s) = zeta(1+s+a+c) zeta(1+s+a+d) zeta(1+s+b+c) zeta(1+s+b+d) / zeta(2+2s+a+b+c+d)
/// for shifts (a, b, c, d). Throws PoleError naming the offending factor when s
/// lies within 1e-8 of one of its poles.
Complex A_value(const ShiftQuad& shifts, Complex s);

/// Residue of A(2s) at s = (-alpha-gamma)/2:
/// (1/2) zeta(1-a+b) zeta(1-c+d) zeta(1-a+b-c+d) / zeta(2-a+b-c+d).
/// Throws ConfluentShiftError unless alpha != beta, gamma != delta and
/// alpha+gamma != beta+delta (separation 1e-6).
Complex A_residue_confluent(const ShiftQuad& shifts);

/// B_{a,b,c,d,h,k}(s) from the closed-form local factors.
Complex B_value(const ShiftQuad& shifts, const FactoredNat& h, const FactoredNat& k, Complex s);

/// The same quantity summed from its defining j-series at every p | hk.
Complex B_series(const ShiftQuad& shifts, const FactoredNat& h, const FactoredNat& k, Complex s);

/// C_{a,b,c,d,h,k}(s) = C_{a,b,c,d,h}(s) C_{c,d,a,b,k}(s).
Complex C_value(const ShiftQuad& shifts, const FactoredNat& h, const FactoredNat& k, Complex s);

/// Z = A * B.
Complex Z_value(const ShiftQuad& shifts, const FactoredNat& h, const FactoredNat& k, Complex s);

/// F(a, b, 1 + c) for the double sum
/// F(a, b, c) = sum_{r,l} c_l(r) (h,l)^a (k,l)^b l^{-a-b} r^{-c}.
/// Requires Re(a+b) > 1 and Re(c) > 0.
Complex F_closed(Complex a, Complex b, Complex c, const FactoredNat& h, const FactoredNat& k);

struct ZGeneralResult {
  Complex value;
  /// Estimated absolute error from the tail of the Euler product.
  double tail_bound = 0.0;
};

inline constexpr std::uint32_t kDefaultPrimeCutoff = 10'000;

/// Z_{alpha;beta}(s) = sum_l sigma_alpha(k l) sigma_beta(h l) l^{-1-2s}, as
/// prod_{i,j} zeta(1+2s+alpha_i+beta_j) times the Euler product of the
/// remaining factor (exact up to prime_cutoff, tail from a prime-zeta
/// expansion) times the finite product over p | hk.
ZGeneralResult Z_general(const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k, Complex s,
                         std::uint32_t prime_cutoff = kDefaultPrimeCutoff);

/// Removable-singularity evaluation by averaging over a circle in a shift
/// direction.
struct ConfluenceSpec {
  std::vector<double> direction;
  double radius = 0.01;
  int points = 16;

  /// Throws DomainError on duplicate or zero entries, entries summing to
  /// zero, radius outside (0, 0.05] or fewer than 8 points.
  void validate() const;

  /// (1, 2, 3, 5, 7, 11, 13, 17) truncated to n entries.
  static ConfluenceSpec standard(std::size_t n, double radius = 0.01, int points = 16);
};

/// (1/M) sum_j f(radius e^{2 pi i j / M}). Exceptions from f are rethrown as
/// DomainError carrying the sample point.
Complex confluent_eval(const std::function<Complex(Complex)>& f, const ConfluenceSpec& spec);

namespace testing {

/// Adds `perturbation` to the p^{gamma-delta} coefficient of the C^(1) local
/// numerator while alive. Test-only; not for concurrent use with unrelated
/// C evaluations.
class CFaultInjection {
 public:
  explicit CFaultInjection(double perturbation);
  ~CFaultInjection();
  CFaultInjection(const CFaultInjection&) = delete;
  CFaultInjection& operator=(const CFaultInjection&) = delete;
};

}  // namespace testing

}  // namespace ztl
