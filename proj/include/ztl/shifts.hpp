#pragma once

#include <complex>
#include <string>
#include <vector>

namespace ztl {

using Complex = std::complex<double>;

/// Largest shift magnitude accepted by ShiftQuad and ShiftTuplePair.
inline constexpr double kMaxShiftMagnitude = 0.2;

/// The four shifts (alpha, beta, gamma, delta) of the twisted fourth moment.
/// alpha, beta enter zeta(1/2 + . + it); gamma, delta enter zeta(1/2 + . - it).
struct ShiftQuad {
  Complex alpha{};
  Complex beta{};
  Complex gamma{};
  Complex delta{};

  /// Throws DomainError when a shift exceeds kMaxShiftMagnitude.
  void validate() const;

  [[nodiscard]] Complex sum() const { return alpha + beta + gamma + delta; }

  friend bool operator==(const ShiftQuad&, const ShiftQuad&) = default;
};

/// Shifts of the general 2l-th moment: alphas enter with +it, betas with -it.
struct ShiftTuplePair {
  std::vector<Complex> alphas;
  std::vector<Complex> betas;

  void validate() const;

  [[nodiscard]] std::size_t ell() const { return alphas.size(); }

  /// (alpha, beta; gamma, delta) as a two-by-two pair.
  static ShiftTuplePair from_quad(const ShiftQuad& q) { return {{q.alpha, q.beta}, {q.gamma, q.delta}}; }

  friend bool operator==(const ShiftTuplePair&, const ShiftTuplePair&) = default;
};

std::string format_complex(Complex z);

}  // namespace ztl
