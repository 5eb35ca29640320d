#include "ztl/shifts.hpp"

#include <cstdio>

#include "ztl/errors.hpp"

namespace ztl {
namespace {

void check_magnitude(Complex z, const char* what) {
  if (!(std::abs(z) <= kMaxShiftMagnitude)) {
    throw DomainError(std::string(what) + " " + format_complex(z) + " exceeds the shift bound 0.2");
  }
}

}  // namespace

void ShiftQuad::validate() const {
  check_magnitude(alpha, "alpha");
  check_magnitude(beta, "beta");
  check_magnitude(gamma, "gamma");
  check_magnitude(delta, "delta");
}

void ShiftTuplePair::validate() const {
  if (alphas.empty()) throw DomainError("ShiftTuplePair: ell must be at least 1");
  if (alphas.size() != betas.size()) throw DomainError("ShiftTuplePair: alphas and betas differ in length");
  for (const auto a : alphas) check_magnitude(a, "alpha_i");
  for (const auto b : betas) check_magnitude(b, "beta_j");
}

std::string format_complex(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

}  // namespace ztl
