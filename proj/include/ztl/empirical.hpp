#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ztl/arithmetic.hpp"
#include "ztl/main_term.hpp"
#include "ztl/shifts.hpp"

namespace ztl {

struct EmpiricalResult {
  Complex value;
  /// Successive totals agreed to the refinement tolerance (always true when
  /// max_refinements is 0, since no comparison is requested).
  bool converged = true;
  int refinements = 0;
  /// Relative change between the last two levels; 0 without refinement.
  double last_relative_change = 0.0;
  std::vector<std::string> warnings;
};

/// Desk-scale limits of the empirical integral.
inline constexpr std::uint64_t kMaxTwistProduct = 1000;
inline constexpr double kMaxEmpiricalHeight = 8000.0;

/// integral of (h/k)^{-it} prod_i zeta(1/2+alpha_i+it) prod_j zeta(1/2+beta_j-it) w(t) dt
/// by composite Gauss-Legendre quadrature over the weight's support. Panels
/// are halved until successive totals agree to q.refinement_tolerance or
/// q.max_refinements is used up; non-convergence is reported, not thrown.
/// Requires ell in {1,2,3}, pair.ell() == ell, gcd(h,k) = 1, hk <= 1000 and T <= 8000.
EmpiricalResult empirical_moment(int ell, const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                                 const WeightSpec& w, const QuadSpec& q, int workers = 1);

enum class CompareMode { theorem1, conjecture };

const char* to_string(CompareMode mode);

struct CompareOptions {
  MainTermOptions main;
  int workers = 1;
  /// Records runtime_s in the report (off by default so reruns stay byte-identical).
  bool timings = false;
  std::uint64_t seed = 0;
};

/// Main term and empirical integral side by side. theorem1 mode requires
/// ell = 2. Errors from either side are recorded in report.errors.
MomentReport compare_report(const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                            const WeightSpec& w, const QuadSpec& q, CompareMode mode,
                            const CompareOptions& options = {});

/// compare_report at each T with WeightSpec::standard(T, T0).
std::vector<MomentReport> sweep(const std::vector<double>& heights, std::optional<double> T0,
                                const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                                const QuadSpec& q, CompareMode mode, const CompareOptions& options = {});

}  // namespace ztl
