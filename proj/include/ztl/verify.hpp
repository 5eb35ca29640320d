#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace ztl {

struct IdentityReport {
  std::string check_name;
  int trials = 0;
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// The sample that produced max_rel_error.
  nlohmann::ordered_json worst_case_input;

  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct VerifyOptions {
  int workers = 1;
};

/// The ten identity checks, always in this order:
/// cfe, cfe_corollary, cb0, cb1, cb2, f_closed_vs_brute, b_closed_vs_series,
/// fourzetas, sigma_prime_power, x_stirling.
/// Requires trials >= 10. Failures are reported, never thrown.
std::vector<IdentityReport> run_suite(std::uint64_t seed, int trials, const VerifyOptions& options = {});

nlohmann::ordered_json to_json(const std::vector<IdentityReport>& reports);

}  // namespace ztl
