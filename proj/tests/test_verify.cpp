#include <cmath>

#include "doctest.h"
#include "ztl/errors.hpp"
#include "ztl/euler_products.hpp"
#include "ztl/verify.hpp"

using namespace ztl;

namespace {

const std::vector<std::string> kNames = {"cfe",  "cfe_corollary",     "cb0",       "cb1",
                                         "cb2",  "f_closed_vs_brute", "b_closed_vs_series",
                                         "fourzetas", "sigma_prime_power", "x_stirling"};

const IdentityReport& find(const std::vector<IdentityReport>& reports, const std::string& name) {
  for (const auto& r : reports) {
    if (r.check_name == name) return r;
  }
  throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST_CASE("verify: ten checks in order, all passing") {
  const auto reports = run_suite(7, 12);
  REQUIRE(reports.size() == kNames.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CAPTURE(kNames[i]);
    CHECK(reports[i].check_name == kNames[i]);
    CHECK(reports[i].seed == 7);
    CHECK(reports[i].pass);
    CHECK(reports[i].pass == (reports[i].max_rel_error <= reports[i].threshold));
    CHECK(reports[i].max_rel_error >= 0.0);
    CHECK(reports[i].worst_case_input.is_object());
    CHECK(reports[i].trials == 12);
  }
  CHECK(find(reports, "cfe").threshold == 1e-10);
  CHECK(find(reports, "cb1").threshold == 1e-9);
  CHECK(find(reports, "f_closed_vs_brute").threshold == 1e-6);
  CHECK(find(reports, "fourzetas").threshold == 1e-4);
  CHECK(find(reports, "sigma_prime_power").threshold == 1e-13);
  CHECK(find(reports, "x_stirling").threshold == 5.0);
}

TEST_CASE("verify: same seed gives identical bytes, any worker count") {
  const std::string a = to_json(run_suite(11, 10)).dump();
  const std::string b = to_json(run_suite(11, 10)).dump();
  VerifyOptions parallel;
  parallel.workers = 3;
  const std::string c = to_json(run_suite(11, 10, parallel)).dump();
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a != to_json(run_suite(12, 10)).dump());
}

TEST_CASE("verify: json schema uses the field names") {
  const auto j = to_json(run_suite(3, 10));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 10);
  for (const auto& entry : j) {
    for (const char* key : {"check_name", "trials", "seed", "max_rel_error", "threshold", "pass", "worst_case_input"}) {
      CHECK(entry.contains(key));
    }
  }
}

TEST_CASE("verify: a perturbed C^(1) coefficient fails the C identities") {
  std::vector<IdentityReport> reports;
  {
    const testing::CFaultInjection fault(1e-6);
    reports = run_suite(42, 10);
  }
  for (const char* name : {"cfe", "cfe_corollary", "cb0", "cb1", "cb2"}) {
    CAPTURE(name);
    CHECK_FALSE(find(reports, name).pass);
  }
  for (const char* name : {"b_closed_vs_series", "sigma_prime_power", "x_stirling"}) {
    CAPTURE(name);
    CHECK(find(reports, name).pass);
  }
  // The hook is released with its guard.
  CHECK(find(run_suite(42, 10), "cfe").pass);
}

TEST_CASE("verify: too few trials") {
  CHECK_THROWS_AS((void)run_suite(1, 9), DomainError);
}
