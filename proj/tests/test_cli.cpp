#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ztl/cli.hpp"
#include "ztl/errors.hpp"

using namespace ztl;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  args.insert(args.begin(), "ztl");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, env, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("parse_shift_list: accepted forms") {
  const auto v = parse_shift_list("0.1, -0.2+0.3i,0.05-1e-2i, 0.4i,-i,1e-3");
  REQUIRE(v.size() == 6);
  CHECK(v[0] == Complex(0.1, 0.0));
  CHECK(v[1] == Complex(-0.2, 0.3));
  CHECK(v[2] == Complex(0.05, -0.01));
  CHECK(v[3] == Complex(0.0, 0.4));
  CHECK(v[4] == Complex(0.0, -1.0));
  CHECK(v[5] == Complex(1e-3, 0.0));
  CHECK(parse_shift_list("1e-2+2e-3i") == std::vector<Complex>{Complex(0.01, 0.002)});
  CHECK(parse_shift_list("").empty());
}

TEST_CASE("parse_shift_list: malformed input") {
  CHECK_THROWS_AS((void)parse_shift_list("0.1,,0.2"), DomainError);
  CHECK_THROWS_AS((void)parse_shift_list("abc"), DomainError);
  CHECK_THROWS_AS((void)parse_shift_list("0.1+0.2j"), DomainError);
  CHECK_THROWS_AS((void)parse_shift_list("0.1+"), DomainError);
  CHECK_THROWS_AS((void)parse_shift_list("0.1,"), DomainError);
}

TEST_CASE("cli: usage errors exit with 2 and print help") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"bogus"},
           {"main-term"},
           {"main-term", "--T", "500", "--frobnicate"},
           {"main-term", "--T", "500", "--h", "6", "--k", "4"},
           {"main-term", "--T", "500", "--shifts", "0.1,0.2"},
           {"main-term", "--T", "500", "--shifts", "0.1,x,0,0"},
           {"main-term", "--T", "500", "--T0", "1000"},
           {"main-term", "--T", "500,600"},
           {"main-term", "--T", "500", "--format", "xml"},
           {"conjecture", "--T", "500", "--ell", "5"},
           {"verify", "--trials", "3"},
       }) {
    CAPTURE(args.size());
    const Run r = run(args);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("error") != std::string::npos);
    CHECK(r.err.find("Usage") != std::string::npos);
  }
  CHECK(run({"main-term", "--T", "500"}, {{"ZTL_WORKERS", "zero"}}).code == 2);
  CHECK(run({"main-term", "--T", "500"}, {{"ZTL_WORKERS", "0"}}).code == 2);
}

TEST_CASE("cli: help exits with 0") {
  const Run r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("cli: main-term JSON and CSV") {
  const Run j = run({"main-term", "--h", "3", "--k", "2", "--T", "1000", "--shifts", "0.01,0.02-0.01i,0.03,0.01i"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::ordered_json::parse(j.out);
  CHECK(doc["terms"].size() == 6);
  CHECK(doc["metadata"]["h"] == 3);
  CHECK(doc["metadata"]["seed"] == 42);
  CHECK(doc["metadata"]["shifts"]["betas"][1]["im"] == 0.01);
  CHECK_FALSE(doc["metadata"].contains("runtime_s"));

  const Run c = run({"main-term", "--h", "3", "--k", "2", "--T", "1000", "--shifts", "0.01,0.02-0.01i,0.03,0.01i",
                     "--format", "csv"});
  REQUIRE(c.code == 0);
  CHECK(c.out.rfind("label,re,im\n", 0) == 0);
  const double total = doc["main_term_total"]["re"].get<double>();
  const auto pos = c.out.find("total,");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(c.out.substr(pos + 6)) == total);
}

TEST_CASE("cli: timings are opt-in") {
  const Run r = run({"conjecture", "--ell", "1", "--T", "500", "--timings"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::ordered_json::parse(r.out)["metadata"].contains("runtime_s"));
}

TEST_CASE("cli: worker count does not change the output bytes") {
  const std::vector<std::string> args{"compare", "--h", "3", "--k", "2", "--T", "500", "--format", "csv"};
  const Run one = run(args);
  const Run env = run(args, {{"ZTL_WORKERS", "3"}});
  auto flagged = args;
  flagged.insert(flagged.end(), {"--workers", "2"});
  const Run flag = run(flagged, {{"ZTL_WORKERS", "3"}});
  REQUIRE(one.code == 0);
  CHECK(one.out.rfind("T,T0,main_re,main_im,emp_re,emp_im,rel_disc,runtime_s\n", 0) == 0);
  CHECK(one.out == env.out);
  CHECK(one.out == flag.out);
}

TEST_CASE("cli: recorded errors exit with 1") {
  // The empirical side rejects hk > 1000; the main term still reports.
  const Run r = run({"compare", "--h", "41", "--k", "27", "--T", "500"});
  CHECK(r.code == 1);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  CHECK(doc["errors"].size() == 1);
  CHECK(doc["empirical_value"].is_null());
}

TEST_CASE("cli: sweep and empirical") {
  const Run s = run({"sweep", "--ell", "1", "--T", "500,600", "--format", "csv"});
  REQUIRE(s.code == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 3);
  CHECK(s.out.find("\n600,75,") != std::string::npos);

  const Run e = run({"empirical", "--ell", "1", "--T", "500"});
  REQUIRE(e.code == 0);
  const auto doc = nlohmann::ordered_json::parse(e.out);
  CHECK(doc["converged"] == true);
  CHECK(doc["metadata"]["mode"] == "empirical");
  CHECK(doc["empirical_value"]["re"].get<double>() > 0.0);
}

TEST_CASE("cli: --out writes the file") {
  const std::string path = "test_cli_out.csv";
  std::remove(path.c_str());
  const Run r = run({"conjecture", "--ell", "1", "--T", "500", "--format", "csv", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream file(path);
  std::stringstream contents;
  contents << file.rdbuf();
  CHECK(contents.str().rfind("label,re,im\n", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("cli: verify CSV layout") {
  const Run r = run({"verify", "--trials", "10", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("check_name,trials,seed,max_rel_error,threshold,pass\ncfe,10,42,", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 11);
  CHECK(r.out.find(",false\n") == std::string::npos);
}
