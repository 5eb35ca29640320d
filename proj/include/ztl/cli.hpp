#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ztl/shifts.hpp"

namespace ztl {

enum class Command { verify, main_term, empirical, compare, sweep, conjecture };
enum class OutputFormat { json, csv };

struct RunConfig {
  Command command = Command::verify;
  std::uint64_t h = 1;
  std::uint64_t k = 1;
  std::vector<double> T;
  std::optional<double> T0;  // nullopt means T / 8
  std::vector<Complex> shifts;
  int ell = 2;
  std::uint64_t seed = 42;
  int trials = 200;
  std::string output_path = "-";
  OutputFormat format = OutputFormat::json;
  int workers = 1;
  bool timings = false;
};

/// Parses "a", "a+bi", "a-bi" or "bi" entries separated by commas.
/// Throws DomainError on malformed input.
std::vector<Complex> parse_shift_list(const std::string& text);

/// Runs one command. argv[0] is the program name. ZTL_WORKERS in `environment`
/// sets the worker count unless --workers is given. Returns 0 on success, 1
/// when results carry warnings, errors or failed checks, 2 on usage errors.
int run_cli(const std::vector<std::string>& argv, const std::map<std::string, std::string>& environment,
            std::ostream& out, std::ostream& err);

}  // namespace ztl
