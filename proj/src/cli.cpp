#include "ztl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ztl/arithmetic.hpp"
#include "ztl/empirical.hpp"
#include "ztl/errors.hpp"
#include "ztl/main_term.hpp"
#include "ztl/verify.hpp"

namespace ztl {
namespace {

using nlohmann::ordered_json;

// Thrown for problems in the command line itself; maps to exit code 2.
struct UsageError : Error {
  using Error::Error;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(trim(item));
  if (!text.empty() && text.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw DomainError("malformed " + what + " '" + text + "'");
  return value;
}

std::string csv_number(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::string csv_optional(const std::optional<double>& x) { return x ? csv_number(*x) : std::string(); }

const char* kSweepHeader = "T,T0,main_re,main_im,emp_re,emp_im,rel_disc,runtime_s";

std::string sweep_row(const MomentReport& r) {
  std::string row = csv_number(r.weight.T) + "," + csv_number(r.weight.T0) + ",";
  const bool main_failed = std::any_of(r.errors.begin(), r.errors.end(),
                                       [](const std::string& e) { return e.rfind("main term", 0) == 0; });
  if (!main_failed) {
    row += csv_number(r.main_term_total.real()) + "," + csv_number(r.main_term_total.imag()) + ",";
  } else {
    row += ",,";
  }
  if (r.empirical_value) {
    row += csv_number(r.empirical_value->real()) + "," + csv_number(r.empirical_value->imag()) + ",";
  } else {
    row += ",,";
  }
  row += csv_optional(r.rel_discrepancy) + "," + csv_optional(r.runtime_s);
  return row;
}

bool report_flagged(const MomentReport& r) { return !r.warnings.empty() || !r.errors.empty(); }

struct CommandOutput {
  std::string text;
  bool flagged = false;
};

ShiftTuplePair split_pair(const std::vector<Complex>& shifts, int ell) {
  if (shifts.empty()) {
    return {std::vector<Complex>(static_cast<std::size_t>(ell), 0.0),
            std::vector<Complex>(static_cast<std::size_t>(ell), 0.0)};
  }
  if (shifts.size() != 2 * static_cast<std::size_t>(ell)) {
    throw UsageError("--shifts needs 2*ell = " + std::to_string(2 * ell) + " entries, got " +
                     std::to_string(shifts.size()));
  }
  const auto mid = shifts.begin() + ell;
  return {{shifts.begin(), mid}, {mid, shifts.end()}};
}

double single_height(const RunConfig& c) {
  if (c.T.size() != 1) throw UsageError("--T takes exactly one value for this command");
  return c.T.front();
}

MainTermOptions main_options(int workers, double radius, int points) {
  MainTermOptions m;
  m.workers = workers;
  m.confluence.radius = radius;
  m.confluence.points = points;
  return m;
}

struct Extras {
  QuadSpec quad;
  double radius = 0.01;
  int points = 16;
  std::uint32_t prime_cutoff = kDefaultPrimeCutoff;
  std::string mode;
};

CommandOutput run_verify(const RunConfig& c) {
  VerifyOptions options;
  options.workers = c.workers;
  const auto reports = run_suite(c.seed, c.trials, options);
  CommandOutput out;
  for (const auto& r : reports) out.flagged = out.flagged || !r.pass;
  if (c.format == OutputFormat::json) {
    out.text = to_json(reports).dump(2) + "\n";
  } else {
    out.text = "check_name,trials,seed,max_rel_error,threshold,pass\n";
    for (const auto& r : reports) {
      out.text += r.check_name + "," + std::to_string(r.trials) + "," + std::to_string(r.seed) + "," +
                  csv_number(r.max_rel_error) + "," + csv_number(r.threshold) + "," + (r.pass ? "true" : "false") +
                  "\n";
    }
  }
  return out;
}

CommandOutput emit_main_report(MomentReport report, const RunConfig& c) {
  report.seed = c.seed;
  CommandOutput out;
  out.flagged = report_flagged(report);
  if (c.format == OutputFormat::json) {
    out.text = report.to_json().dump(2) + "\n";
  } else {
    out.text = "label,re,im\n";
    for (const auto& t : report.terms) {
      out.text += "\"" + t.label + "\"," + csv_number(t.value.real()) + "," + csv_number(t.value.imag()) + "\n";
    }
    out.text += "total," + csv_number(report.main_term_total.real()) + "," +
                csv_number(report.main_term_total.imag()) + "\n";
  }
  return out;
}

CommandOutput run_main_term(const RunConfig& c, const Extras& x) {
  if (c.ell != 2) throw UsageError("main-term evaluates the fourth moment; use conjecture for other ell");
  const ShiftTuplePair pair = split_pair(c.shifts, 2);
  const WeightSpec w = WeightSpec::standard(single_height(c), c.T0);
  const auto start = std::chrono::steady_clock::now();
  MomentReport r = theorem1_main_term({pair.alphas[0], pair.alphas[1], pair.betas[0], pair.betas[1]}, factorize(c.h),
                                      factorize(c.k), w, x.quad, main_options(c.workers, x.radius, x.points));
  if (c.timings) r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_main_report(std::move(r), c);
}

CommandOutput run_conjecture(const RunConfig& c, const Extras& x) {
  const ShiftTuplePair pair = split_pair(c.shifts, c.ell);
  const WeightSpec w = WeightSpec::standard(single_height(c), c.T0);
  MainTermOptions options = main_options(c.workers, x.radius, x.points);
  options.prime_cutoff = x.prime_cutoff;
  const auto start = std::chrono::steady_clock::now();
  MomentReport r = conjecture_main_term(pair, factorize(c.h), factorize(c.k), w, x.quad, options);
  if (c.timings) r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_main_report(std::move(r), c);
}

CommandOutput run_empirical(const RunConfig& c, const Extras& x) {
  const ShiftTuplePair pair = split_pair(c.shifts, c.ell);
  const WeightSpec w = WeightSpec::standard(single_height(c), c.T0);
  const auto start = std::chrono::steady_clock::now();
  const EmpiricalResult r = empirical_moment(c.ell, pair, factorize(c.h), factorize(c.k), w, x.quad, c.workers);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CommandOutput out;
  out.flagged = !r.warnings.empty();
  if (c.format == OutputFormat::json) {
    // Reuse the report metadata layout.
    MomentReport meta;
    meta.mode = "empirical";
    meta.h = c.h;
    meta.k = c.k;
    meta.ell = c.ell;
    meta.alphas = pair.alphas;
    meta.betas = pair.betas;
    meta.weight = w;
    meta.quad = x.quad;
    meta.seed = c.seed;
    if (c.timings) meta.runtime_s = runtime;
    ordered_json j;
    j["empirical_value"] = {{"re", r.value.real()}, {"im", r.value.imag()}};
    j["converged"] = r.converged;
    j["refinements"] = r.refinements;
    j["last_relative_change"] = r.last_relative_change;
    j["warnings"] = r.warnings;
    j["metadata"] = meta.to_json()["metadata"];
    out.text = j.dump(2) + "\n";
  } else {
    out.text = "T,T0,emp_re,emp_im,converged,refinements,runtime_s\n" + csv_number(w.T) + "," + csv_number(w.T0) +
               "," + csv_number(r.value.real()) + "," + csv_number(r.value.imag()) + "," +
               (r.converged ? "true" : "false") + "," + std::to_string(r.refinements) + "," +
               (c.timings ? csv_number(runtime) : std::string()) + "\n";
  }
  return out;
}

CompareMode compare_mode(const RunConfig& c, const Extras& x) {
  if (x.mode == "theorem1") return CompareMode::theorem1;
  if (x.mode == "conjecture") return CompareMode::conjecture;
  return c.ell == 2 ? CompareMode::theorem1 : CompareMode::conjecture;
}

CompareOptions compare_options(const RunConfig& c, const Extras& x) {
  CompareOptions o;
  o.main = main_options(c.workers, x.radius, x.points);
  o.main.prime_cutoff = x.prime_cutoff;
  o.workers = c.workers;
  o.timings = c.timings;
  o.seed = c.seed;
  return o;
}

CommandOutput run_compare(const RunConfig& c, const Extras& x) {
  const ShiftTuplePair pair = split_pair(c.shifts, c.ell);
  const WeightSpec w = WeightSpec::standard(single_height(c), c.T0);
  const MomentReport r = compare_report(pair, factorize(c.h), factorize(c.k), w, x.quad, compare_mode(c, x),
                                        compare_options(c, x));
  CommandOutput out;
  out.flagged = report_flagged(r);
  out.text = c.format == OutputFormat::json ? r.to_json().dump(2) + "\n"
                                            : std::string(kSweepHeader) + "\n" + sweep_row(r) + "\n";
  return out;
}

CommandOutput run_sweep(const RunConfig& c, const Extras& x) {
  if (c.T.empty()) throw UsageError("--T needs at least one height");
  const ShiftTuplePair pair = split_pair(c.shifts, c.ell);
  const auto reports =
      sweep(c.T, c.T0, pair, factorize(c.h), factorize(c.k), x.quad, compare_mode(c, x), compare_options(c, x));
  CommandOutput out;
  for (const auto& r : reports) out.flagged = out.flagged || report_flagged(r);
  if (c.format == OutputFormat::json) {
    ordered_json j = ordered_json::array();
    for (const auto& r : reports) j.push_back(r.to_json());
    out.text = j.dump(2) + "\n";
  } else {
    out.text = std::string(kSweepHeader) + "\n";
    for (const auto& r : reports) out.text += sweep_row(r) + "\n";
  }
  return out;
}

}  // namespace

std::vector<Complex> parse_shift_list(const std::string& text) {
  std::vector<Complex> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split_commas(text)) {
    if (item.empty()) throw DomainError("empty entry in shift list '" + text + "'");
    if (item.back() != 'i') {
      out.emplace_back(parse_real(item, "shift"), 0.0);
      continue;
    }
    const std::string body = item.substr(0, item.size() - 1);
    // The sign that starts the imaginary part: the last +/- not at the front
    // and not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
      if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    if (split == std::string::npos) {
      const std::string im = (body.empty() || body == "+") ? "1" : (body == "-" ? "-1" : body);
      out.emplace_back(0.0, parse_real(im, "shift"));
      continue;
    }
    const std::string re = body.substr(0, split);
    std::string im = body.substr(split);
    if (im == "+" || im == "-") im += "1";
    out.emplace_back(parse_real(re, "shift"), parse_real(im, "shift"));
  }
  return out;
}

int run_cli(const std::vector<std::string>& argv, const std::map<std::string, std::string>& environment,
            std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted moments of the Riemann zeta function: main terms, empirical integrals and identity checks",
               argv.empty() ? "ztl" : argv.front()};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  RunConfig config;
  Extras extras;
  std::string shifts_text;
  std::string heights_text;
  std::string t0_text = "auto";
  std::string format_text = "json";
  int workers_flag = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", config.seed, "seed recorded in the report (default 42)");
    sub->add_option("--out", config.output_path, "output file, '-' for stdout");
    sub->add_option("--format", format_text, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", workers_flag, "worker threads (overrides ZTL_WORKERS)")->check(CLI::PositiveNumber);
    sub->add_flag("--timings", config.timings, "record wall-clock runtimes (output is then not reproducible)");
  };
  auto add_problem = [&](CLI::App* sub, bool heights_list) {
    sub->add_option("--h", config.h, "twist numerator h")->check(CLI::PositiveNumber);
    sub->add_option("--k", config.k, "twist denominator k")->check(CLI::PositiveNumber);
    sub->add_option("--T", heights_text, heights_list ? "comma-separated heights T" : "height T")->required();
    sub->add_option("--T0", t0_text, "transition width of the weight, or 'auto' for T/8");
    sub->add_option("--shifts", shifts_text, "comma-separated shifts a, a+bi or a-bi (default all zero)");
    sub->add_option("--radius", extras.radius, "confluent circle radius");
    sub->add_option("--points", extras.points, "confluent circle points");
  };
  auto add_quad = [&](CLI::App* sub) {
    sub->add_option("--panel-width", extras.quad.panel_width, "quadrature panel width");
    sub->add_option("--nodes", extras.quad.nodes_per_panel, "Gauss-Legendre nodes per panel");
    sub->add_option("--tolerance", extras.quad.refinement_tolerance, "relative refinement tolerance");
    sub->add_option("--max-refinements", extras.quad.max_refinements, "panel halvings");
  };
  auto add_ell = [&](CLI::App* sub) { sub->add_option("--ell", config.ell, "moment half-order ell"); };

  CLI::App* verify = app.add_subcommand("verify", "run the seeded identity suite");
  add_common(verify);
  verify->add_option("--trials", config.trials, "trials per check (>= 10)");

  CLI::App* main_term = app.add_subcommand("main-term", "twisted fourth-moment main term");
  add_common(main_term);
  add_problem(main_term, false);

  CLI::App* conjecture = app.add_subcommand("conjecture", "2 ell-th moment main term");
  add_common(conjecture);
  add_problem(conjecture, false);
  add_ell(conjecture);
  conjecture->add_option("--prime-cutoff", extras.prime_cutoff, "exact Euler product up to this prime");

  CLI::App* empirical = app.add_subcommand("empirical", "quadrature of the moment integral");
  add_common(empirical);
  add_problem(empirical, false);
  add_quad(empirical);
  add_ell(empirical);

  CLI::App* compare = app.add_subcommand("compare", "main term against the empirical integral");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "compare over several heights");
  for (CLI::App* sub : {compare, sweep_cmd}) {
    add_common(sub);
    add_problem(sub, sub == sweep_cmd);
    add_quad(sub);
    add_ell(sub);
    sub->add_option("--mode", extras.mode, "theorem1 or conjecture (default theorem1 when ell = 2)")
        ->check(CLI::IsMember({"theorem1", "conjecture"}));
    sub->add_option("--prime-cutoff", extras.prime_cutoff, "exact Euler product up to this prime");
  }

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return 2;
  }

  const std::map<CLI::App*, Command> commands = {{verify, Command::verify},         {main_term, Command::main_term},
                                                 {conjecture, Command::conjecture}, {empirical, Command::empirical},
                                                 {compare, Command::compare},       {sweep_cmd, Command::sweep}};
  CLI::App* chosen = app.get_subcommands().front();

  CommandOutput result;
  try {
    config.command = commands.at(chosen);
    config.format = format_text == "csv" ? OutputFormat::csv : OutputFormat::json;
    if (workers_flag > 0) {
      config.workers = workers_flag;
    } else if (const auto it = environment.find("ZTL_WORKERS"); it != environment.end() && !it->second.empty()) {
      const double w = parse_real(it->second, "ZTL_WORKERS");
      if (w < 1 || w != std::floor(w)) throw UsageError("ZTL_WORKERS must be a positive integer");
      config.workers = static_cast<int>(w);
    }
    if (config.command != Command::verify) {
      for (const auto& item : split_commas(heights_text)) config.T.push_back(parse_real(item, "height"));
      if (t0_text != "auto") config.T0 = parse_real(t0_text, "T0");
      config.shifts = parse_shift_list(shifts_text);
      if (!coprime(factorize(config.h), factorize(config.k))) {
        throw UsageError("h = " + std::to_string(config.h) + " and k = " + std::to_string(config.k) +
                         " must be coprime");
      }
    }

    switch (config.command) {
      case Command::verify: result = run_verify(config); break;
      case Command::main_term: result = run_main_term(config, extras); break;
      case Command::conjecture: result = run_conjecture(config, extras); break;
      case Command::empirical: result = run_empirical(config, extras); break;
      case Command::compare: result = run_compare(config, extras); break;
      case Command::sweep: result = run_sweep(config, extras); break;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n\n" << chosen->help();
    return 2;
  }

  if (config.output_path == "-") {
    out << result.text;
  } else {
    std::ofstream file(config.output_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << config.output_path << "\n";
      return 2;
    }
    file << result.text;
  }
  return result.flagged ? 1 : 0;
}

}  // namespace ztl
