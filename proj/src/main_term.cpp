#include "ztl/main_term.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ztl/errors.hpp"
#include "ztl/parallel.hpp"
#include "ztl/quadrature.hpp"
#include "ztl/summation.hpp"
#include "ztl/version.hpp"

namespace ztl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// f(x) / (f(x) + f(1-x)) with f(x) = exp(-1/x): 0 at x <= 0, 1 at x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double weight_value(double t, const WeightSpec& w) {
  if (t <= w.lower || t >= w.upper) return 0.0;
  if (t < w.plateau_lower()) return smooth_step((t - w.lower) / w.T0);
  if (t > w.plateau_upper()) return smooth_step((w.upper - t) / w.T0);
  return 1.0;
}

nlohmann::ordered_json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

double min_pair_sum(const std::vector<Complex>& alphas, const std::vector<Complex>& betas) {
  double out = 1e300;
  for (const auto a : alphas) {
    for (const auto b : betas) out = std::min(out, std::abs(a + b));
  }
  return out;
}

double inverse_sqrt_hk(const FactoredNat& h, const FactoredNat& k) {
  return 1.0 / std::sqrt(static_cast<double>(h.value()) * static_cast<double>(k.value()));
}

// One term of a permutation sum: shifts to use in Z and the exponent of (t/2 pi)^{-e}.
template <typename Shifts>
struct Term {
  std::string label;
  Shifts shifts;
  Complex exponent;
};

std::vector<Term<ShiftQuad>> theorem1_terms(const ShiftQuad& q) {
  const Complex a = q.alpha;
  const Complex b = q.beta;
  const Complex c = q.gamma;
  const Complex d = q.delta;
  return {
      {"Z(alpha,beta,gamma,delta)", {a, b, c, d}, 0.0},
      {"Z(-gamma,-delta,-alpha,-beta)", {-c, -d, -a, -b}, a + b + c + d},
      {"Z(-gamma,beta,-alpha,delta)", {-c, b, -a, d}, a + c},
      {"Z(-delta,beta,gamma,-alpha)", {-d, b, c, -a}, a + d},
      {"Z(alpha,-gamma,-beta,delta)", {a, -c, -b, d}, b + c},
      {"Z(alpha,-delta,gamma,-beta)", {a, -d, c, -b}, b + d},
  };
}

std::string subset_label(const std::vector<std::size_t>& s, const std::vector<std::size_t>& t) {
  std::string out = "S={";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::string("alpha") + std::to_string(s[i] + 1);
  out += "};T={";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + std::string("beta") + std::to_string(t[i] + 1);
  return out + "}";
}

void subsets(std::size_t n, std::size_t size, std::size_t start, std::vector<std::size_t>& current,
             std::vector<std::vector<std::size_t>>& out) {
  if (current.size() == size) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    current.push_back(i);
    subsets(n, size, i + 1, current, out);
    current.pop_back();
  }
}

std::vector<Term<ShiftTuplePair>> conjecture_terms(const ShiftTuplePair& pair) {
  const std::size_t ell = pair.ell();
  std::vector<Term<ShiftTuplePair>> out;
  for (std::size_t j = 0; j <= ell; ++j) {
    std::vector<std::vector<std::size_t>> chosen;
    std::vector<std::size_t> scratch;
    subsets(ell, j, 0, scratch, chosen);
    for (const auto& s : chosen) {
      for (const auto& t : chosen) {
        ShiftTuplePair swapped = pair;
        Complex exponent = 0.0;
        for (std::size_t r = 0; r < j; ++r) {
          swapped.alphas[s[r]] = -pair.betas[t[r]];
          swapped.betas[t[r]] = -pair.alphas[s[r]];
          exponent += pair.alphas[s[r]] + pair.betas[t[r]];
        }
        out.push_back({subset_label(s, t), std::move(swapped), exponent});
      }
    }
  }
  return out;
}

ConfluenceSpec confluence_for(const MainTermOptions& options, std::size_t n) {
  if (options.confluence.direction.empty()) {
    return ConfluenceSpec::standard(n, options.confluence.radius, options.confluence.points);
  }
  if (options.confluence.direction.size() != n) {
    throw DomainError("confluence direction must have one entry per shift (" + std::to_string(n) + ")");
  }
  return options.confluence;
}

// Averages bracket(u) over the confluence circle; sample points run on the
// worker pool and are reduced in index order.
template <typename Bracket>
Complex confluent_average(const Bracket& bracket, const ConfluenceSpec& spec, int workers) {
  spec.validate();
  const auto count = static_cast<std::size_t>(spec.points);
  const auto values = parallel_map<Complex>(count, workers, [&](std::size_t j) {
    const Complex u = std::polar(spec.radius, 2.0 * std::numbers::pi * static_cast<double>(j) / spec.points);
    try {
      return bracket(u);
    } catch (const std::exception& e) {
      throw DomainError("confluent_eval: evaluation failed at u = " + format_complex(u) + ": " + e.what());
    }
  });
  CompensatedComplexSum sum;
  for (const auto v : values) sum += v;
  return sum.value() / static_cast<double>(count);
}

}  // namespace

WeightSpec WeightSpec::standard(double T, std::optional<double> T0) {
  WeightSpec w;
  w.T = T;
  w.T0 = T0.value_or(T / 8.0);
  w.lower = T / 2.0;
  w.upper = 2.0 * T;
  w.validate();
  return w;
}

void WeightSpec::validate() const {
  if (!(T >= 200.0)) throw DomainError("WeightSpec: T must be >= 200");
  if (!(T0 >= std::sqrt(T) && T0 <= T / 4.0)) throw DomainError("WeightSpec: T0 must lie in [sqrt(T), T/4]");
  if (!(lower >= T / 2.0 && upper <= 4.0 * T && lower < upper)) {
    throw DomainError("WeightSpec: support must lie inside [T/2, 4T]");
  }
  if (!(plateau_lower() < plateau_upper())) throw DomainError("WeightSpec: empty plateau");
}

double weight_eval(double t, const WeightSpec& spec, int derivative_order) {
  if (derivative_order < 0 || derivative_order > 4) throw DomainError("weight_eval: derivative order must be 0..4");
  if (derivative_order == 0) return weight_value(t, spec);
  static constexpr double kBinomial[5][5] = {
      {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  const double step = spec.T0 / 1000.0;
  const int n = derivative_order;
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    sum += sign * kBinomial[n][j] * weight_value(t + (0.5 * n - j) * step, spec);
  }
  return sum / std::pow(step, n);
}

void QuadSpec::validate() const {
  if (!(panel_width > 0.1 && panel_width <= 4.0)) throw DomainError("QuadSpec: panel_width must lie in (0.1, 4]");
  if (nodes_per_panel < 4 || nodes_per_panel > 32) throw DomainError("QuadSpec: nodes_per_panel must lie in [4, 32]");
  if (!(refinement_tolerance >= 1e-6)) throw DomainError("QuadSpec: refinement_tolerance must be >= 1e-6");
  if (max_refinements < 0 || max_refinements > 4) throw DomainError("QuadSpec: max_refinements must lie in [0, 4]");
  if (nodes_per_panel / panel_width < 4.0) throw DomainError("QuadSpec: fewer than 4 nodes per unit t");
}

WeightIntegrator::WeightIntegrator(const WeightSpec& spec) {
  spec.validate();
  const GaussLegendreRule rule = gauss_legendre(16);
  const double width = spec.T0 / 32.0;
  auto add_segment = [&](double a, double b) {
    const auto panels = static_cast<int>(std::ceil((b - a) / width - 1e-9));
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
      const double mid = a + (i + 0.5) * h;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double t = mid + 0.5 * h * rule.nodes[j];
        t_.push_back(t);
        weight_.push_back(0.5 * h * rule.weights[j] * weight_value(t, spec));
        log_height_.push_back(std::log(t / kTwoPi));
      }
    }
  };
  add_segment(spec.lower, spec.plateau_lower());
  add_segment(spec.plateau_lower(), spec.plateau_upper());
  add_segment(spec.plateau_upper(), spec.upper);
}

Complex WeightIntegrator::moment(Complex e) const {
  CompensatedComplexSum sum;
  for (std::size_t i = 0; i < t_.size(); ++i) sum += weight_[i] * std::exp(-e * log_height_[i]);
  return sum.value();
}

double WeightIntegrator::log_moment(int j) const {
  CompensatedSum sum;
  for (std::size_t i = 0; i < t_.size(); ++i) sum += weight_[i] * std::pow(log_height_[i], j);
  return sum.value();
}

void MomentReport::update_discrepancy() {
  if (!empirical_value) {
    abs_discrepancy.reset();
    rel_discrepancy.reset();
    return;
  }
  abs_discrepancy = std::abs(*empirical_value - main_term_total);
  rel_discrepancy = *abs_discrepancy / std::abs(main_term_total);
}

nlohmann::ordered_json MomentReport::to_json() const {
  using nlohmann::ordered_json;
  ordered_json out;
  ordered_json term_list = ordered_json::array();
  for (const auto& t : terms) term_list.push_back({{"label", t.label}, {"re", t.value.real()}, {"im", t.value.imag()}});
  out["terms"] = term_list;
  out["main_term_total"] = complex_json(main_term_total);
  out["empirical_value"] = empirical_value ? complex_json(*empirical_value) : ordered_json(nullptr);
  out["abs_discrepancy"] = abs_discrepancy ? ordered_json(*abs_discrepancy) : ordered_json(nullptr);
  out["rel_discrepancy"] = rel_discrepancy ? ordered_json(*rel_discrepancy) : ordered_json(nullptr);
  out["confluent"] = confluent;
  out["tail_bound"] = tail_bound;
  out["warnings"] = warnings;
  out["errors"] = errors;

  ordered_json alpha_list = ordered_json::array();
  for (const auto a : alphas) alpha_list.push_back(complex_json(a));
  ordered_json beta_list = ordered_json::array();
  for (const auto b : betas) beta_list.push_back(complex_json(b));
  ordered_json meta;
  meta["version"] = kVersionString;
  meta["mode"] = mode;
  meta["h"] = h;
  meta["k"] = k;
  meta["ell"] = ell;
  meta["shifts"] = {{"alphas", alpha_list}, {"betas", beta_list}};
  meta["weight"] = {{"T", weight.T}, {"T0", weight.T0}, {"support", {weight.lower, weight.upper}},
                    {"plateau", {weight.plateau_lower(), weight.plateau_upper()}}};
  meta["quad"] = {{"panel_width", quad.panel_width},
                  {"nodes_per_panel", quad.nodes_per_panel},
                  {"refinement_tolerance", quad.refinement_tolerance},
                  {"max_refinements", quad.max_refinements}};
  meta["seed"] = seed;
  if (runtime_s) meta["runtime_s"] = *runtime_s;
  out["metadata"] = meta;
  return out;
}

MomentReport theorem1_main_term(const ShiftQuad& shifts, const FactoredNat& h, const FactoredNat& k,
                                const WeightSpec& w, const QuadSpec& q, const MainTermOptions& options) {
  shifts.validate();
  q.validate();
  if (!coprime(h, k)) throw NonCoprimeError("theorem1_main_term: h and k must be coprime");
  const WeightIntegrator integrator(w);
  const double scale = inverse_sqrt_hk(h, k);

  MomentReport report;
  report.mode = "theorem1";
  report.h = h.value();
  report.k = k.value();
  report.ell = 2;
  report.alphas = {shifts.alpha, shifts.beta};
  report.betas = {shifts.gamma, shifts.delta};
  report.weight = w;
  report.quad = q;

  const bool degenerate = min_pair_sum(report.alphas, report.betas) < kDegenerateShiftThreshold;
  if (!degenerate && !options.force_confluent) {
    CompensatedComplexSum total;
    for (const auto& term : theorem1_terms(shifts)) {
      const Complex v = scale * Z_value(term.shifts, h, k, 0.0) * integrator.moment(term.exponent);
      report.terms.push_back({term.label, v});
      total += v;
    }
    report.main_term_total = total.value();
    return report;
  }

  const ConfluenceSpec spec = confluence_for(options, 4);
  const auto bracket = [&](Complex u) {
    const ShiftQuad moved{shifts.alpha + u * spec.direction[0], shifts.beta + u * spec.direction[1],
                          shifts.gamma + u * spec.direction[2], shifts.delta + u * spec.direction[3]};
    CompensatedComplexSum sum;
    for (const auto& term : theorem1_terms(moved)) {
      sum += Z_value(term.shifts, h, k, 0.0) * integrator.moment(term.exponent);
    }
    return sum.value();
  };
  report.confluent = true;
  report.main_term_total = scale * confluent_average(bracket, spec, options.workers);
  return report;
}

MomentReport conjecture_main_term(const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                                  const WeightSpec& w, const QuadSpec& q, const MainTermOptions& options) {
  pair.validate();
  q.validate();
  if (pair.ell() > 4) throw RangeError("conjecture_main_term: ell above 4 gives too many terms");
  if (!coprime(h, k)) throw NonCoprimeError("conjecture_main_term: h and k must be coprime");
  const WeightIntegrator integrator(w);
  const double scale = inverse_sqrt_hk(h, k);
  const std::size_t ell = pair.ell();

  MomentReport report;
  report.mode = "conjecture";
  report.h = h.value();
  report.k = k.value();
  report.ell = static_cast<int>(ell);
  report.alphas = pair.alphas;
  report.betas = pair.betas;
  report.weight = w;
  report.quad = q;

  const bool degenerate = min_pair_sum(pair.alphas, pair.betas) < kDegenerateShiftThreshold;
  if (!degenerate && !options.force_confluent) {
    const auto terms = conjecture_terms(pair);
    const auto values = parallel_map<ZGeneralResult>(terms.size(), options.workers, [&](std::size_t i) {
      return Z_general(terms[i].shifts, h, k, 0.0, options.prime_cutoff);
    });
    CompensatedComplexSum total;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Complex m = integrator.moment(terms[i].exponent);
      const Complex v = scale * values[i].value * m;
      report.terms.push_back({terms[i].label, v});
      report.tail_bound += scale * values[i].tail_bound * std::abs(m);
      total += v;
    }
    report.main_term_total = total.value();
    return report;
  }

  const ConfluenceSpec spec = confluence_for(options, 2 * ell);
  std::vector<double> bounds(static_cast<std::size_t>(spec.points), 0.0);
  const auto bracket = [&](Complex u) {
    ShiftTuplePair moved = pair;
    for (std::size_t i = 0; i < ell; ++i) {
      moved.alphas[i] += u * spec.direction[i];
      moved.betas[i] += u * spec.direction[ell + i];
    }
    CompensatedComplexSum sum;
    for (const auto& term : conjecture_terms(moved)) {
      const ZGeneralResult z = Z_general(term.shifts, h, k, 0.0, options.prime_cutoff);
      sum += z.value * integrator.moment(term.exponent);
    }
    return sum.value();
  };
  report.confluent = true;
  report.main_term_total = scale * confluent_average(bracket, spec, options.workers);
  return report;
}

}  // namespace ztl
