#include "ztl/empirical.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "ztl/errors.hpp"
#include "ztl/parallel.hpp"
#include "ztl/quadrature.hpp"
#include "ztl/special.hpp"
#include "ztl/summation.hpp"

namespace ztl {
namespace {

// Positions of the alphas and of conj(beta_j) in a deduplicated shift list.
struct ShiftLayout {
  std::vector<Complex> distinct;
  std::vector<std::size_t> alpha_index;
  std::vector<std::size_t> beta_index;
};

ShiftLayout layout_shifts(const ShiftTuplePair& pair) {
  ShiftLayout out;
  auto index_of = [&](Complex z) {
    const auto it = std::find(out.distinct.begin(), out.distinct.end(), z);
    if (it != out.distinct.end()) return static_cast<std::size_t>(it - out.distinct.begin());
    out.distinct.push_back(z);
    return out.distinct.size() - 1;
  };
  for (const auto a : pair.alphas) out.alpha_index.push_back(index_of(a));
  for (const auto b : pair.betas) out.beta_index.push_back(index_of(std::conj(b)));
  return out;
}

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", x);
  return buffer;
}

}  // namespace

EmpiricalResult empirical_moment(int ell, const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                                 const WeightSpec& w, const QuadSpec& q, int workers) {
  if (ell < 1 || ell > 3) throw RangeError("empirical_moment: ell must be 1, 2 or 3");
  pair.validate();
  if (pair.ell() != static_cast<std::size_t>(ell)) {
    throw DomainError("empirical_moment: expected " + std::to_string(ell) + " alphas and betas");
  }
  if (!coprime(h, k)) throw NonCoprimeError("empirical_moment: h and k must be coprime");
  if (h.value() * k.value() > kMaxTwistProduct) throw RangeError("empirical_moment: hk exceeds 1000");
  w.validate();
  q.validate();
  if (w.T > kMaxEmpiricalHeight) throw RangeError("empirical_moment: T exceeds 8000");

  const ShiftLayout layout = layout_shifts(pair);
  const CriticalLineZeta kernel(layout.distinct, w.upper);
  const double log_ratio = std::log(static_cast<double>(h.value())) - std::log(static_cast<double>(k.value()));
  const GaussLegendreRule rule = gauss_legendre(q.nodes_per_panel);

  auto integrand = [&](double t) {
    const std::vector<Complex> z = kernel.evaluate(t);
    Complex product = std::polar(weight_eval(t, w), -t * log_ratio);
    for (const auto i : layout.alpha_index) product *= z[i];
    for (const auto j : layout.beta_index) product *= std::conj(z[j]);
    return product;
  };

  const auto base_panels = static_cast<std::size_t>(std::ceil((w.upper - w.lower) / q.panel_width - 1e-9));
  auto level_total = [&](int level) {
    const std::size_t panels = base_panels << level;
    const double width = (w.upper - w.lower) / static_cast<double>(panels);
    const auto sums = parallel_map<Complex>(panels, workers, [&](std::size_t i) {
      const double mid = w.lower + (static_cast<double>(i) + 0.5) * width;
      CompensatedComplexSum s;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        s += rule.weights[j] * integrand(mid + 0.5 * width * rule.nodes[j]);
      }
      return 0.5 * width * s.value();
    });
    CompensatedComplexSum total;
    for (const auto s : sums) total += s;
    return total.value();
  };

  EmpiricalResult result;
  result.value = level_total(0);
  for (int level = 1; level <= q.max_refinements; ++level) {
    const Complex refined = level_total(level);
    result.refinements = level;
    result.last_relative_change = std::abs(refined - result.value) / std::max(std::abs(refined), 1e-300);
    result.value = refined;
    result.converged = result.last_relative_change < q.refinement_tolerance;
    if (result.converged) break;
  }
  if (!result.converged) {
    result.warnings.push_back("empirical quadrature did not converge: relative change " +
                              format_double(result.last_relative_change) + " after " +
                              std::to_string(result.refinements) + " refinement(s), tolerance " +
                              format_double(q.refinement_tolerance));
  }
  return result;
}

const char* to_string(CompareMode mode) { return mode == CompareMode::theorem1 ? "theorem1" : "conjecture"; }

MomentReport compare_report(const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                            const WeightSpec& w, const QuadSpec& q, CompareMode mode,
                            const CompareOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  MomentReport report;
  try {
    MainTermOptions main = options.main;
    main.workers = options.workers;
    if (mode == CompareMode::theorem1) {
      if (pair.ell() != 2) throw DomainError("theorem1 mode needs exactly two alphas and two betas");
      const ShiftQuad quad{pair.alphas[0], pair.alphas[1], pair.betas[0], pair.betas[1]};
      report = theorem1_main_term(quad, h, k, w, q, main);
    } else {
      report = conjecture_main_term(pair, h, k, w, q, main);
    }
  } catch (const std::exception& e) {
    report = MomentReport{};
    report.errors.push_back(std::string("main term: ") + e.what());
  }
  report.mode = to_string(mode);
  report.h = h.value();
  report.k = k.value();
  report.ell = static_cast<int>(pair.ell());
  report.alphas = pair.alphas;
  report.betas = pair.betas;
  report.weight = w;
  report.quad = q;
  report.seed = options.seed;
  const bool main_ok = report.errors.empty();

  try {
    const EmpiricalResult emp = empirical_moment(static_cast<int>(pair.ell()), pair, h, k, w, q, options.workers);
    report.empirical_value = emp.value;
    report.warnings.insert(report.warnings.end(), emp.warnings.begin(), emp.warnings.end());
  } catch (const std::exception& e) {
    report.errors.push_back(std::string("empirical: ") + e.what());
  }
  if (main_ok) report.update_discrepancy();

  if (options.timings) {
    report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

std::vector<MomentReport> sweep(const std::vector<double>& heights, std::optional<double> T0,
                                const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                                const QuadSpec& q, CompareMode mode, const CompareOptions& options) {
  std::vector<WeightSpec> weights;
  weights.reserve(heights.size());
  for (const double T : heights) weights.push_back(WeightSpec::standard(T, T0));
  std::vector<MomentReport> out;
  out.reserve(heights.size());
  for (const auto& w : weights) out.push_back(compare_report(pair, h, k, w, q, mode, options));
  return out;
}

}  // namespace ztl
