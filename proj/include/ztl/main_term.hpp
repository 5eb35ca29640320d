#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ztl/arithmetic.hpp"
#include "ztl/euler_products.hpp"
#include "ztl/shifts.hpp"

namespace ztl {

/// The smooth plateau weight: 0 outside [lower, upper], 1 on
/// [lower + T0, upper - T0], C^infinity transitions of width T0.
struct WeightSpec {
  double T = 0.0;
  double T0 = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  /// Support [T/2, 2T] and T0 = T/8 unless given.
  static WeightSpec standard(double T, std::optional<double> T0 = std::nullopt);

  /// Throws DomainError: T >= 200, sqrt(T) <= T0 <= T/4, support inside
  /// [T/2, 4T] and a nonempty plateau.
  void validate() const;

  [[nodiscard]] double plateau_lower() const { return lower + T0; }
  [[nodiscard]] double plateau_upper() const { return upper - T0; }

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

/// w^{(order)}(t). Orders 1..4 use central differences with step T0/1000.
double weight_eval(double t, const WeightSpec& spec, int derivative_order = 0);

/// Composite Gauss-Legendre configuration for the empirical integral.
struct QuadSpec {
  double panel_width = 0.5;
  int nodes_per_panel = 8;
  double refinement_tolerance = 1e-6;
  int max_refinements = 1;

  void validate() const;

  friend bool operator==(const QuadSpec&, const QuadSpec&) = default;
};

/// Integrates w(t) g(t) over the support with a fixed composite Gauss-Legendre
/// rule (panels of width about T0/32 aligned with the plateau edges, 16 nodes).
/// The nodes are built once; each moment() call is a single weighted sum.
class WeightIntegrator {
 public:
  explicit WeightIntegrator(const WeightSpec& spec);

  /// M(e) = integral of w(t) (t / 2 pi)^{-e} dt.
  [[nodiscard]] Complex moment(Complex e) const;

  /// integral of w(t) log(t / 2 pi)^j dt.
  [[nodiscard]] double log_moment(int j) const;

  /// integral of w(t) f(t) dt for an arbitrary real f.
  template <typename F>
  [[nodiscard]] double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < t_.size(); ++i) sum += weight_[i] * f(t_[i]);
    return sum;
  }

 private:
  std::vector<double> t_;
  std::vector<double> weight_;       // quadrature weight times w(t)
  std::vector<double> log_height_;   // log(t / 2 pi)
};

struct TermValue {
  std::string label;
  Complex value;
};

/// Both sides of a moment comparison plus everything needed to rerun it.
struct MomentReport {
  std::string mode;  // "theorem1" or "conjecture"
  std::vector<TermValue> terms;
  Complex main_term_total{};
  std::optional<Complex> empirical_value;
  std::optional<double> abs_discrepancy;
  std::optional<double> rel_discrepancy;
  bool confluent = false;
  double tail_bound = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;

  std::uint64_t h = 1;
  std::uint64_t k = 1;
  int ell = 2;
  std::vector<Complex> alphas;
  std::vector<Complex> betas;
  WeightSpec weight;
  QuadSpec quad;
  std::uint64_t seed = 0;
  std::optional<double> runtime_s;

  /// Fills the discrepancy fields from main_term_total and empirical_value.
  void update_discrepancy();

  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct MainTermOptions {
  /// Empty direction means ConfluenceSpec::standard(2 ell).
  ConfluenceSpec confluence{{}, 0.01, 16};
  /// Take the confluent path even for generic shifts.
  bool force_confluent = false;
  int workers = 1;
  std::uint32_t prime_cutoff = kDefaultPrimeCutoff;
};

/// Pair sums alpha_i + beta_j below this trigger confluent evaluation.
inline constexpr double kDegenerateShiftThreshold = 1e-5;

/// (hk)^{-1/2} integral of w(t) times the six-term bracket of the twisted
/// fourth moment.
MomentReport theorem1_main_term(const ShiftQuad& shifts, const FactoredNat& h, const FactoredNat& k,
                                const WeightSpec& w, const QuadSpec& q, const MainTermOptions& options = {});

/// (hk)^{-1/2} integral of w(t) times the binomial(2 ell, ell)-term swap sum
/// of the 2 ell-th moment recipe. Requires ell <= 4.
MomentReport conjecture_main_term(const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k,
                                  const WeightSpec& w, const QuadSpec& q, const MainTermOptions& options = {});

}  // namespace ztl
