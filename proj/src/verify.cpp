#include "ztl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <random>

#include "ztl/arithmetic.hpp"
#include "ztl/errors.hpp"
#include "ztl/euler_products.hpp"
#include "ztl/parallel.hpp"
#include "ztl/special.hpp"
#include "ztl/summation.hpp"

namespace ztl {
namespace {

using nlohmann::ordered_json;

constexpr double kShiftRadius = 0.19;
constexpr double kGenericSeparation = 1e-4;
constexpr std::uint32_t kSmallPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
constexpr std::uint32_t kFBruteLimit = 1'000'000;
constexpr int kFMaxInputs = 50;
constexpr std::uint32_t kFourZetasLimit = 100'000;

double rel_error(Complex got, Complex want) {
  const double scale = std::abs(want);
  return std::abs(got - want) / (scale > 0.0 ? scale : 1.0);
}

Complex cpow(double base, Complex e) { return std::exp(e * std::log(base)); }

ordered_json cjson(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

ordered_json quad_json(const ShiftQuad& q) {
  return {{"alpha", cjson(q.alpha)}, {"beta", cjson(q.beta)}, {"gamma", cjson(q.gamma)}, {"delta", cjson(q.delta)}};
}

class Sampler {
 public:
  Sampler(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    rng_.seed(seq);
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Complex shift() {
    const double r = kShiftRadius * std::sqrt(uniform(0.0, 1.0));
    return std::polar(r, uniform(0.0, 2.0 * std::numbers::pi));
  }

  ShiftQuad quad() {
    const Complex a = shift();
    const Complex b = shift();
    const Complex c = shift();
    const Complex d = shift();
    return {a, b, c, d};
  }

  Complex s_point() {
    const double re = uniform(-0.3, 0.3);
    const double im = uniform(-2.0, 2.0);
    return {re, im};
  }

  // h and k from primes <= 47 with exponents <= 4, coprime, up to `max_primes` each.
  std::pair<std::uint64_t, std::uint64_t> twist_pair(int max_primes) {
    std::vector<std::uint32_t> pool(std::begin(kSmallPrimes), std::end(kSmallPrimes));
    std::shuffle(pool.begin(), pool.end(), rng_);
    std::size_t next = 0;
    auto build = [&] {
      std::uint64_t n = 1;
      const int count = integer(0, max_primes);
      for (int i = 0; i < count; ++i) {
        const std::uint32_t p = pool[next++];
        const int e = integer(1, 4);
        for (int j = 0; j < e; ++j) n *= p;
      }
      return n;
    };
    const std::uint64_t h = build();
    const std::uint64_t k = build();
    return {h, k};
  }

  std::uint64_t prime_power() {
    const std::uint32_t p = kSmallPrimes[static_cast<std::size_t>(integer(0, 14))];
    const int e = integer(1, 4);
    std::uint64_t n = 1;
    for (int j = 0; j < e; ++j) n *= p;
    return n;
  }

 private:
  std::mt19937_64 rng_;
};

bool separated(Complex x, Complex y) { return std::abs(x - y) > kGenericSeparation; }

struct Sample {
  ordered_json input;
  std::function<double()> error;
};

IdentityReport run_check(const std::string& name, double threshold, std::uint64_t seed, std::vector<Sample> samples,
                         int workers) {
  struct Outcome {
    double error = 0.0;
    std::string failure;
  };
  const auto outcomes = parallel_map<Outcome>(samples.size(), workers, [&](std::size_t i) {
    try {
      const double e = samples[i].error();
      return Outcome{std::isnan(e) ? std::numeric_limits<double>::infinity() : e, {}};
    } catch (const std::exception& ex) {
      return Outcome{std::numeric_limits<double>::infinity(), ex.what()};
    }
  });
  IdentityReport report;
  report.check_name = name;
  report.trials = static_cast<int>(samples.size());
  report.seed = seed;
  report.threshold = threshold;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].error > outcomes[worst].error) worst = i;
  }
  report.max_rel_error = outcomes.empty() ? 0.0 : outcomes[worst].error;
  report.pass = report.max_rel_error <= threshold;
  if (!samples.empty()) {
    report.worst_case_input = samples[worst].input;
    if (!outcomes[worst].failure.empty()) report.worst_case_input["error"] = outcomes[worst].failure;
  }
  return report;
}

IdentityReport check_cfe(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 1);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = rng.quad();
    const Complex s = rng.s_point();
    const std::uint64_t h = rng.prime_power();
    samples.push_back({{{"shifts", quad_json(q)}, {"s", cjson(s)}, {"h", h}}, [q, s, h] {
                         const FactoredNat hn = factorize(h);
                         const FactoredNat one = factorize(1);
                         const double hd = static_cast<double>(h);
                         const Complex lhs = cpow(hd, -s + q.alpha) * C_value(q, hn, one, -s);
                         const ShiftQuad r{-q.delta, -q.gamma, -q.beta, -q.alpha};
                         const Complex rhs = cpow(hd, s - q.delta) * C_value(r, hn, one, s);
                         return rel_error(lhs, rhs);
                       }});
  }
  return run_check("cfe", 1e-10, seed, std::move(samples), workers);
}

IdentityReport check_cfe_corollary(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 2);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = rng.quad();
    const Complex s = rng.s_point();
    const auto [h, k] = rng.twist_pair(2);
    samples.push_back({{{"shifts", quad_json(q)}, {"s", cjson(s)}, {"h", h}, {"k", k}}, [q, s, h = h, k = k] {
                         const double hd = static_cast<double>(h);
                         const double kd = static_cast<double>(k);
                         const FactoredNat hn = factorize(h);
                         const FactoredNat kn = factorize(k);
                         const Complex lhs = cpow(hd, -s + q.alpha) * cpow(kd, -s + q.gamma) * C_value(q, hn, kn, -s);
                         const ShiftQuad r{-q.delta, -q.gamma, -q.beta, -q.alpha};
                         const Complex rhs = cpow(hd, s - q.delta) * cpow(kd, s - q.beta) * C_value(r, hn, kn, s);
                         return rel_error(lhs, rhs);
                       }});
  }
  return run_check("cfe_corollary", 1e-10, seed, std::move(samples), workers);
}

IdentityReport check_cb0(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 3);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = rng.quad();
    const auto [h, k] = rng.twist_pair(2);
    samples.push_back({{{"shifts", quad_json(q)}, {"h", h}, {"k", k}}, [q, h = h, k = k] {
                         const FactoredNat hn = factorize(h);
                         const FactoredNat kn = factorize(k);
                         const Complex lhs = cpow(static_cast<double>(h), q.alpha) *
                                             cpow(static_cast<double>(k), q.gamma) * C_value(q, hn, kn, 0.0);
                         const Complex rhs = B_value({-q.gamma, q.beta, -q.alpha, q.delta}, hn, kn, 0.0);
                         return rel_error(lhs, rhs);
                       }});
  }
  return run_check("cb0", 1e-10, seed, std::move(samples), workers);
}

// The CB lemmas need alpha != beta, gamma != delta and alpha+gamma != beta+delta.
ShiftQuad generic_cb_quad(Sampler& rng) {
  for (;;) {
    const ShiftQuad q = rng.quad();
    if (separated(q.alpha, q.beta) && separated(q.gamma, q.delta) &&
        separated(q.alpha + q.gamma, q.beta + q.delta)) {
      return q;
    }
  }
}

Complex cb_zeta_factor(const ShiftQuad& q) {
  const Complex ab = q.beta - q.alpha;
  const Complex cd = q.delta - q.gamma;
  return 0.5 * zeta_one_plus(ab) * zeta_one_plus(cd) * zeta_one_plus(ab + cd) / zeta(2.0 + ab + cd);
}

IdentityReport check_cb1(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 4);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = generic_cb_quad(rng);
    const auto [h, k] = rng.twist_pair(2);
    samples.push_back({{{"shifts", quad_json(q)}, {"h", h}, {"k", k}}, [q, h = h, k = k] {
                         const double hd = static_cast<double>(h);
                         const double kd = static_cast<double>(k);
                         const FactoredNat hn = factorize(h);
                         const FactoredNat kn = factorize(k);
                         const Complex half = (q.alpha - q.gamma) / 2.0;
                         const Complex lhs = cb_zeta_factor(q) * cpow(hd, half) * cpow(kd, -half) *
                                             C_value(q, hn, kn, (-q.alpha - q.gamma) / 2.0);
                         const Complex pair = (q.alpha + q.gamma) / 2.0;
                         const Complex rhs = A_residue_confluent(q) * B_value(q, hn, kn, -q.alpha - q.gamma) *
                                             cpow(hd, pair) * cpow(kd, pair);
                         return rel_error(lhs, rhs);
                       }});
  }
  return run_check("cb1", 1e-9, seed, std::move(samples), workers);
}

IdentityReport check_cb2(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 5);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = generic_cb_quad(rng);
    const auto [h, k] = rng.twist_pair(2);
    samples.push_back({{{"shifts", quad_json(q)}, {"h", h}, {"k", k}}, [q, h = h, k = k] {
                         const FactoredNat hn = factorize(h);
                         const FactoredNat kn = factorize(k);
                         const Complex lhs = cb_zeta_factor(q) * cpow(static_cast<double>(h), q.alpha) *
                                             cpow(static_cast<double>(k), q.gamma) *
                                             C_value(q, hn, kn, (-q.beta - q.delta) / 2.0);
                         // Residue of Z_{-gamma,-delta,-alpha,-beta}(2s) at s = (beta+delta)/2: the A
                         // factor's pole comes from the (-delta) + (-beta) pair, so reorder to put
                         // that pair first.
                         const Complex residue = A_residue_confluent({-q.delta, -q.gamma, -q.beta, -q.alpha});
                         const Complex rhs =
                             residue * B_value({-q.gamma, -q.delta, -q.alpha, -q.beta}, hn, kn, q.beta + q.delta);
                         return rel_error(lhs, rhs);
                       }});
  }
  return run_check("cb2", 1e-9, seed, std::move(samples), workers);
}

// F(a, b, 1 + c) = zeta(1+c) sum_l (h,l)^a (k,l)^b l^{-a-b-c} prod_{p | l}(1 - p^c),
// after summing c_l(r) r^{-1-c} over r exactly; truncated at l <= 1e6.
Complex F_brute(Complex a, Complex b, Complex c, std::uint64_t h, std::uint64_t k,
                const std::vector<std::uint32_t>& spf) {
  CompensatedComplexSum sum;
  const Complex abc = a + b + c;
  for (std::uint32_t l = 1; l <= kFBruteLimit; ++l) {
    const double ld = static_cast<double>(l);
    Complex term = std::exp(-abc * std::log(ld));
    const std::uint64_t gh = gcd(h, l);
    const std::uint64_t gk = gcd(k, l);
    if (gh > 1) term *= cpow(static_cast<double>(gh), a);
    if (gk > 1) term *= cpow(static_cast<double>(gk), b);
    std::uint32_t rest = l;
    while (rest > 1) {
      const std::uint32_t p = spf[rest];
      term *= 1.0 - cpow(static_cast<double>(p), c);
      while (rest % p == 0) rest /= p;
    }
    sum += term;
  }
  return zeta(1.0 + c) * sum.value();
}

IdentityReport check_f(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 6);
  auto spf = std::make_shared<const std::vector<std::uint32_t>>(smallest_prime_factor_table(kFBruteLimit));
  std::vector<Sample> samples;
  const int count = std::min(trials, kFMaxInputs);
  for (int i = 0; i < count; ++i) {
    const Complex a{rng.uniform(1.1, 1.8), rng.uniform(-1.0, 1.0)};
    const Complex b{rng.uniform(1.1, 1.8), rng.uniform(-1.0, 1.0)};
    const Complex c{rng.uniform(1.0, 2.0), rng.uniform(-1.0, 1.0)};
    const auto [h, k] = rng.twist_pair(1);
    samples.push_back(
        {{{"a", cjson(a)}, {"b", cjson(b)}, {"c", cjson(c)}, {"h", h}, {"k", k}}, [a, b, c, h = h, k = k, spf] {
           return rel_error(F_closed(a, b, c, factorize(h), factorize(k)), F_brute(a, b, c, h, k, *spf));
         }});
  }
  return run_check("f_closed_vs_brute", 1e-6, seed, std::move(samples), workers);
}

IdentityReport check_b(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 7);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = rng.quad();
    const Complex s = rng.s_point();
    const auto [h, k] = rng.twist_pair(2);
    samples.push_back({{{"shifts", quad_json(q)}, {"s", cjson(s)}, {"h", h}, {"k", k}}, [q, s, h = h, k = k] {
                         const FactoredNat hn = factorize(h);
                         const FactoredNat kn = factorize(k);
                         return rel_error(B_value(q, hn, kn, s), B_series(q, hn, kn, s));
                       }});
  }
  return run_check("b_closed_vs_series", 1e-10, seed, std::move(samples), workers);
}

IdentityReport check_fourzetas(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 8);
  auto spf = std::make_shared<const std::vector<std::uint32_t>>(smallest_prime_factor_table(kFourZetasLimit));
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = rng.quad();
    const Complex s{rng.uniform(2.0, 3.0), rng.uniform(-2.0, 2.0)};
    samples.push_back({{{"shifts", quad_json(q)}, {"s", cjson(s)}}, [q, s, spf] {
                         // sum_{n <= 1e5} sigma_{a,b}(n) sigma_{c,d}(n) n^{-1-s}, multiplicative
                         // values built from the prime-power form.
                         CompensatedComplexSum sum;
                         for (std::uint32_t n = 1; n <= kFourZetasLimit; ++n) {
                           Complex term = std::exp(-(1.0 + s) * std::log(static_cast<double>(n)));
                           std::uint32_t rest = n;
                           while (rest > 1) {
                             const std::uint32_t p = (*spf)[rest];
                             int e = 0;
                             while (rest % p == 0) {
                               rest /= p;
                               ++e;
                             }
                             term *= sigma_prime_power(p, e, q.alpha, q.beta) * sigma_prime_power(p, e, q.gamma, q.delta);
                           }
                           sum += term;
                         }
                         return rel_error(sum.value(), A_value(q, s));
                       }});
  }
  return run_check("fourzetas", 1e-4, seed, std::move(samples), workers);
}

IdentityReport check_sigma(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 9);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    Complex a = rng.shift();
    Complex b = rng.shift();
    while (!separated(a, b)) b = rng.shift();
    const std::uint32_t p = kSmallPrimes[static_cast<std::size_t>(rng.integer(0, 14))];
    const int m = rng.integer(0, 8);
    samples.push_back({{{"p", p}, {"m", m}, {"a", cjson(a)}, {"b", cjson(b)}}, [a, b, p, m] {
                         return rel_error(sigma_prime_power_closed(p, m, a, b), sigma_prime_power(p, m, a, b));
                       }});
  }
  return run_check("sigma_prime_power", 1e-13, seed, std::move(samples), workers);
}

// max over samples of t |X_exact / X_asymptotic - 1|.
IdentityReport check_stirling(std::uint64_t seed, int trials, int workers) {
  Sampler rng(seed, 10);
  std::vector<Sample> samples;
  for (int i = 0; i < trials; ++i) {
    const ShiftQuad q = rng.quad();
    const double t = std::exp(rng.uniform(std::log(20.0), std::log(20000.0)));
    samples.push_back({{{"shifts", quad_json(q)}, {"t", t}}, [q, t] {
                         const Complex exact = x_factor(q, t, XFactorMode::exact);
                         const Complex asymptotic = x_factor(q, t, XFactorMode::asymptotic);
                         return t * std::abs(exact / asymptotic - 1.0);
                       }});
  }
  return run_check("x_stirling", 5.0, seed, std::move(samples), workers);
}

}  // namespace

ordered_json IdentityReport::to_json() const {
  return {{"check_name", check_name}, {"trials", trials},       {"seed", seed},
          {"max_rel_error", max_rel_error}, {"threshold", threshold}, {"pass", pass},
          {"worst_case_input", worst_case_input}};
}

std::vector<IdentityReport> run_suite(std::uint64_t seed, int trials, const VerifyOptions& options) {
  if (trials < 10) throw DomainError("run_suite: trials must be at least 10");
  const int w = options.workers;
  return {check_cfe(seed, trials, w),          check_cfe_corollary(seed, trials, w), check_cb0(seed, trials, w),
          check_cb1(seed, trials, w),          check_cb2(seed, trials, w),           check_f(seed, trials, w),
          check_b(seed, trials, w),            check_fourzetas(seed, trials, w),     check_sigma(seed, trials, w),
          check_stirling(seed, trials, w)};
}

ordered_json to_json(const std::vector<IdentityReport>& reports) {
  ordered_json out = ordered_json::array();
  for (const auto& r : reports) out.push_back(r.to_json());
  return out;
}

}  // namespace ztl
