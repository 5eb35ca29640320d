#include "ztl/euler_products.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "ztl/errors.hpp"
#include "ztl/special.hpp"
#include "ztl/summation.hpp"

namespace ztl {
namespace {

std::atomic<double> g_c1_fault{0.0};

// p^{-z}
Complex ppow(double log_p, Complex z) { return std::exp(-z * log_p); }

void require_coprime(const FactoredNat& h, const FactoredNat& k, const char* who) {
  if (!coprime(h, k)) {
    throw NonCoprimeError(std::string(who) + ": h = " + h.to_string() + " and k = " + k.to_string() +
                          " are not coprime");
  }
}

Complex ipow(Complex x, int m) {
  Complex r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

// (x^m - y^m) / (x - y). The quotient loses |x - y|^{-1} in relative
// precision, so small exponents and nearby x, y use the polynomial form.
Complex divided_power(Complex x, Complex y, int m) {
  if (m <= 0) return 0.0;
  if (m > 64 && std::abs(x - y) >= kLocalConfluenceThreshold) return (ipow(x, m) - ipow(y, m)) / (x - y);
  Complex sum = 1.0;
  Complex y_power = 1.0;
  for (int j = 1; j < m; ++j) {
    y_power *= y;
    sum = x * sum + y_power;
  }
  return sum;
}

// (1 - x^m) / (1 - x), with the polynomial form near x = 1.
Complex geometric(Complex x, int m) { return divided_power(1.0, x, m); }

// Closed-form local factor of B_{a,b,c,d,h}(s) at p^e || h.
Complex B_local(Complex a, Complex b, Complex c, Complex d, std::uint64_t p, int e, Complex s) {
  const double lp = std::log(static_cast<double>(p));
  const double inv_p = 1.0 / static_cast<double>(p);
  const Complex x = ppow(lp, c);
  const Complex y = ppow(lp, d);
  const Complex ps = ppow(lp, s);
  const Complex b0 = divided_power(x, y, e + 1);
  const Complex b1 = (ppow(lp, a) + ppow(lp, b)) * x * y * divided_power(x, y, e) * ps;
  const Complex b2 = ppow(lp, a + b) * x * x * y * y * divided_power(x, y, e - 1) * ps * ps;
  const Complex den = 1.0 - ppow(lp, 2.0 + a + b + c + d + 2.0 * s);
  return (b0 - inv_p * b1 + inv_p * inv_p * b2) / den;
}

// Local factor of B_{a,b,c,d,h}(s) summed from its defining series.
Complex B_local_series(Complex a, Complex b, Complex c, Complex d, std::uint64_t p, int e, Complex s) {
  const double lp = std::log(static_cast<double>(p));
  const double max_shift = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  const double ratio = std::exp(-(1.0 + s.real() - 2.0 * max_shift) * lp);
  if (!(ratio < 1.0)) throw DomainError("B_series: the local series diverges at Re s = " + std::to_string(s.real()));
  const Complex step = ppow(lp, s + 1.0);
  CompensatedComplexSum num;
  CompensatedComplexSum den;
  Complex power = 1.0;
  for (int j = 0; j <= 400; ++j) {
    num += sigma_prime_power(p, j, a, b) * sigma_prime_power(p, j + e, c, d) * power;
    den += sigma_prime_power(p, j, a, b) * sigma_prime_power(p, j, c, d) * power;
    // Remaining terms are bounded by (j+e+2)^2 ratio^{j+1} / (1 - ratio)^3 times p^{e max_shift}.
    const double jj = static_cast<double>(j + e + 2);
    const double tail = jj * jj * std::pow(ratio, j + 1) / std::pow(1.0 - ratio, 3) * std::exp(e * max_shift * lp);
    if (tail < 1e-16 * std::abs(den.value())) break;
    power *= step;
  }
  return num.value() / den.value();
}

// Local factor of C_{a,b,c,d,h}(s) at p^e || h.
Complex C_local(Complex a, Complex b, Complex c, Complex d, std::uint64_t p, int e, Complex s) {
  const double lp = std::log(static_cast<double>(p));
  const double inv_p = 1.0 / static_cast<double>(p);
  const Complex x = ppow(lp, a + d + 2.0 * s);
  const Complex lead = 1.0 / (1.0 - ppow(lp, 2.0 - a + b - c + d));
  const Complex c1_coefficient = ppow(lp, d - c) + g_c1_fault.load(std::memory_order_relaxed);
  const Complex g0 = geometric(x, e + 1);
  const Complex g1 = (c1_coefficient + ppow(lp, b - a) * x) * geometric(x, e);
  const Complex g2 = ppow(lp, b - a + d - c) * x * geometric(x, e - 1);
  return lead * (g0 - inv_p * g1 + inv_p * inv_p * g2);
}

Complex F_local(Complex a, Complex b, Complex c, std::uint64_t p, int e) {
  const double lp = std::log(static_cast<double>(p));
  const Complex pb = ppow(lp, b);
  const Complex num = (1.0 - pb) * (1.0 - ppow(lp, a + b + c)) +
                      pb * (1.0 - ppow(lp, a)) * (1.0 - ppow(lp, c)) * ppow(lp, static_cast<double>(e) * (b + c));
  return num / ((1.0 - ppow(lp, b + c)) * (1.0 - ppow(lp, a + b)));
}

// ---------------------------------------------------------------------------
// General-ell machinery.

constexpr std::size_t kMaxEll = 4;
using Key = std::array<std::uint8_t, 2 * kMaxEll>;  // exponents of u_1..u_l, v_1..v_l
using Poly = std::map<Key, double>;

struct Monomial {
  Key exponents;
  double coefficient;
};

// Coefficients of log( sum_j h_j(u) h_j(v) X^j * prod_{i,j} (1 - u_i v_j X) ) by
// X-degree, as polynomials in u and v. Degrees 0 and 1 vanish.
struct LogExpansion {
  std::size_t ell = 0;
  int max_degree = 0;
  std::vector<std::vector<Monomial>> by_degree;
};

void add_exponent_vectors(std::size_t vars, int total, std::size_t offset, Key& key, std::vector<Key>& out,
                          std::size_t index = 0) {
  if (index + 1 == vars) {
    key[offset + index] = static_cast<std::uint8_t>(total);
    out.push_back(key);
    return;
  }
  for (int e = total; e >= 0; --e) {
    key[offset + index] = static_cast<std::uint8_t>(e);
    add_exponent_vectors(vars, total - e, offset, key, out, index + 1);
  }
  key[offset + index] = 0;
}

std::vector<Poly> multiply_series(const std::vector<Poly>& f, const std::vector<Poly>& g, int max_degree) {
  std::vector<Poly> out(static_cast<std::size_t>(max_degree) + 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < g.size() && i + j <= static_cast<std::size_t>(max_degree); ++j) {
      for (const auto& [ka, ca] : f[i]) {
        for (const auto& [kb, cb] : g[j]) {
          Key key{};
          for (std::size_t t = 0; t < key.size(); ++t) key[t] = static_cast<std::uint8_t>(ka[t] + kb[t]);
          out[i + j][key] += ca * cb;
        }
      }
    }
  }
  return out;
}

LogExpansion build_expansion(std::size_t ell, int max_degree) {
  const auto deg = static_cast<std::size_t>(max_degree);
  // f = L - 1 with L = sum_j h_j(u) h_j(v) X^j.
  std::vector<Poly> f(deg + 1);
  for (int j = 1; j <= max_degree; ++j) {
    std::vector<Key> us;
    std::vector<Key> vs;
    Key scratch{};
    add_exponent_vectors(ell, j, 0, scratch, us);
    scratch = Key{};
    add_exponent_vectors(ell, j, ell, scratch, vs);
    for (const auto& ku : us) {
      for (const auto& kv : vs) {
        Key key{};
        for (std::size_t t = 0; t < key.size(); ++t) key[t] = static_cast<std::uint8_t>(ku[t] + kv[t]);
        f[static_cast<std::size_t>(j)][key] += 1.0;
      }
    }
  }

  // log(1 + f) = sum_n (-1)^{n+1} f^n / n.
  std::vector<Poly> log_series(deg + 1);
  std::vector<Poly> power = f;
  for (int n = 1; n <= max_degree; ++n) {
    const double scale = (n % 2 == 1 ? 1.0 : -1.0) / n;
    for (std::size_t d = 0; d <= deg; ++d) {
      for (const auto& [key, c] : power[d]) log_series[d][key] += scale * c;
    }
    if (n < max_degree) power = multiply_series(power, f, max_degree);
  }

  // + sum_{i,j} log(1 - u_i v_j X) = - sum_{i,j} sum_n (u_i v_j X)^n / n.
  for (std::size_t i = 0; i < ell; ++i) {
    for (std::size_t j = 0; j < ell; ++j) {
      for (int n = 1; n <= max_degree; ++n) {
        Key key{};
        key[i] = static_cast<std::uint8_t>(n);
        key[ell + j] = static_cast<std::uint8_t>(n);
        log_series[static_cast<std::size_t>(n)][key] -= 1.0 / n;
      }
    }
  }

  LogExpansion out;
  out.ell = ell;
  out.max_degree = max_degree;
  out.by_degree.resize(deg + 1);
  for (std::size_t d = 0; d <= deg; ++d) {
    for (const auto& [key, c] : log_series[d]) {
      if (std::abs(c) > 1e-12) out.by_degree[d].push_back({key, c});
    }
  }
  return out;
}

const LogExpansion& log_expansion(std::size_t ell, int max_degree) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<LogExpansion>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{ell, max_degree}];
  if (!slot) slot = std::make_unique<LogExpansion>(build_expansion(ell, max_degree));
  return *slot;
}

constexpr std::uint32_t kPrimeZetaSplit = 100;

std::shared_ptr<const std::vector<std::uint32_t>> primes_table(std::uint32_t limit) {
  static std::mutex mutex;
  static std::shared_ptr<const std::vector<std::uint32_t>> primes;
  std::lock_guard lock(mutex);
  if (!primes || primes->empty() || primes->back() < limit) {
    primes = std::make_shared<const std::vector<std::uint32_t>>(primes_up_to(std::max(limit, kDefaultPrimeCutoff)));
  }
  return primes;
}

// sum_{p > cutoff} p^{-z} for Re z > 1, through
// sum_{p > 100} p^{-z} = sum_k mu(k)/k log zeta_{100}(k z),
// zeta_{100}(w) = zeta(w) prod_{p <= 100} (1 - p^{-w}).
Complex prime_zeta_tail(Complex z, std::span<const std::uint32_t> primes, std::uint32_t cutoff) {
  static const int kMobius[] = {0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 0, -1, 0,
                                1, 1, -1, 0, 0, 1, 0, 0, -1, -1, -1, 0, 1, 1, 1, 0, -1, 1, 1, 0, -1};
  CompensatedComplexSum sum;
  const double decay = std::log(101.0) * z.real();
  for (int k = 1; k < static_cast<int>(std::size(kMobius)); ++k) {
    if (decay * k > 43.0) break;  // 101^{-k Re z} < 1e-18
    if (kMobius[k] == 0) continue;
    const Complex w = static_cast<double>(k) * z;
    Complex log_zeta = std::log(zeta(w));
    for (const auto p : primes) {
      if (p > kPrimeZetaSplit) break;
      log_zeta += std::log(1.0 - ppow(std::log(static_cast<double>(p)), w));
    }
    sum += static_cast<double>(kMobius[k]) / k * log_zeta;
  }
  for (const auto p : primes) {
    if (p <= kPrimeZetaSplit) continue;
    if (p > cutoff) break;
    sum += -ppow(std::log(static_cast<double>(p)), z);
  }
  return sum.value();
}

Complex monomial_exponent(const Key& key, const ShiftTuplePair& pair, int degree, Complex s) {
  const std::size_t ell = pair.ell();
  Complex z = static_cast<double>(degree) * (1.0 + 2.0 * s);
  for (std::size_t i = 0; i < ell; ++i) {
    z += static_cast<double>(key[i]) * pair.alphas[i] + static_cast<double>(key[ell + i]) * pair.betas[i];
  }
  return z;
}

double binomial(int n, int r) {
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

// Number of series terms needed so that C(J+l-1,l-1)^2 ratio^J < 1e-18.
int series_length(double ratio, std::size_t ell, int extra) {
  if (!(ratio < 1.0)) throw DomainError("Z_general: local series outside the convergence domain");
  const int l = static_cast<int>(ell);
  for (int j = 1; j < 4000; ++j) {
    const double c = binomial(j + extra + l - 1, l - 1);
    if (c * c * std::pow(ratio, j) < 1e-18) return j;
  }
  throw DomainError("Z_general: local series converges too slowly");
}

struct LocalData {
  std::vector<Complex> hu;  // h_j(u), j = 0..J+extra
  std::vector<Complex> hv;
  Complex x;                // p^{-1-2s}
  int terms;
};

LocalData local_data(const ShiftTuplePair& pair, std::uint64_t p, Complex s, double max_shift, int extra) {
  const double lp = std::log(static_cast<double>(p));
  const double ratio = std::exp(-(1.0 + 2.0 * s.real() - 2.0 * max_shift) * lp);
  LocalData out;
  out.terms = series_length(ratio, pair.ell(), extra);
  std::vector<Complex> u(pair.ell());
  std::vector<Complex> v(pair.ell());
  for (std::size_t i = 0; i < pair.ell(); ++i) {
    u[i] = ppow(lp, pair.alphas[i]);
    v[i] = ppow(lp, pair.betas[i]);
  }
  out.hu = complete_homogeneous(u, out.terms + extra);
  out.hv = complete_homogeneous(v, out.terms + extra);
  out.x = ppow(lp, 1.0 + 2.0 * s);
  return out;
}

// sum_j h_{j+eu}(u) h_{j+ev}(v) X^j
Complex local_series(const LocalData& d, int eu, int ev) {
  CompensatedComplexSum sum;
  Complex power = 1.0;
  for (int j = 0; j <= d.terms; ++j) {
    sum += d.hu[static_cast<std::size_t>(j + eu)] * d.hv[static_cast<std::size_t>(j + ev)] * power;
    power *= d.x;
  }
  return sum.value();
}

}  // namespace

Complex A_value(const ShiftQuad& q, Complex s) {
  struct Factor {
    Complex shift;
    const char* name;
  };
  const Factor factors[] = {{q.alpha + q.gamma, "zeta(1+s+alpha+gamma)"},
                            {q.alpha + q.delta, "zeta(1+s+alpha+delta)"},
                            {q.beta + q.gamma, "zeta(1+s+beta+gamma)"},
                            {q.beta + q.delta, "zeta(1+s+beta+delta)"}};
  Complex num = 1.0;
  for (const auto& f : factors) {
    if (std::abs(s + f.shift) <= 1e-8) throw PoleError(std::string("A_value: pole of ") + f.name);
    num *= zeta_one_plus(s + f.shift);
  }
  return num / zeta(2.0 + 2.0 * s + q.sum());
}

Complex A_residue_confluent(const ShiftQuad& q) {
  const Complex ab = q.beta - q.alpha;
  const Complex cd = q.delta - q.gamma;
  if (std::abs(ab) <= 1e-6 || std::abs(cd) <= 1e-6 || std::abs(ab + cd) <= 1e-6) {
    throw ConfluentShiftError("A_residue_confluent: needs alpha != beta, gamma != delta, alpha+gamma != beta+delta");
  }
  return 0.5 * zeta_one_plus(ab) * zeta_one_plus(cd) * zeta_one_plus(ab + cd) / zeta(2.0 + ab + cd);
}

Complex B_value(const ShiftQuad& q, const FactoredNat& h, const FactoredNat& k, Complex s) {
  require_coprime(h, k, "B_value");
  Complex out = 1.0;
  for (const auto& f : h.factors()) out *= B_local(q.alpha, q.beta, q.gamma, q.delta, f.prime, f.exponent, s);
  for (const auto& f : k.factors()) out *= B_local(q.gamma, q.delta, q.alpha, q.beta, f.prime, f.exponent, s);
  return out;
}

Complex B_series(const ShiftQuad& q, const FactoredNat& h, const FactoredNat& k, Complex s) {
  require_coprime(h, k, "B_series");
  Complex out = 1.0;
  for (const auto& f : h.factors()) out *= B_local_series(q.alpha, q.beta, q.gamma, q.delta, f.prime, f.exponent, s);
  for (const auto& f : k.factors()) out *= B_local_series(q.gamma, q.delta, q.alpha, q.beta, f.prime, f.exponent, s);
  return out;
}

Complex C_value(const ShiftQuad& q, const FactoredNat& h, const FactoredNat& k, Complex s) {
  require_coprime(h, k, "C_value");
  Complex out = 1.0;
  for (const auto& f : h.factors()) out *= C_local(q.alpha, q.beta, q.gamma, q.delta, f.prime, f.exponent, s);
  for (const auto& f : k.factors()) out *= C_local(q.gamma, q.delta, q.alpha, q.beta, f.prime, f.exponent, s);
  return out;
}

Complex Z_value(const ShiftQuad& q, const FactoredNat& h, const FactoredNat& k, Complex s) {
  require_coprime(h, k, "Z_value");
  return A_value(q, s) * B_value(q, h, k, s);
}

Complex F_closed(Complex a, Complex b, Complex c, const FactoredNat& h, const FactoredNat& k) {
  if (!((a + b).real() > 1.0)) throw DomainError("F_closed: requires Re(a+b) > 1");
  if (!(c.real() > 0.0)) throw DomainError("F_closed: requires Re(c) > 0");
  require_coprime(h, k, "F_closed");
  Complex out = zeta(1.0 + c) * zeta(a + b + c) / zeta(a + b);
  for (const auto& f : h.factors()) out *= F_local(a, b, c, f.prime, f.exponent);
  for (const auto& f : k.factors()) out *= F_local(b, a, c, f.prime, f.exponent);
  return out;
}

ZGeneralResult Z_general(const ShiftTuplePair& pair, const FactoredNat& h, const FactoredNat& k, Complex s,
                         std::uint32_t prime_cutoff) {
  pair.validate();
  require_coprime(h, k, "Z_general");
  if (pair.ell() > kMaxEll) throw RangeError("Z_general: ell above 4 is not supported");
  if (prime_cutoff < 100) throw DomainError("Z_general: prime_cutoff must be >= 100");
  const std::size_t ell = pair.ell();

  Complex zeta_part = 1.0;
  for (const auto a : pair.alphas) {
    for (const auto b : pair.betas) {
      if (std::abs(2.0 * s + a + b) <= 1e-8) throw PoleError("Z_general: pole of zeta(1+2s+alpha_i+beta_j)");
      zeta_part *= zeta_one_plus(2.0 * s + a + b);
    }
  }

  double max_shift = 0.0;
  for (const auto a : pair.alphas) max_shift = std::max(max_shift, std::abs(a));
  for (const auto b : pair.betas) max_shift = std::max(max_shift, std::abs(b));

  const int degree = ell <= 2 ? 4 : 3;
  const LogExpansion& expansion = log_expansion(ell, degree + 1);
  double min_degree2 = 1e300;
  for (const auto& m : expansion.by_degree[2]) {
    min_degree2 = std::min(min_degree2, monomial_exponent(m.exponents, pair, 2, s).real());
  }
  if (!(min_degree2 > 1.05)) {
    throw DomainError("Z_general: s = " + format_complex(s) + " is outside the convergence domain of the Euler product");
  }

  const auto prime_list = primes_table(prime_cutoff);
  const std::span<const std::uint32_t> primes(*prime_list);

  // Exact Euler product over p <= cutoff.
  CompensatedComplexSum log_product;
  for (const auto p : primes) {
    if (p > prime_cutoff) break;
    const LocalData d = local_data(pair, p, s, max_shift, 0);
    Complex local = local_series(d, 0, 0);
    for (std::size_t i = 1; i <= ell; ++i) {
      for (std::size_t j = 1; j <= ell; ++j) {
        const double lp = std::log(static_cast<double>(p));
        local *= 1.0 - ppow(lp, 1.0 + 2.0 * s + pair.alphas[i - 1] + pair.betas[j - 1]);
      }
    }
    log_product += std::log(local);
  }

  // Tail: sum over monomials of the log expansion against prime zeta tails.
  for (int d = 2; d <= degree; ++d) {
    for (const auto& m : expansion.by_degree[static_cast<std::size_t>(d)]) {
      const Complex z = monomial_exponent(m.exponents, pair, d, s);
      log_product += m.coefficient * prime_zeta_tail(z, primes, prime_cutoff);
    }
  }

  // Finite product over p | hk.
  Complex b_part = 1.0;
  for (const auto& f : h.factors()) {
    const LocalData d = local_data(pair, f.prime, s, max_shift, f.exponent);
    b_part *= local_series(d, 0, f.exponent) / local_series(d, 0, 0);
  }
  for (const auto& f : k.factors()) {
    const LocalData d = local_data(pair, f.prime, s, max_shift, f.exponent);
    b_part *= local_series(d, f.exponent, 0) / local_series(d, 0, 0);
  }

  ZGeneralResult out;
  out.value = zeta_part * std::exp(log_product.value()) * b_part;

  // Truncation of the expansion: first omitted degree, summed over p > cutoff.
  double weight = 0.0;
  double min_next = 1e300;
  for (const auto& m : expansion.by_degree[static_cast<std::size_t>(degree + 1)]) {
    weight += std::abs(m.coefficient);
    min_next = std::min(min_next, monomial_exponent(m.exponents, pair, degree + 1, s).real());
  }
  const double cutoff = static_cast<double>(prime_cutoff);
  const double log_error = 2.0 * weight * std::pow(cutoff, 1.0 - min_next) / ((min_next - 1.0) * std::log(cutoff));
  out.tail_bound = std::abs(out.value) * log_error;
  return out;
}

void ConfluenceSpec::validate() const {
  if (direction.empty()) throw DomainError("ConfluenceSpec: empty direction");
  for (std::size_t i = 0; i < direction.size(); ++i) {
    if (direction[i] == 0.0) throw DomainError("ConfluenceSpec: direction entries must be nonzero");
    for (std::size_t j = i + 1; j < direction.size(); ++j) {
      if (direction[i] == direction[j]) throw DomainError("ConfluenceSpec: direction entries must be distinct");
      if (direction[i] + direction[j] == 0.0) throw DomainError("ConfluenceSpec: direction entries sum to zero");
    }
  }
  if (!(radius > 0.0 && radius <= 0.05)) throw DomainError("ConfluenceSpec: radius must lie in (0, 0.05]");
  if (points < 8) throw DomainError("ConfluenceSpec: at least 8 points are required");
}

ConfluenceSpec ConfluenceSpec::standard(std::size_t n, double radius, int points) {
  static constexpr double kPrimesLike[] = {1, 2, 3, 5, 7, 11, 13, 17};
  if (n == 0 || n > std::size(kPrimesLike)) throw DomainError("ConfluenceSpec: direction length must be 1..8");
  return {std::vector<double>(kPrimesLike, kPrimesLike + n), radius, points};
}

Complex confluent_eval(const std::function<Complex(Complex)>& f, const ConfluenceSpec& spec) {
  spec.validate();
  CompensatedComplexSum sum;
  for (int j = 0; j < spec.points; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / spec.points;
    const Complex u = std::polar(spec.radius, theta);
    try {
      sum += f(u);
    } catch (const std::exception& e) {
      throw DomainError("confluent_eval: evaluation failed at u = " + format_complex(u) + ": " + e.what());
    }
  }
  return sum.value() / static_cast<double>(spec.points);
}

namespace testing {

CFaultInjection::CFaultInjection(double perturbation) { g_c1_fault.store(perturbation); }
CFaultInjection::~CFaultInjection() { g_c1_fault.store(0.0); }

}  // namespace testing

}  // namespace ztl
