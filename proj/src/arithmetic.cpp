#include "ztl/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ztl/errors.hpp"

namespace ztl {
namespace {

constexpr std::uint64_t kMaxValue = std::numeric_limits<std::int64_t>::max();
constexpr double kConfluenceThreshold = 1e-6;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1;
  base %= m;
  while (e > 0) {
    if (e & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    e >>= 1U;
  }
  return result;
}

bool checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  const auto wide = static_cast<unsigned __int128>(a) * b;
  if (wide > kMaxValue) return false;
  out = static_cast<std::uint64_t>(wide);
  return true;
}

void check_shift(Complex a, const char* name) {
  if (!(std::abs(a) <= 1.0)) {
    throw DomainError(std::string("sigma: shift ") + name + " must satisfy |shift| <= 1");
  }
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

FactoredNat FactoredNat::from_factors(std::vector<PrimePower> factors) {
  FactoredNat out;
  std::uint64_t value = 1;
  std::uint64_t previous = 0;
  for (const auto& f : factors) {
    if (f.exponent < 1) throw DomainError("FactoredNat: exponents must be >= 1");
    if (f.prime <= previous) throw DomainError("FactoredNat: primes must be strictly increasing");
    if (!is_prime(f.prime)) throw DomainError("FactoredNat: " + std::to_string(f.prime) + " is not prime");
    for (int i = 0; i < f.exponent; ++i) {
      if (!checked_mul(value, f.prime, value)) throw RangeError("FactoredNat: value exceeds 2^63-1");
    }
    previous = f.prime;
  }
  out.value_ = value;
  out.factors_ = std::move(factors);
  return out;
}

int FactoredNat::exponent_of(std::uint64_t p) const {
  for (const auto& f : factors_) {
    if (f.prime == p) return f.exponent;
  }
  return 0;
}

std::string FactoredNat::to_string() const {
  std::ostringstream os;
  os << value_;
  return os.str();
}

FactoredNat factorize(std::uint64_t n) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  if (n > kMaxValue) throw RangeError("factorize: n exceeds 2^63-1");
  std::vector<PrimePower> factors;
  std::uint64_t rest = n;
  auto divide_out = [&](std::uint64_t d) {
    int e = 0;
    while (rest % d == 0) {
      rest /= d;
      ++e;
    }
    if (e > 0) factors.push_back({d, e});
  };
  divide_out(2);
  std::uint64_t d = 3;
  for (; d <= kTrialDivisionBound && d <= rest / d; d += 2) divide_out(d);
  if (rest > 1) {
    if (d <= kTrialDivisionBound || is_prime(rest)) {
      factors.push_back({rest, 1});
    } else {
      throw UnfactorableError("factorize: " + std::to_string(n) +
                              " has a cofactor with no prime factor below the trial bound " +
                              std::to_string(kTrialDivisionBound));
    }
  }
  return FactoredNat::from_factors(std::move(factors));
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool coprime(const FactoredNat& a, const FactoredNat& b) {
  for (const auto& f : a.factors()) {
    if (b.exponent_of(f.prime) > 0) return false;
  }
  return true;
}

int mobius(const FactoredNat& n) {
  int sign = 1;
  for (const auto& f : n.factors()) {
    if (f.exponent >= 2) return 0;
    sign = -sign;
  }
  return sign;
}

std::uint64_t totient(const FactoredNat& n) {
  std::uint64_t phi = 1;
  for (const auto& f : n.factors()) {
    phi *= f.prime - 1;
    for (int i = 1; i < f.exponent; ++i) phi *= f.prime;
  }
  return phi;
}

Complex sigma_prime_power_closed(std::uint64_t p, int m, Complex a, Complex b) {
  const double lp = std::log(static_cast<double>(p));
  const Complex x = std::exp(-a * lp);
  const Complex y = std::exp(-b * lp);
  const double mp1 = static_cast<double>(m) + 1.0;
  return (std::exp(-mp1 * a * lp) - std::exp(-mp1 * b * lp)) / (x - y);
}

Complex sigma_prime_power(std::uint64_t p, int m, Complex a, Complex b) {
  if (m == 0) return 1.0;
  const double lp = std::log(static_cast<double>(p));
  const Complex x = std::exp(-a * lp);
  const Complex y = std::exp(-b * lp);
  if (std::abs(x - y) >= kConfluenceThreshold) return sigma_prime_power_closed(p, m, a, b);
  Complex sum = 0.0;
  for (int j = 0; j <= m; ++j) {
    sum += std::exp(-(static_cast<double>(j) * a + static_cast<double>(m - j) * b) * lp);
  }
  return sum;
}

Complex sigma_shifted(const FactoredNat& n, Complex a, Complex b) {
  check_shift(a, "a");
  check_shift(b, "b");
  Complex result = 1.0;
  for (const auto& f : n.factors()) result *= sigma_prime_power(f.prime, f.exponent, a, b);
  return result;
}

std::vector<Complex> complete_homogeneous(std::span<const Complex> vars, int max_degree) {
  std::vector<Complex> h(static_cast<std::size_t>(max_degree) + 1, Complex(0.0));
  h[0] = 1.0;
  if (vars.empty()) return h;
  // h over the first variable, then fold in one variable at a time:
  // h^{(i)}_j = h^{(i-1)}_j + x_i h^{(i)}_{j-1}.
  for (const Complex x : vars) {
    for (std::size_t j = 1; j < h.size(); ++j) h[j] += x * h[j - 1];
  }
  return h;
}

Complex sigma_tuple(const FactoredNat& n, std::span<const Complex> shifts) {
  if (shifts.empty()) throw DomainError("sigma_tuple: at least one shift is required");
  for (std::size_t i = 0; i < shifts.size(); ++i) check_shift(shifts[i], "shifts[i]");
  Complex result = 1.0;
  std::vector<Complex> vars(shifts.size());
  for (const auto& f : n.factors()) {
    const double lp = std::log(static_cast<double>(f.prime));
    for (std::size_t i = 0; i < shifts.size(); ++i) vars[i] = std::exp(-shifts[i] * lp);
    result *= complete_homogeneous(vars, f.exponent)[static_cast<std::size_t>(f.exponent)];
  }
  return result;
}

std::int64_t ramanujan_sum(const FactoredNat& l, std::uint64_t r) {
  // c_l(r) = sum_{d | (l, r)} d mu(l/d). Divisors d of (l, r) are enumerated
  // from the factorization of l; only d with l/d squarefree contribute.
  struct Local {
    std::int64_t prime;
    int exp_l;
    int exp_g;
  };
  std::vector<Local> locals;
  for (const auto& f : l.factors()) {
    int v = 0;
    if (r == 0) {
      v = f.exponent;
    } else {
      std::uint64_t rest = r;
      while (v < f.exponent && rest % f.prime == 0) {
        rest /= f.prime;
        ++v;
      }
    }
    // l/d squarefree at p needs exponent_of_d >= exp_l - 1.
    if (v < f.exponent - 1) return 0;
    locals.push_back({static_cast<std::int64_t>(f.prime), f.exponent, v});
  }

  std::int64_t total = 0;
  std::vector<int> e(locals.size());
  for (std::size_t i = 0; i < locals.size(); ++i) e[i] = locals[i].exp_l - 1;
  for (;;) {
    std::int64_t d = 1;
    int mu = 1;
    for (std::size_t i = 0; i < locals.size(); ++i) {
      for (int j = 0; j < e[i]; ++j) d *= locals[i].prime;
      if (locals[i].exp_l - e[i] == 1) mu = -mu;
    }
    total += mu * d;
    std::size_t i = 0;
    for (; i < locals.size(); ++i) {
      if (e[i] < std::min(locals[i].exp_l, locals[i].exp_g)) {
        ++e[i];
        break;
      }
      e[i] = locals[i].exp_l - 1;
    }
    if (i == locals.size()) break;
  }
  return total;
}

std::vector<std::uint32_t> smallest_prime_factor_table(std::uint32_t limit) {
  std::vector<std::uint32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    for (std::uint64_t j = i; j <= limit; j += i) {
      if (spf[j] == 0) spf[j] = i;
    }
  }
  return spf;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

}  // namespace ztl
