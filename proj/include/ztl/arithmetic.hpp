#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ztl {

using Complex = std::complex<double>;

struct PrimePower {
  std::uint64_t prime = 0;
  int exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Trial division bound used by factorize().
inline constexpr std::uint64_t kTrialDivisionBound = 10'000'000;

/// A positive integer together with its canonical prime factorization.
class FactoredNat {
 public:
  /// The number 1.
  FactoredNat() = default;

  /// Builds from an explicit factorization; validates primality, ordering and
  /// overflow. Throws DomainError on any violation.
  static FactoredNat from_factors(std::vector<PrimePower> factors);

  [[nodiscard]] std::uint64_t value() const { return value_; }
  [[nodiscard]] std::span<const PrimePower> factors() const { return factors_; }
  [[nodiscard]] bool is_one() const { return factors_.empty(); }

  /// Exponent of p in this number (0 when p does not divide it).
  [[nodiscard]] int exponent_of(std::uint64_t p) const;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const FactoredNat&, const FactoredNat&) = default;

 private:
  std::uint64_t value_ = 1;
  std::vector<PrimePower> factors_;
};

/// Deterministic primality test (trial division up to sqrt, then Miller-Rabin
/// with a base set that is exact for 64-bit inputs).
bool is_prime(std::uint64_t n);

/// Canonical factorization by trial division. Rejects 0 and values above
/// 2^63-1 with DomainError, and inputs whose smallest prime factor exceeds
/// kTrialDivisionBound with UnfactorableError.
FactoredNat factorize(std::uint64_t n);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
bool coprime(const FactoredNat& a, const FactoredNat& b);

/// Moebius function.
int mobius(const FactoredNat& n);

/// Euler's totient.
std::uint64_t totient(const FactoredNat& n);

/// sigma_{a,b}(p^m) = sum_{j=0..m} p^{-j a - (m-j) b}.
Complex sigma_prime_power(std::uint64_t p, int m, Complex a, Complex b);

/// The closed form (p^{-(m+1)a} - p^{-(m+1)b}) / (p^{-a} - p^{-b}) without
/// the confluent fallback. Exposed for verification only.
Complex sigma_prime_power_closed(std::uint64_t p, int m, Complex a, Complex b);

/// sigma_{a,b}(n) = sum_{n1 n2 = n} n1^{-a} n2^{-b}.
/// Requires |a|, |b| <= 1.
Complex sigma_shifted(const FactoredNat& n, Complex a, Complex b);

/// sigma_{a_1..a_l}(n) = sum_{c_1...c_l = n} prod c_i^{-a_i}.
/// Requires at least one shift and |a_i| <= 1.
Complex sigma_tuple(const FactoredNat& n, std::span<const Complex> shifts);

/// Complete homogeneous sums h_0..h_max over the variables x_1..x_l:
/// h_j = sum over compositions of j into l parts of prod x_i^{part_i}.
/// sigma_tuple(p^j, shifts) = h_j(p^{-shift_1}, ..., p^{-shift_l}).
std::vector<Complex> complete_homogeneous(std::span<const Complex> vars, int max_degree);

/// Ramanujan sum c_l(r) via c_l(r) = sum_{d | (l, r)} d mu(l/d). r = 0 gives phi(l).
std::int64_t ramanujan_sum(const FactoredNat& l, std::uint64_t r);

/// Smallest-prime-factor table on [0, limit].
std::vector<std::uint32_t> smallest_prime_factor_table(std::uint32_t limit);

/// All primes <= limit in increasing order.
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

}  // namespace ztl
