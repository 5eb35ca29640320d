#include "ztl/special.hpp"

#include <array>
#include <cmath>
#include <string>

#include "ztl/arithmetic.hpp"
#include "ztl/errors.hpp"
#include "ztl/summation.hpp"

namespace ztl {
namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} for k = 1..16.
constexpr std::array<double, 16> kBernoulli = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
};

// B_{2k} / (2k)!
const std::array<double, 16>& bernoulli_over_factorial() {
  static const std::array<double, 16> table = [] {
    std::array<double, 16> out{};
    double factorial = 1.0;
    for (int k = 1; k <= 16; ++k) {
      factorial *= (2.0 * k - 1.0) * (2.0 * k);
      out[static_cast<std::size_t>(k - 1)] = kBernoulli[static_cast<std::size_t>(k - 1)] / factorial;
    }
    return out;
  }();
  return table;
}

// Euler-Maclaurin corrections at cutoff N past the integral term:
// N^{-s}/2 + sum_k B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}.
Complex euler_maclaurin_corrections(Complex s, Complex n_pow, std::int64_t n, int order) {
  const double nd = static_cast<double>(n);
  Complex tail = 0.5 * n_pow;
  const auto& coef = bernoulli_over_factorial();
  Complex rising = s;              // s (s+1) ... (s+2k-2)
  Complex power = n_pow / nd;      // N^{-s-2k+1}
  const double inv_n2 = 1.0 / (nd * nd);
  for (int k = 1; k <= order; ++k) {
    tail += coef[static_cast<std::size_t>(k - 1)] * rising * power;
    rising *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
    power *= inv_n2;
  }
  return tail;
}

// N^{1-s}/(s-1) plus the corrections above.
Complex euler_maclaurin_tail(Complex s, std::int64_t n, int order) {
  const double nd = static_cast<double>(n);
  const Complex n_pow = std::exp(-s * std::log(nd));  // N^{-s}
  return n_pow * nd / (s - 1.0) + euler_maclaurin_corrections(s, n_pow, n, order);
}

// Lanczos approximation, g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

Complex log_gamma_right(Complex z) {
  const Complex zm1 = z - 1.0;
  Complex x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (zm1 + static_cast<double>(i));
  const Complex t = zm1 + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (zm1 + 0.5) * std::log(t) - t + std::log(x);
}

// log sin(w) without overflow for large |Im w|.
Complex log_sin(Complex w) {
  const Complex i(0.0, 1.0);
  if (w.imag() >= 0.0) return -i * w + std::log((1.0 - std::exp(2.0 * i * w)) * i * 0.5);
  return i * w + std::log((1.0 - std::exp(-2.0 * i * w)) / (2.0 * i));
}

bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

}  // namespace

void ZetaParams::validate() const {
  if (!(terms_per_unit_height >= 1.0)) throw DomainError("ZetaParams: terms_per_unit_height must be >= 1");
  if (n_min < 16) throw DomainError("ZetaParams: n_min must be >= 16");
  if (bernoulli_order < 4 || bernoulli_order > 16) throw DomainError("ZetaParams: bernoulli_order must be in [4, 16]");
}

std::int64_t ZetaParams::cutoff(double height) const {
  const auto scaled = static_cast<std::int64_t>(std::ceil(terms_per_unit_height * std::abs(height)));
  return std::max<std::int64_t>(n_min, scaled);
}

Complex zeta(Complex s, const ZetaParams& params) {
  params.validate();
  if (std::abs(s - 1.0) < 1e-15) throw PoleError("zeta: pole at s = 1");
  if (!(std::abs(s.imag()) <= 1e5)) throw RangeError("zeta: |Im s| exceeds 1e5");
  if (!(s.real() >= -2.0)) throw RangeError("zeta: Re s below -2");

  const std::int64_t n = params.cutoff(s.imag());
  CompensatedComplexSum sum;
  for (std::int64_t k = 1; k < n; ++k) sum += std::exp(-s * std::log(static_cast<double>(k)));
  return sum.value() + euler_maclaurin_tail(s, n, params.bernoulli_order);
}

Complex zeta_one_plus(Complex x, const ZetaParams& params) {
  params.validate();
  if (std::abs(x) < 1e-300) throw PoleError("zeta: pole at s = 1");
  const Complex s = 1.0 + x;
  if (!(std::abs(s.imag()) <= 1e5)) throw RangeError("zeta: |Im s| exceeds 1e5");
  if (!(s.real() >= -2.0)) throw RangeError("zeta: Re s below -2");

  const std::int64_t n = params.cutoff(s.imag());
  CompensatedComplexSum sum;
  for (std::int64_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    sum += std::exp(-x * std::log(kd)) / kd;
  }
  // N^{-x}/x split as 1/x + expm1(-x log N)/x so the pole part keeps the full
  // relative precision of x; the remaining corrections are smooth in s.
  const Complex z = -x * std::log(static_cast<double>(n));
  const Complex expm1 = 2.0 * std::exp(0.5 * z) * std::sinh(0.5 * z);
  sum += expm1 / x;
  sum += euler_maclaurin_corrections(s, std::exp(z) / static_cast<double>(n), n, params.bernoulli_order);
  return 1.0 / x + sum.value();
}

CriticalLineZeta::CriticalLineZeta(std::vector<Complex> shifts, double max_height, const ZetaParams& params)
    : shifts_(std::move(shifts)), max_height_(max_height), params_(params) {
  params_.validate();
  if (!(max_height >= 1.0) || !(max_height <= 1e5)) throw RangeError("CriticalLineZeta: height must lie in [1, 1e5]");
  for (const auto a : shifts_) {
    if (!(std::abs(a) <= 0.5)) throw DomainError("CriticalLineZeta: |shift| must be <= 0.5");
  }
  const std::int64_t n_max = params_.cutoff(max_height);
  spf_ = smallest_prime_factor_table(static_cast<std::uint32_t>(n_max));
  log_n_.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (std::int64_t k = 1; k <= n_max; ++k) log_n_[static_cast<std::size_t>(k)] = std::log(static_cast<double>(k));
  coefficients_.reserve(shifts_.size());
  for (const auto a : shifts_) {
    std::vector<Complex> c(static_cast<std::size_t>(n_max) + 1, Complex(0.0));
    for (std::int64_t k = 1; k <= n_max; ++k) {
      c[static_cast<std::size_t>(k)] = std::exp(-(0.5 + a) * log_n_[static_cast<std::size_t>(k)]);
    }
    coefficients_.push_back(std::move(c));
  }
}

std::vector<Complex> CriticalLineZeta::evaluate(double t) const {
  if (!(t >= 1.0) || !(t <= max_height_)) {
    throw RangeError("CriticalLineZeta: height " + std::to_string(t) + " outside [1, max_height]");
  }
  const std::int64_t n = params_.cutoff(t);
  thread_local std::vector<Complex> phase;
  phase.resize(static_cast<std::size_t>(n));
  phase[1] = 1.0;
  for (std::int64_t k = 2; k < n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const std::uint32_t p = spf_[uk];
    if (p == k) {
      const double theta = -t * log_n_[uk];
      phase[uk] = Complex(std::cos(theta), std::sin(theta));
    } else {
      phase[uk] = phase[p] * phase[uk / p];
    }
  }

  std::vector<Complex> out;
  out.reserve(shifts_.size());
  for (std::size_t i = 0; i < shifts_.size(); ++i) {
    const auto& c = coefficients_[i];
    CompensatedComplexSum sum;
    for (std::int64_t k = 1; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      sum += c[uk] * phase[uk];
    }
    const Complex s(0.5 + shifts_[i].real(), shifts_[i].imag() + t);
    out.push_back(sum.value() + euler_maclaurin_tail(s, n, params_.bernoulli_order));
  }
  return out;
}

std::vector<Complex> zeta_critical_batch(double t, std::span<const Complex> shifts, const ZetaParams& params) {
  if (!(t >= 1.0)) throw RangeError("zeta_critical_batch: t must be >= 1");
  CriticalLineZeta kernel(std::vector<Complex>(shifts.begin(), shifts.end()), t, params);
  return kernel.evaluate(t);
}

Complex log_gamma(Complex z) {
  if (is_nonpositive_integer(z)) throw PoleError("gamma: pole at non-positive integer");
  if (!(std::abs(z) <= 1e5)) throw RangeError("gamma: |z| exceeds 1e5");
  if (z.real() < 0.5) return std::log(kPi) - log_sin(kPi * z) - log_gamma_right(1.0 - z);
  return log_gamma_right(z);
}

Complex gamma(Complex z) { return std::exp(log_gamma(z)); }

Complex x_factor(const ShiftQuad& shifts, double t, XFactorMode mode) {
  if (!(t >= 2.0)) throw DomainError("x_factor: t must be >= 2");
  if (mode == XFactorMode::asymptotic) return std::exp(-shifts.sum() * std::log(t / (2.0 * kPi)));
  const Complex it(0.0, t);
  Complex log_x = shifts.sum() * std::log(kPi);
  for (const Complex a : {shifts.alpha, shifts.beta}) {
    log_x += log_gamma((0.5 - a - it) / 2.0) - log_gamma((0.5 + a + it) / 2.0);
  }
  for (const Complex c : {shifts.gamma, shifts.delta}) {
    log_x += log_gamma((0.5 - c + it) / 2.0) - log_gamma((0.5 + c - it) / 2.0);
  }
  return std::exp(log_x);
}

Complex chi_symmetric(Complex s) {
  return std::exp(s * std::log(kPi) + log_gamma((0.5 - s) / 2.0) - log_gamma((0.5 + s) / 2.0));
}

}  // namespace ztl
