#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ztl/errors.hpp"
#include "ztl/main_term.hpp"
#include "ztl/special.hpp"

using namespace ztl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = MathConstants::euler_gamma;

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

FactoredNat nat(std::uint64_t n) { return factorize(n); }

ShiftQuad random_quad(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
}

}  // namespace

TEST_CASE("weight: plateau, support and bounds") {
  const WeightSpec w = WeightSpec::standard(2000.0);
  CHECK(w.T0 == doctest::Approx(250.0));
  CHECK(w.lower == 1000.0);
  CHECK(w.upper == 4000.0);
  CHECK(weight_eval(2500.0, w) == 1.0);
  CHECK(weight_eval(999.0, w) == 0.0);
  CHECK(weight_eval(4000.5, w) == 0.0);
  CHECK(weight_eval(1125.0, w) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(weight_eval(3875.0, w) == doctest::Approx(0.5).epsilon(1e-14));

  double max_scaled = 0.0;
  for (double t = 900.0; t <= 4100.0; t += 0.5) {
    const double v = weight_eval(t, w);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    max_scaled = std::max(max_scaled, std::abs(weight_eval(t, w, 1)) * w.T0);
  }
  CHECK(max_scaled <= 4.0);
  CHECK(max_scaled > 1.0);
}

TEST_CASE("weight: finite-difference derivatives") {
  const WeightSpec w = WeightSpec::standard(1000.0);
  // psi'(1/2) = 2 exactly, so w'(lower + T0/2) = 2 / T0.
  CHECK(weight_eval(w.lower + 0.5 * w.T0, w, 1) == doctest::Approx(2.0 / w.T0).epsilon(1e-6));
  CHECK(weight_eval(w.upper - 0.5 * w.T0, w, 1) == doctest::Approx(-2.0 / w.T0).epsilon(1e-6));
  for (int order = 1; order <= 4; ++order) CHECK(weight_eval(1500.0, w, order) == 0.0);
  CHECK_THROWS_AS((void)weight_eval(1500.0, w, 5), DomainError);
  CHECK_THROWS_AS((void)weight_eval(1500.0, w, -1), DomainError);
}

TEST_CASE("weight: validation") {
  CHECK_THROWS_AS((void)WeightSpec::standard(100.0), DomainError);
  CHECK_THROWS_AS((void)WeightSpec::standard(1000.0, 10.0), DomainError);
  CHECK_THROWS_AS((void)WeightSpec::standard(1000.0, 300.0), DomainError);
  CHECK_NOTHROW((void)WeightSpec::standard(1000.0, 250.0));
  WeightSpec wide = WeightSpec::standard(1000.0);
  wide.upper = 4000.0;
  CHECK_NOTHROW(wide.validate());
  wide.upper = 4001.0;
  CHECK_THROWS_AS(wide.validate(), DomainError);
}

TEST_CASE("quad spec validation") {
  CHECK_NOTHROW(QuadSpec{}.validate());
  CHECK_THROWS_AS((QuadSpec{0.1, 8, 1e-6, 1}.validate()), DomainError);
  CHECK_THROWS_AS((QuadSpec{4.5, 8, 1e-6, 1}.validate()), DomainError);
  CHECK_THROWS_AS((QuadSpec{0.5, 3, 1e-6, 1}.validate()), DomainError);
  CHECK_THROWS_AS((QuadSpec{0.5, 33, 1e-6, 1}.validate()), DomainError);
  CHECK_THROWS_AS((QuadSpec{0.5, 8, 1e-7, 1}.validate()), DomainError);
  CHECK_THROWS_AS((QuadSpec{0.5, 8, 1e-6, 5}.validate()), DomainError);
  CHECK_THROWS_AS((QuadSpec{4.0, 8, 1e-6, 1}.validate()), DomainError);  // 2 nodes per unit
}

TEST_CASE("weight integrator: exact mass and moments") {
  for (const double T : {500.0, 2000.0, 8000.0}) {
    const WeightSpec w = WeightSpec::standard(T);
    const WeightIntegrator integ(w);
    // psi(x) + psi(1 - x) = 1, so each transition contributes T0 / 2.
    const double mass = (w.upper - w.lower) - w.T0;
    CHECK(integ.log_moment(0) == doctest::Approx(mass).epsilon(1e-13));
    CHECK(std::abs(integ.moment(0.0) - mass) < 1e-13 * mass);
  }
  // (t/2pi)^{-e} for real e against the plateau part alone, with the weight's
  // transitions symmetric enough that the integral sits between the inner and
  // outer plain integrals.
  const WeightSpec w = WeightSpec::standard(2000.0);
  const WeightIntegrator integ(w);
  const double e = 0.3;
  auto plain = [&](double a, double b) {
    const double c = 1.0 - e;
    return std::pow(2 * kPi, e) * (std::pow(b, c) - std::pow(a, c)) / c;
  };
  const double m = integ.moment(e).real();
  CHECK(m > plain(w.plateau_lower(), w.plateau_upper()));
  CHECK(m < plain(w.lower, w.upper));
  CHECK(integ.integrate([](double t) { return t; }) ==
        doctest::Approx(0.5 * (w.lower + w.upper) * integ.log_moment(0)).epsilon(1e-12));
}

TEST_CASE("theorem1: realness for real shifts") {
  const WeightSpec w = WeightSpec::standard(1000.0);
  const ShiftQuad q{0.05, -0.03, 0.07, 0.11};
  for (const auto& [h, k] : std::vector<std::pair<int, int>>{{1, 1}, {3, 2}, {5, 12}}) {
    const MomentReport r = theorem1_main_term(q, nat(h), nat(k), w, QuadSpec{});
    CHECK(r.terms.size() == 6);
    CHECK_FALSE(r.confluent);
    CHECK(std::abs(r.main_term_total.imag()) <= 1e-10 * std::abs(r.main_term_total));
    Complex sum = 0.0;
    for (const auto& t : r.terms) sum += t.value;
    CHECK(rel(sum, r.main_term_total) < 1e-13);
  }
}

TEST_CASE("theorem1: swap symmetry (alpha,beta)<->(gamma,delta) with h<->k") {
  std::mt19937_64 rng(7);
  const WeightSpec w = WeightSpec::standard(2000.0);
  const std::vector<std::pair<int, int>> twists{{1, 1}, {3, 2}, {4, 15}, {7, 1}};
  for (int trial = 0; trial < 12; ++trial) {
    const ShiftQuad q = random_quad(rng, 0.1);
    const auto [h, k] = twists[trial % twists.size()];
    const MomentReport a = theorem1_main_term(q, nat(h), nat(k), w, QuadSpec{});
    const MomentReport b = theorem1_main_term({q.gamma, q.delta, q.alpha, q.beta}, nat(k), nat(h), w, QuadSpec{});
    CHECK(rel(b.main_term_total, a.main_term_total) < 1e-10);
  }
}

TEST_CASE("theorem1: positive and increasing in T at zero shifts") {
  double previous = 0.0;
  for (const double T : {500.0, 1000.0, 2000.0, 4000.0}) {
    const MomentReport r = theorem1_main_term({}, nat(1), nat(1), WeightSpec::standard(T), QuadSpec{});
    CHECK(r.confluent);
    CHECK(r.terms.empty());
    CHECK(r.main_term_total.real() > previous);
    CHECK(std::abs(r.main_term_total.imag()) < 1e-8 * r.main_term_total.real());
    previous = r.main_term_total.real();
  }
}

TEST_CASE("theorem1: confluent stability in the radius") {
  for (const double T : {500.0, 2000.0}) {
    const WeightSpec w = WeightSpec::standard(T);
    MainTermOptions coarse;
    MainTermOptions fine;
    fine.confluence.radius = 0.005;
    const Complex a = theorem1_main_term({}, nat(1), nat(1), w, QuadSpec{}, coarse).main_term_total;
    const Complex b = theorem1_main_term({}, nat(1), nat(1), w, QuadSpec{}, fine).main_term_total;
    CHECK(rel(a, b) < 1e-6);
  }
}

TEST_CASE("theorem1: direct vs confluent at small generic shifts") {
  const double T = 2000.0;
  const double s = 1.0 / std::log(T);
  const ShiftQuad q{0.013 * s, 0.007 * s, -0.011 * s, 0.005 * s};
  const WeightSpec w = WeightSpec::standard(T);
  MainTermOptions forced;
  forced.force_confluent = true;
  forced.confluence.radius = 0.005;
  const MomentReport direct = theorem1_main_term(q, nat(1), nat(1), w, QuadSpec{});
  const MomentReport conf = theorem1_main_term(q, nat(1), nat(1), w, QuadSpec{}, forced);
  CHECK_FALSE(direct.confluent);
  CHECK(conf.confluent);
  CHECK(rel(conf.main_term_total, direct.main_term_total) < 1e-6);

  // The six direct terms are about 6e9 times the total here, so each extra
  // rounding in the twist factor B costs roughly 1e-6 of the result.
  const MomentReport direct_twisted = theorem1_main_term(q, nat(3), nat(2), w, QuadSpec{});
  const MomentReport conf_twisted = theorem1_main_term(q, nat(3), nat(2), w, QuadSpec{}, forced);
  CHECK(rel(conf_twisted.main_term_total, direct_twisted.main_term_total) < 1e-5);
}

TEST_CASE("theorem1: zero shifts against the fourth-moment density polynomial") {
  // Confluent limit of the six-term bracket at h = k = 1 as a polynomial in
  // L = log(t / 2 pi), from a 200-digit evaluation at shifts 1e-30 (1, 2, 3, 5).
  constexpr double kCoefficients[5] = {1.3124243859616692, 3.2279079649012548, 2.425962198846682,
                                       0.69886988487897997, 0.050660591821168886};
  CHECK(kCoefficients[4] == doctest::Approx(1.0 / (2 * kPi * kPi)).epsilon(1e-15));
  for (const double T : {500.0, 2000.0}) {
    const WeightSpec w = WeightSpec::standard(T);
    const WeightIntegrator integ(w);
    double expected = 0.0;
    for (int j = 0; j <= 4; ++j) expected += kCoefficients[j] * integ.log_moment(j);
    const Complex total = theorem1_main_term({}, nat(1), nat(1), w, QuadSpec{}).main_term_total;
    CHECK(rel(total, expected) < 1e-8);
  }
}

TEST_CASE("theorem1: twisted zero shifts against the density polynomial") {
  // (h, k) = (3, 2), same oracle with B summed from its defining series.
  // The leading coefficient is B(0) = 2 times the untwisted one.
  constexpr double kCoefficients[5] = {-1.8779734012065477, 0.53685115101841622, 2.8494372992989324,
                                       1.2396067437909675, 0.10132118364233777};
  CHECK(kCoefficients[4] == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-15));
  for (const double T : {500.0, 2000.0}) {
    const WeightSpec w = WeightSpec::standard(T);
    const WeightIntegrator integ(w);
    double expected = 0.0;
    for (int j = 0; j <= 4; ++j) expected += kCoefficients[j] * integ.log_moment(j);
    expected /= std::sqrt(6.0);
    const Complex total = theorem1_main_term({}, nat(3), nat(2), w, QuadSpec{}).main_term_total;
    CHECK(rel(total, expected) < 1e-8);
  }
}

TEST_CASE("theorem1: ratio to the log^4 t leading term decreases with T") {
  double previous = 1e300;
  for (const double T : {500.0, 1000.0, 2000.0, 4000.0}) {
    const WeightSpec w = WeightSpec::standard(T);
    const WeightIntegrator integ(w);
    const double leading = integ.integrate([](double t) { return std::pow(std::log(t), 4); }) / (2 * kPi * kPi);
    const double ratio = theorem1_main_term({}, nat(1), nat(1), w, QuadSpec{}).main_term_total.real() / leading;
    CHECK(ratio > 1.0);
    CHECK(ratio < previous);
    previous = ratio;
  }
}

TEST_CASE("theorem1: worker count does not change the result") {
  const WeightSpec w = WeightSpec::standard(1000.0);
  MainTermOptions one;
  MainTermOptions four;
  four.workers = 4;
  const Complex a = theorem1_main_term({}, nat(3), nat(2), w, QuadSpec{}, one).main_term_total;
  const Complex b = theorem1_main_term({}, nat(3), nat(2), w, QuadSpec{}, four).main_term_total;
  CHECK(a == b);
}

TEST_CASE("theorem1: errors") {
  const WeightSpec w = WeightSpec::standard(1000.0);
  CHECK_THROWS_AS((void)theorem1_main_term({}, nat(6), nat(4), w, QuadSpec{}), NonCoprimeError);
  MainTermOptions bad;
  bad.confluence.direction = {1, 1, 2, 3};
  CHECK_THROWS_AS((void)theorem1_main_term({}, nat(1), nat(1), w, QuadSpec{}, bad), DomainError);
  bad.confluence.direction = {1, 2, 3};
  CHECK_THROWS_AS((void)theorem1_main_term({}, nat(1), nat(1), w, QuadSpec{}, bad), DomainError);
}

TEST_CASE("conjecture: ell = 1 reproduces the smoothed second moment") {
  const WeightSpec w = WeightSpec::standard(2000.0);
  const WeightIntegrator integ(w);
  const ShiftTuplePair zero{{0.0}, {0.0}};
  const MomentReport r = conjecture_main_term(zero, nat(1), nat(1), w, QuadSpec{});
  CHECK(r.confluent);
  const double expected = integ.log_moment(1) + 2 * kEulerGamma * integ.log_moment(0);
  CHECK(rel(r.main_term_total, expected) < 1e-8);

  // The twisted version carries (hk)^{-1/2} and log(t / 2 pi hk).
  const MomentReport t = conjecture_main_term(zero, nat(3), nat(2), w, QuadSpec{});
  const double twisted =
      (integ.log_moment(1) + (2 * kEulerGamma - std::log(6.0)) * integ.log_moment(0)) / std::sqrt(6.0);
  CHECK(rel(t.main_term_total, twisted) < 1e-8);
}

TEST_CASE("conjecture: ell = 1 generic shifts in closed form") {
  // Z_{a;b}(0) = k^{-a} h^{-b} zeta(1+a+b) for a single pair.
  const WeightSpec w = WeightSpec::standard(1000.0);
  const WeightIntegrator integ(w);
  const Complex a{0.03, 0.01};
  const Complex b{-0.07, 0.02};
  const double h = 5.0;
  const double k = 7.0;
  const Complex expected = (std::pow(k, -a) * std::pow(h, -b) * zeta(1.0 + a + b) * integ.moment(0.0) +
                            std::pow(k, b) * std::pow(h, a) * zeta(1.0 - a - b) * integ.moment(a + b)) /
                           std::sqrt(h * k);
  const MomentReport r = conjecture_main_term({{a}, {b}}, nat(5), nat(7), w, QuadSpec{});
  CHECK(r.terms.size() == 2);
  CHECK(rel(r.main_term_total, expected) < 1e-10);
}

TEST_CASE("conjecture: ell = 2 agrees with theorem1") {
  std::mt19937_64 rng(2024);
  const WeightSpec w = WeightSpec::standard(1000.0);
  const std::vector<std::pair<int, int>> twists{{1, 1}, {3, 2}, {2, 9}, {10, 7}, {1, 13}};
  for (int trial = 0; trial < 20; ++trial) {
    const ShiftQuad q = random_quad(rng, 0.14);
    const auto [h, k] = twists[trial % twists.size()];
    const MomentReport a = theorem1_main_term(q, nat(h), nat(k), w, QuadSpec{});
    const MomentReport b = conjecture_main_term(ShiftTuplePair::from_quad(q), nat(h), nat(k), w, QuadSpec{});
    CHECK(b.terms.size() == 6);
    CHECK(rel(b.main_term_total, a.main_term_total) < 1e-9);
    CHECK(b.tail_bound < 1e-9 * std::abs(b.main_term_total));
  }
}

TEST_CASE("conjecture: ell = 3 term count, realness and confluent stability") {
  const WeightSpec w = WeightSpec::standard(1000.0);
  const ShiftTuplePair generic{{0.11, -0.04, 0.07}, {0.09, 0.13, -0.02}};
  const MomentReport r = conjecture_main_term(generic, nat(1), nat(1), w, QuadSpec{});
  CHECK(r.terms.size() == 20);
  CHECK(std::abs(r.main_term_total.imag()) < 1e-10 * std::abs(r.main_term_total));

  const ShiftTuplePair zero{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  // Nine pair sums vanish at once, so the smaller radius cancels more digits.
  MainTermOptions wide;
  wide.confluence.radius = 0.015;
  const Complex a = conjecture_main_term(zero, nat(1), nat(1), w, QuadSpec{}).main_term_total;
  const Complex b = conjecture_main_term(zero, nat(1), nat(1), w, QuadSpec{}, wide).main_term_total;
  CHECK(a.real() > 0.0);
  CHECK(rel(a, b) < 1e-6);
}

TEST_CASE("conjecture: errors") {
  const WeightSpec w = WeightSpec::standard(1000.0);
  const ShiftTuplePair five{{0.1, 0.1, 0.1, 0.1, 0.1}, {0.1, 0.1, 0.1, 0.1, 0.1}};
  CHECK_THROWS_AS((void)conjecture_main_term(five, nat(1), nat(1), w, QuadSpec{}), RangeError);
  CHECK_THROWS_AS((void)conjecture_main_term({{0.1}, {0.1}}, nat(2), nat(4), w, QuadSpec{}), NonCoprimeError);
}

TEST_CASE("moment report json") {
  const WeightSpec w = WeightSpec::standard(1000.0);
  MomentReport r = theorem1_main_term({0.05, -0.03, 0.07, 0.11}, nat(3), nat(2), w, QuadSpec{});
  auto j = r.to_json();
  CHECK(j["terms"].size() == 6);
  CHECK(j["empirical_value"].is_null());
  CHECK(j["metadata"]["h"] == 3);
  CHECK(j["metadata"]["weight"]["T0"] == 125.0);
  CHECK_FALSE(j["metadata"].contains("runtime_s"));
  r.empirical_value = r.main_term_total * 1.1;
  r.update_discrepancy();
  CHECK(*r.rel_discrepancy == doctest::Approx(0.1).epsilon(1e-12));
  j = r.to_json();
  CHECK(j["rel_discrepancy"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.to_json().dump() == r.to_json().dump());
}
