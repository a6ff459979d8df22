#include <doctest.h>

#include <cmath>
#include <vector>

#include "heavymin/construct.hpp"
#include "heavymin/risk.hpp"

using namespace heavymin;

namespace {

// Test-side oracle: inf{x : R(x) >= r} by doubling plus bisection,
// independent of the library's segment-walking inverse.
double bisect_inverse(const RiskFunction& r, double level) {
  double lo = -1.0, hi = 1.0;
  while (r.eval(hi) < level) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (r.eval(mid) >= level ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

TEST_CASE("risk_from_tail on parametric targets") {
  RiskFunction r = risk_from_tail(TargetDistribution::exponential(1.0));
  CHECK(r.eval(2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.eval(-5.0) == 0.0);
  RiskFunction p = risk_from_tail(TargetDistribution::polynomial(3.0));
  CHECK(p.eval(1.0) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("risk_from_tail on tabulated tails validates the domain") {
  RiskFunction r = risk_from_tail({0.0, 1.0, 2.0}, {1.0, 0.5, 0.1});
  CHECK(r.eval(1.0) == doctest::Approx(-std::log(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(risk_from_tail({0.0, 1.0}, {1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(risk_from_tail({0.0, 1.0}, {1.2, 0.5}), std::domain_error);
}

TEST_CASE("tail_from_risk inverts and flags underflow") {
  TargetDistribution e2 = TargetDistribution::exponential(2.0);
  RiskFunction r = risk_from_tail(e2);
  CHECK(tail_from_risk(r, 1.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  CHECK(tail_from_risk(r, -3.0) == 1.0);

  // round trip across ten decades
  for (double x = 1e-6; x < 1e4; x *= 10.0) {
    double t = e2.tail(x);
    if (t == 0.0) break;
    CHECK(tail_from_risk(r, x) == doctest::Approx(t).epsilon(1e-12));
  }

  bool underflow = false;
  CHECK(tail_from_risk(r, 400.0, &underflow) == 0.0);
  CHECK(underflow);
}

TEST_CASE("sum of risks is the risk of the minimum") {
  RiskFunction sum =
      sum_risks({risk_from_tail(TargetDistribution::exponential(1.0)),
                 risk_from_tail(TargetDistribution::exponential(2.0))});
  RiskFunction e3 = risk_from_tail(TargetDistribution::exponential(3.0));
  for (double x = 0.01; x < 100.0; x *= 1.9)
    CHECK(sum.eval(x) == doctest::Approx(e3.eval(x)).epsilon(1e-13));

  CHECK_THROWS_AS(sum_risks({}), std::invalid_argument);
  CHECK_THROWS_AS(RiskFunction::scaled_target(
                      TargetDistribution::exponential(1.0), 0.0),
                  std::domain_error);
}

TEST_CASE("quantile basics") {
  RiskFunction r = risk_from_tail(TargetDistribution::exponential(1.0));
  CHECK(quantile_from_risk(r, 0.5) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(quantile_from_risk(r, 1e-14) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(quantile_from_risk(r, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile_from_risk(r, 1.0), std::invalid_argument);
}

TEST_CASE("piecewise risks: evaluation, monotonicity, right-continuity") {
  HeavyFamily fam = construct_pair(TargetDistribution::exponential(1.0),
                                   GrowthFunction::identity_plus(),
                                   Policy::kExactMinimal, {10, 0.0});
  const RiskFunction& r1 = fam.risks[0];
  const RiskFunction& r2 = fam.risks[1];

  // monotone on a grid, and the pair sums exactly to the target
  double prev1 = -1.0, prev2 = -1.0;
  for (double x = 1e-6; x < 1e6; x *= 1.3) {
    double v1 = r1.eval(x), v2 = r2.eval(x);
    CHECK(v1 >= prev1);
    CHECK(v2 >= prev2);
    CHECK(v1 + v2 ==
          doctest::Approx(fam.target.risk(x)).epsilon(1e-12));
    prev1 = v1;
    prev2 = v2;
  }

  // right-continuity at the first few breakpoints
  const auto& bps = fam.plan->breakpoints();
  for (std::size_t l = 1; l < 4; ++l) {
    double a = bps[l].as_double();
    double at = r1.eval(a);
    double just_after = r1.eval(a * (1.0 + 1e-12) + 1e-12);
    CHECK(just_after - at >= 0.0);
    CHECK(just_after - at <= 1e-9 * (1.0 + at));
  }

  // evaluation beyond the horizon is an explicit error
  CHECK_THROWS_AS(
      r1.eval(bps.back().as_double() * 2.0), std::out_of_range);
}

TEST_CASE("piecewise quantiles: flat segments resolve to the left endpoint") {
  HeavyFamily fam = construct_pair(TargetDistribution::exponential(1.0),
                                   GrowthFunction::identity_plus(),
                                   Policy::kExactMinimal, {8, 0.0});
  const RiskFunction& r1 = fam.risks[0];
  const auto& bps = fam.plan->breakpoints();
  const auto& core = *r1.piecewise_core();

  // component 1 is frozen on (a_2, a_3]; the value it holds there
  REQUIRE(core.segments[2].flat);
  double flat_value = core.values[3].as_double();
  double a2 = bps[2].as_double();
  double a3 = bps[3].as_double();

  // the exact flat level maps to the left endpoint of the flat stretch
  CHECK(r1.inverse(flat_value) == a2);
  // and agrees with the brute-force generalized inverse
  CHECK(bisect_inverse(r1, flat_value) == doctest::Approx(a2).epsilon(1e-12));

  // levels just above the flat value land past the frozen interval
  double above = flat_value * (1.0 + 1e-9) + 1e-12;
  CHECK(r1.inverse(above) > a3);
  CHECK(bisect_inverse(r1, above) > a3);

  // the corresponding u maps to a2 up to one quantile ulp
  double u = -std::expm1(-flat_value);
  CHECK(quantile_from_risk(r1, u) == doctest::Approx(a2).epsilon(1e-12));

  // Galois: quantile(u) <= x  <=>  R(x) >= -log(1-u)
  for (double u2 : {0.1, 0.63, 0.95, 0.999}) {
    double q = quantile_from_risk(r1, u2);
    double level = -std::log1p(-u2);
    for (double x : {q * 0.9, q, q * 1.1, q * 3.0}) {
      if (x <= 0) continue;
      CHECK((q <= x) == (r1.eval(x) >= level ||
                         r1.eval(x) == doctest::Approx(level).epsilon(1e-12)));
    }
  }

  // a risk level beyond the horizon names the requirement
  CHECK_THROWS_AS(r1.inverse(1e280), std::out_of_range);
}

TEST_CASE("quantile of a sum via bisection") {
  RiskFunction sum =
      sum_risks({risk_from_tail(TargetDistribution::exponential(1.0)),
                 risk_from_tail(TargetDistribution::weibull(0.5))});
  double q = quantile_from_risk(sum, 0.75);
  CHECK(sum.eval(q) == doctest::Approx(-std::log(0.25)).epsilon(1e-9));
}
