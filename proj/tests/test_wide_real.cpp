#include <doctest.h>

#include <cmath>
#include <random>

#include "heavymin/wide_real.hpp"

using heavymin::WideReal;

TEST_CASE("canonical tiers and ordering") {
  WideReal a = WideReal::from_double(42.0);
  CHECK(a.height() == 0);
  CHECK(a.as_double() == 42.0);

  WideReal b = WideReal::from_log(800.0);  // beyond 1e300
  CHECK(b.height() == 1);
  CHECK(b.log_as_double() == 800.0);
  CHECK(std::isinf(b.as_double()));

  WideReal c = WideReal::from_log(1.0);  // e^1 demotes to plain double
  CHECK(c.height() == 0);
  CHECK(c.as_double() == doctest::Approx(std::exp(1.0)));

  WideReal d = WideReal::from_loglog(800.0);
  CHECK(d.height() == 2);
  CHECK(d.loglog_as_double() == 800.0);

  WideReal e = WideReal::from_tower(7, 750.0);
  CHECK(e.height() == 7);

  CHECK(a < b);
  CHECK(b < d);
  CHECK(d < e);
  CHECK(e < WideReal::infinity());
  CHECK(WideReal::neg_infinity() < WideReal::zero());
  CHECK(WideReal::zero() < a);
}

TEST_CASE("exp and log move between levels without loss") {
  WideReal x = WideReal::from_log(5000.0);
  WideReal lx = log_of(x);
  CHECK(lx.height() == 0);
  CHECK(lx.as_double() == 5000.0);
  CHECK(exp_of(lx) == x);

  // a tall tower survives many round trips exactly
  WideReal t = WideReal::from_tower(20, 1234.5);
  WideReal u = t;
  for (int i = 0; i < 15; ++i) u = log_of(u);
  for (int i = 0; i < 15; ++i) u = exp_of(u);
  CHECK(u == t);

  CHECK(exp_of(WideReal::neg_infinity()).is_zero());
  CHECK(log_of(WideReal::zero()).is_neg_infinity());
}

TEST_CASE("addition across levels") {
  WideReal one = WideReal::one();
  CHECK((WideReal::from_double(2.0) + WideReal::from_double(3.0)).as_double() ==
        5.0);

  // promotion at the cap
  WideReal big = WideReal::from_double(8e299);
  WideReal sum = big + big;
  CHECK(sum.height() == 1);
  CHECK(sum.log_as_double() == doctest::Approx(std::log(1.6e300)));

  // level-1 addition matches logaddexp
  WideReal p = WideReal::from_log(700.0), q = WideReal::from_log(702.0);
  CHECK((p + q).log_as_double() ==
        doctest::Approx(702.0 + std::log1p(std::exp(-2.0))));

  // dominated terms vanish against higher levels
  WideReal tower = WideReal::from_tower(5, 1000.0);
  CHECK(tower + one == tower);
  CHECK(tower + WideReal::from_log(9e299) == tower);

  // negative low-level terms vanish too
  CHECK(WideReal::from_log(800.0) + WideReal::from_double(-3.0) ==
        WideReal::from_log(800.0));
}

TEST_CASE("sub_clamped") {
  WideReal a = WideReal::from_double(10.0), b = WideReal::from_double(4.0);
  CHECK(sub_clamped(a, b).as_double() == 6.0);
  CHECK(sub_clamped(b, a).is_zero());
  CHECK(sub_clamped(a, a).is_zero());

  // huge minus comparable demotes cleanly
  WideReal p = WideReal::from_log(900.0);
  WideReal q = WideReal::from_log(900.0 - std::log(2.0));  // p/2
  WideReal d = sub_clamped(p, q);
  CHECK(d.log_as_double() ==
        doctest::Approx(900.0 - std::log(2.0)).epsilon(1e-12));

  // subtracting a negative adds
  CHECK(sub_clamped(a, WideReal::from_double(-4.0)).as_double() == 14.0);

  // negligible subtrahend leaves the representation untouched: this is the
  // bit-identity the pair construction relies on
  WideReal r = WideReal::from_log(5e8);
  CHECK(sub_clamped(r, WideReal::from_double(7.0)) == r);
}

TEST_CASE("scaling and powers") {
  CHECK(WideReal::from_double(3.0).scaled(2.0).as_double() == 6.0);
  CHECK(WideReal::from_log(1000.0).scaled(2.0).log_as_double() ==
        doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(WideReal::from_double(9.0).powed(0.5).as_double() ==
        doctest::Approx(3.0));
  // power promotes through the cap
  WideReal x = WideReal::from_double(1e200).powed(3.0);
  CHECK(x.height() == 1);
  CHECK(x.log_as_double() == doctest::Approx(3.0 * std::log(1e200)));
  // tower powers act on the level below
  WideReal t = WideReal::from_tower(3, 1000.0);
  CHECK(t.powed(2.0) >= t);
}

TEST_CASE("ordering is total and consistent with magnitudes") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> logs(1.0, 600.0);
  std::vector<WideReal> vals;
  for (int i = 0; i < 200; ++i) {
    double r = logs(eng);
    vals.push_back(WideReal::from_double(r));
    vals.push_back(WideReal::from_log(r * 3.0));
  }
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const WideReal& a = vals[i - 1];
    const WideReal& b = vals[i];
    CHECK(((a < b) || (b < a) || (a == b)));
    if (a.fits_double() && b.fits_double())
      CHECK((a < b) == (a.as_double() < b.as_double()));
  }
}
