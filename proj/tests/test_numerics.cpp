#include <doctest.h>

#include <cmath>

#include "vna/dyadic.hpp"
#include "vna/errors.hpp"
#include "vna/interval.hpp"

using namespace vna;

TEST_CASE("dyadic canonical form and arithmetic") {
  Dyadic a(BigInt(6), 3);  // 6/8 = 3/4
  CHECK(a.mantissa() == 3);
  CHECK(a.exponent() == 2);
  CHECK(a == Dyadic(BigInt(3), 2));

  Dyadic z(BigInt(0), 7);
  CHECK(z.is_zero());
  CHECK(z.exponent() == 0);

  // exact closure under +, -, *, max, min
  Dyadic x(BigInt(13), 4), y(BigInt(-3), 1);
  CHECK((x + y).to_double() == 13.0 / 16 - 1.5);
  CHECK((x * y) == Dyadic(BigInt(-39), 5));
  CHECK(Dyadic::max(x, y) == x);
  CHECK(Dyadic::min(x, y) == y);
  CHECK((x - x).is_zero());

  // even mantissa with zero exponent stays as is (value 4)
  Dyadic four(4);
  CHECK(four.mantissa() == 4);
  CHECK(four.exponent() == 0);
}

TEST_CASE("monus") {
  CHECK(monus(Dyadic(3), Dyadic(1)) == Dyadic(2));
  CHECK(monus(Dyadic(1), Dyadic(3)) == Dyadic(0));
  Dyadic half(BigInt(1), 1);
  CHECK(monus(half, half).is_zero());
  CHECK(monus(3.0, 1.0) == 2.0);
  CHECK(monus(1.0, 3.0) == 0.0);

  // monus(x,y) = x-y when x>=y, else 0, on a dyadic grid
  for (int i = -8; i <= 8; ++i) {
    for (int j = -8; j <= 8; ++j) {
      Dyadic x(BigInt(i), 2), y(BigInt(j), 2);
      Dyadic m = monus(x, y);
      if (x >= y) {
        CHECK(m == x - y);
      } else {
        CHECK(m.is_zero());
      }
    }
  }
}

TEST_CASE("dyadic text form round-trips") {
  for (long long m : {0LL, 1LL, -1LL, 13LL, -1024LL, 999983LL}) {
    for (unsigned e : {0u, 1u, 4u, 17u}) {
      Dyadic d(BigInt(m), e);
      auto back = try_parse_dyadic(d.str());
      REQUIRE(back.has_value());
      CHECK(*back == d);
    }
  }
  CHECK(*try_parse_dyadic("13/2^4") == Dyadic(BigInt(13), 4));
  CHECK(*try_parse_dyadic("7") == Dyadic(7));
  CHECK(!try_parse_dyadic("1/3").has_value());
  CHECK(!try_parse_dyadic("2^4").has_value());
  CHECK(!try_parse_dyadic("1/2^").has_value());
}

TEST_CASE("from_double is exact") {
  for (double v : {0.5, -0.75, 0.3, 1e-12, 123456.789, -0.0, 1.0}) {
    Dyadic d = Dyadic::from_double(v);
    CHECK(d.to_double() == v);
  }
}

TEST_CASE("interval hull") {
  SUBCASE("singleton at an exact dyadic") {
    double v = 0.5;
    DyadicInterval iv = interval_hull(std::span(&v, 1), Dyadic(0));
    CHECK(iv.lo() == Dyadic(BigInt(1), 1));
    CHECK(iv.hi() == Dyadic(BigInt(1), 1));
    CHECK(iv.width().is_zero());
  }
  SUBCASE("slack widening is exact") {
    double vals[] = {0.0, 1.0};
    Dyadic quarter(BigInt(1), 2);
    DyadicInterval iv = interval_hull(vals, quarter);
    CHECK(iv.lo() == -quarter);
    CHECK(iv.hi() == Dyadic(1) + quarter);
  }
  SUBCASE("tightest dyadic cover of 0.3 at precision p") {
    // oracle: the binary expansion of 3/10 truncated at p bits is
    // floor(3 * 2^p / 10) / 2^p; the cover's upper end is one ulp above
    for (unsigned p : {8u, 20u, 30u}) {
      double v = 0.3;
      DyadicInterval iv = interval_hull(std::span(&v, 1), Dyadic(0), p);
      BigInt floor_bits = (BigInt(3) << p) / 10;
      CHECK(iv.lo() == Dyadic(floor_bits, p));
      CHECK(iv.hi() == Dyadic(floor_bits + 1, p));
      CHECK(iv.width() == Dyadic(BigInt(1), p));
      CHECK(iv.contains(v));
    }
  }
  SUBCASE("containment of every input") {
    double vals[] = {-0.125, 0.7, 0.33333, 0.25};
    DyadicInterval iv = interval_hull(vals, Dyadic(0));
    for (double v : vals) CHECK(iv.contains(v));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(interval_hull({}, Dyadic(0)), PreconditionError);
  }
}

TEST_CASE("dyadic sqrt bounds") {
  for (long long m : {0LL, 1LL, 2LL, 9LL, 1000LL}) {
    for (unsigned e : {0u, 3u}) {
      Dyadic x(BigInt(m), e);
      Dyadic lo = sqrt_lower(x, 30), hi = sqrt_upper(x, 30);
      double s = std::sqrt(x.to_double());
      CHECK(lo.to_double() <= s + 1e-12);
      CHECK(hi.to_double() >= s - 1e-12);
      CHECK(hi - lo <= Dyadic(BigInt(1), 30) + Dyadic(BigInt(1), 30));
    }
  }
  CHECK(sqrt_lower(Dyadic(4), 20) == Dyadic(2));
  CHECK(sqrt_upper(Dyadic(4), 20) == Dyadic(2));
}

TEST_CASE("interval arithmetic on dyadic endpoints") {
  DyadicInterval a(Dyadic(-1), Dyadic(2));
  DyadicInterval b(Dyadic(1), Dyadic(3));
  CHECK(iv_add(a, b) == DyadicInterval(Dyadic(0), Dyadic(5)));
  CHECK(iv_monus(a, b) == DyadicInterval(Dyadic(0), Dyadic(1)));
  CHECK(iv_max(a, b) == DyadicInterval(Dyadic(1), Dyadic(3)));
  CHECK(iv_min(a, b) == DyadicInterval(Dyadic(-1), Dyadic(2)));
  CHECK(iv_abs(a) == DyadicInterval(Dyadic(0), Dyadic(2)));
  CHECK(iv_neg(a) == DyadicInterval(Dyadic(-2), Dyadic(1)));
  CHECK(iv_scale(Dyadic(BigInt(-1), 1), b) ==
        DyadicInterval(Dyadic(BigInt(-3), 1), Dyadic(BigInt(-1), 1)));
  CHECK_THROWS_AS(DyadicInterval(Dyadic(1), Dyadic(0)), PreconditionError);
}
