#include <doctest.h>

#include "cantor/dyadic.hpp"

using cantor::Dyadic;

TEST_CASE("dyadic ordering: zero smallest, larger exponent smaller value") {
  CHECK(Dyadic::zero() < Dyadic::pow2(10));
  CHECK(Dyadic::pow2(3) < Dyadic::pow2(2));
  CHECK(Dyadic::pow2(2) < Dyadic::one());
  CHECK(Dyadic::one() < Dyadic::pow2(-1));
  CHECK(Dyadic::pow2(5) == Dyadic::pow2(5));
  CHECK(Dyadic::zero() == Dyadic::zero());
  CHECK_FALSE(Dyadic::zero() < Dyadic::zero());
}

TEST_CASE("dyadic halving and doubling act on exponents") {
  CHECK(Dyadic::pow2(3).half() == Dyadic::pow2(4));
  CHECK(Dyadic::pow2(3).twice() == Dyadic::pow2(2));
  CHECK(Dyadic::zero().half() == Dyadic::zero());
  CHECK(Dyadic::zero().twice() == Dyadic::zero());
}

TEST_CASE("max_of is the ultrametric bound, sum_upper the lossy one") {
  CHECK(Dyadic::max_of(Dyadic::pow2(3), Dyadic::pow2(5)) == Dyadic::pow2(3));
  CHECK(Dyadic::max_of(Dyadic::zero(), Dyadic::pow2(5)) == Dyadic::pow2(5));
  // 2^-3 + 2^-5 <= 2^-2, and no smaller dyadic bounds it
  CHECK(Dyadic::sum_upper(Dyadic::pow2(3), Dyadic::pow2(5)) == Dyadic::pow2(2));
  CHECK(Dyadic::sum_upper(Dyadic::zero(), Dyadic::pow2(5)) == Dyadic::pow2(5));
  CHECK(Dyadic::sum_upper(Dyadic::pow2(4), Dyadic::pow2(4)) == Dyadic::pow2(3));
}

TEST_CASE("string round trips") {
  CHECK(Dyadic::zero().str() == "0");
  CHECK(Dyadic::one().str() == "1");
  CHECK(Dyadic::pow2(6).str() == "2^-6");
  CHECK(Dyadic::parse("2^-6") == Dyadic::pow2(6));
  CHECK(Dyadic::parse("0") == Dyadic::zero());
  CHECK(Dyadic::parse("1") == Dyadic::one());
  CHECK_FALSE(Dyadic::parse("x").has_value());
  CHECK_FALSE(Dyadic::parse("2^-").has_value());
  CHECK(Dyadic::pow2(4).approx() == doctest::Approx(0.0625));
}
