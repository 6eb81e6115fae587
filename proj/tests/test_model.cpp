#include <doctest.h>

#include <cstring>
#include <random>
#include <string>

#include "attrition/errors.hpp"
#include "attrition/model.hpp"
#include "attrition/onesided.hpp"
#include "support/oracles.hpp"

using namespace attrition;

namespace {

std::string failure(const OneSidedGame& g) {
  try {
    validate(g);
  } catch (const InvalidGame& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("overlap and concession rates") {
  const Derived d = derive(oracle::p0());
  CHECK(d.overlap == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(d.concession_rate1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.concession_rate2 == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("thresholds") {
  const Derived d = derive(oracle::p0());
  CHECK(d.challenge_threshold == 0.5);
  CHECK(d.indifference_posterior == doctest::Approx(0.625).epsilon(1e-15));
  REQUIRE(d.decay_floor);
  CHECK(*d.decay_floor == doctest::Approx(1.0 - 2.0 / 0.5));
}

TEST_CASE("no arrivals disables the challenge machinery") {
  OneSidedGame g = oracle::p0();
  g.gamma1 = 0.0;
  const Derived d = derive(g);
  CHECK_FALSE(d.challenges_active);
  CHECK_FALSE(d.decay_floor.has_value());
}

TEST_CASE("switch reputation lies on the curve") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const Derived d = derive(g);
    const onesided::CoevolutionCurve curve(g);
    CHECK(d.switch_reputation > 0.0);
    CHECK(d.switch_reputation <= 1.0);
    CHECK(std::abs(d.switch_reputation - curve.player1_at(d.challenge_threshold)) < 1e-12);
  }
}

TEST_CASE("validation names the violated constraint") {
  OneSidedGame g = oracle::p0();
  g.a2 = 0.3;
  CHECK(failure(g).find("D = a1 + a2 - 1 > 0") != std::string::npos);
  g = oracle::p0();
  g.c1 = 0.1;
  CHECK(failure(g).find("w1 < c1") != std::string::npos);
  g = oracle::p0();
  g.k2 = 0.9;
  CHECK(failure(g).find("k2 < 1 - w1") != std::string::npos);
  g = oracle::p0();
  g.z1 = 0.0;
  CHECK(failure(g).find("z1") != std::string::npos);
  g = oracle::p0();
  g.r2 = -1.0;
  CHECK(failure(g).find("r2 > 0") != std::string::npos);
  g = oracle::p0();
  g.gamma1 = std::nan("");
  CHECK_FALSE(failure(g).empty());
  CHECK(failure(oracle::p0()).empty());
}

TEST_CASE("two-sided derived constants") {
  TwoSidedGame g;
  g.a = {0.6, 0.6};
  g.z = {0.1, 0.1};
  g.r = {1.0, 1.0};
  g.gamma = {1.0, 1.0};
  g.c = {0.5, 0.5};
  g.k = {0.3, 0.3};
  g.w = {0.2, 0.2};
  const TwoSidedDerived d = derive_two_sided(g);
  for (int i = 0; i < 2; ++i) {
    CHECK(d.challenge_threshold[i] == 0.5);
    CHECK(d.indifference_posterior[i] == doctest::Approx(0.625).epsilon(1e-15));
  }
  g.r = {0.5, 0.5};
  g.gamma = {4.0, 4.0};
  const TwoSidedDerived fast = derive_two_sided(g);
  CHECK(fast.concession_rate[0] == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(fast.decay_floor[0]);
  CHECK(*fast.decay_floor[0] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("the embedded game reproduces the one-sided constants") {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 50; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const Derived d = derive(g);
    const TwoSidedDerived t = derive_two_sided(embed(g));
    CHECK(t.overlap == d.overlap);
    CHECK(t.concession_rate[0] == d.concession_rate1);
    CHECK(t.concession_rate[1] == d.concession_rate2);
    CHECK(t.challenge_threshold[1] == d.challenge_threshold);
    CHECK(t.indifference_posterior[0] == d.indifference_posterior);
    CHECK_FALSE(t.decay_floor[1].has_value());
  }
}

TEST_CASE("common time rescaling leaves the thresholds unchanged") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const double s = oracle::uniform(rng, 0.1, 10.0);
    OneSidedGame h = g;
    h.r1 *= s;
    h.r2 *= s;
    h.gamma1 *= s;
    const Derived a = derive(g), b = derive(h);
    CHECK(b.concession_rate1 == doctest::Approx(s * a.concession_rate1).epsilon(1e-13));
    CHECK(b.concession_rate2 == doctest::Approx(s * a.concession_rate2).epsilon(1e-13));
    CHECK(b.challenge_threshold == a.challenge_threshold);
    CHECK(b.indifference_posterior == a.indifference_posterior);
    CHECK(*b.decay_floor == doctest::Approx(*a.decay_floor).epsilon(1e-12));
    CHECK(b.switch_reputation == doctest::Approx(a.switch_reputation).epsilon(1e-12));
  }
}

TEST_CASE("derive is pure") {
  std::mt19937_64 rng(6);
  const OneSidedGame g = oracle::random_game(rng);
  const Derived a = derive(g), b = derive(g);
  CHECK(std::memcmp(&a.overlap, &b.overlap, sizeof(double)) == 0);
  CHECK(a.switch_reputation == b.switch_reputation);
  CHECK(*a.decay_floor == *b.decay_floor);
}

TEST_CASE("multi-demand validation") {
  MultiDemandGame g;
  g.demands1 = {0.5, 0.7};
  g.demands2 = {0.4, 0.6};
  g.prior1 = {0.5, 0.5};
  g.prior2 = {0.5, 0.5};
  g.z1 = g.z2 = 0.1;
  g.r1 = g.r2 = 1.0;
  g.gamma1 = 1.0;
  g.c1 = 0.5;
  g.k2 = 0.3;
  g.w1 = 0.2;
  CHECK_NOTHROW(validate(g));
  MultiDemandGame bad = g;
  bad.prior1 = {0.5, 0.4};
  CHECK_THROWS_AS(validate(bad), InvalidGame);
  bad = g;
  bad.demands1 = {0.7, 0.5};
  CHECK_THROWS_AS(validate(bad), InvalidGame);
  bad = g;
  bad.demands1 = {0.2, 0.3};
  bad.demands2 = {0.2, 0.6};
  CHECK_THROWS_AS(validate(bad), InvalidGame);
  bad = g;
  bad.prior2 = {1.0, 0.0};
  CHECK_THROWS_AS(validate(bad), InvalidGame);
}
