#include <doctest.h>

#include <cmath>
#include <random>

#include "attrition/analysis.hpp"
#include "attrition/errors.hpp"
#include "attrition/onesided.hpp"
#include "support/oracles.hpp"

using namespace attrition;
using namespace attrition::analysis;

namespace {

OneSidedGame scaled_priors(OneSidedGame g, int n) {
  g.z1 = g.z2 = std::ldexp(1.0, -n);
  return g;
}

// One game per rate ordering.
OneSidedGame fast_ultimatum() {
  OneSidedGame g = oracle::p0();
  g.gamma1 = 3.0;
  return g;
}

OneSidedGame player1_faster() {
  OneSidedGame g = oracle::p0();
  g.r2 = 3.0;
  return g;
}

}  // namespace

TEST_CASE("limit payoffs of the reference game") {
  const LimitPayoffs lim = limit_payoffs_single(oracle::p0());
  CHECK(lim.winner == 2);
  CHECK(lim.generic);
  CHECK(lim.efficient);
  CHECK(*lim.u1 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(*lim.u2 == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("limit payoffs by rate ordering") {
  const LimitPayoffs fast = limit_payoffs_single(fast_ultimatum());
  CHECK(fast.winner == 2);
  CHECK(fast.case_label == "fast_ultimatum");
  const LimitPayoffs one = limit_payoffs_single(player1_faster());
  CHECK(one.winner == 1);
  CHECK(*one.u1 == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(*one.u2 == doctest::Approx(0.4).epsilon(1e-15));
  OneSidedGame edge = oracle::p0();
  edge.r2 = 1.25;  // lambda1 = 2.5 = gamma1 + lambda2
  const LimitPayoffs knife = limit_payoffs_single(edge);
  CHECK_FALSE(knife.generic);
  CHECK(knife.winner == 0);
  CHECK_FALSE(knife.u1.has_value());
}

TEST_CASE("without arrivals the player whose reputation grows faster wins") {
  OneSidedGame g = oracle::p0();
  g.gamma1 = 0.0;
  g.r2 = 0.5;  // lambda1 = 1 < lambda2 = 2
  CHECK(limit_payoffs_single(g).winner == 2);
  g.r2 = 2.0;
  CHECK(limit_payoffs_single(g).winner == 1);
}

TEST_CASE("vanishing priors approach the limit payoffs") {
  for (const OneSidedGame& g : {fast_ultimatum(), oracle::p0(), player1_faster()}) {
    const LimitPayoffs lim = limit_payoffs_single(g);
    const auto eq = onesided::solve(scaled_priors(g, 20));
    CHECK(std::abs(eq.payoff1() - *lim.u1) < 0.02);
    CHECK(std::abs(eq.payoff2() - *lim.u2) < 0.02);
  }
}

TEST_CASE("frequent ultimatums hand player 2 its demand") {
  double prev = 0.0;
  for (double gamma : {10.0, 100.0, 1000.0}) {
    OneSidedGame g = oracle::p0();
    g.gamma1 = gamma;
    const auto eq = onesided::solve(g);
    const double gap = std::abs(eq.payoff1() - (1 - g.a2));
    if (prev > 0.0) CHECK(gap <= prev + 1e-12);
    prev = gap;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("benefit region crossings are roots") {
  std::mt19937_64 rng(31);
  int found = 0;
  for (int n = 0; n < 300 && found < 20; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const BenefitRegion region = who_benefits(g);
    if (!region.condition_holds) {
      CHECK_THROWS_AS(region.bounds(), NoBenefitRegion);
      continue;
    }
    ++found;
    const auto [lo, hi] = region.bounds();
    CHECK(0.0 < lo);
    CHECK(lo < hi);
    CHECK(hi < 1.0);
    CHECK(lo <= region.target);
    CHECK(region.target <= hi);
    OneSidedGame quiet = g;
    quiet.gamma1 = 0.0;
    const onesided::CoevolutionCurve without(quiet);
    for (double root : {lo, hi}) {
      if (root == lo && region.lower_unresolved) continue;
      CHECK(std::abs(region.curve->player2_at(root) - without.player2_at(root)) < 1e-10);
    }
  }
  CHECK(found >= 5);
}

TEST_CASE("sign expression agrees with the time comparison") {
  std::mt19937_64 rng(32);
  int agree = 0;
  for (int n = 0; n < 100; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const BenefitRegion region = who_benefits(g);
    const bool faster = region.time_with < region.time_without;
    agree += faster == (target_sign_expression(g) > 0.0);
  }
  CHECK(agree == 100);
}

TEST_CASE("who benefits matches brute force") {
  std::mt19937_64 rng(33);
  int benefits = 0;
  for (int n = 0; n < 100; ++n) {
    OneSidedGame g = oracle::random_game(rng);
    const BenefitRegion region = who_benefits(g);
    // Aim half the priors at the region so both outcomes occur.
    if (region.condition_holds && n % 2 == 0) {
      g.z1 = oracle::uniform(rng, region.mu1_lower, region.mu1_upper);
      g.z2 = oracle::uniform(rng, 0.0, 1.0) * region.curve->player2_at(g.z1);
      if (!(g.z2 > 0.0)) g.z2 = 1e-6;
    }
    OneSidedGame quiet = g;
    quiet.gamma1 = 0.0;
    const double gain = onesided::solve(g).payoff1() - onesided::solve(quiet).payoff1();
    const bool predicted = region.benefits(g.z1, g.z2);
    benefits += predicted;
    CHECK(predicted == (gain > 0.0));
  }
  CHECK(benefits > 5);
}

TEST_CASE("above the switch reputation player 1 never gains") {
  std::mt19937_64 rng(34);
  for (int n = 0; n < 50; ++n) {
    OneSidedGame g = oracle::random_game(rng);
    const Derived d = derive(g);
    g.z1 = std::min(0.99, d.switch_reputation + 0.5 * (1 - d.switch_reputation));
    CHECK_FALSE(who_benefits(g).benefits(g.z1, g.z2));
    OneSidedGame quiet = g;
    quiet.gamma1 = 0.0;
    CHECK(onesided::solve(g).payoff1() <= onesided::solve(quiet).payoff1() + 1e-12);
  }
}

TEST_CASE("who benefits needs arrivals") {
  OneSidedGame g = oracle::p0();
  g.gamma1 = 0.0;
  CHECK_THROWS_AS(who_benefits(g), InvalidGame);
}

TEST_CASE("comparative statics predictions hold") {
  std::mt19937_64 rng(35);
  const char* params[] = {"z1", "z2", "r1", "r2", "c1", "k2", "w1"};
  int checked = 0, flat = 0;
  for (int n = 0; n < 200; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const std::string param = params[n % 7];
    const double delta = (n % 2 ? 1e-3 : -1e-3) * std::max(0.05, get_param(g, param));
    try {
      validate(with_param(g, param, get_param(g, param) + delta));
    } catch (const InvalidGame&) {
      continue;
    }
    const MonotonicityReport rep = comp_statics_check(g, param, delta);
    if (!rep.same_region) continue;
    ++checked;
    flat += rep.predicted1 == 0 && rep.predicted2 == 0;
    CHECK_MESSAGE(rep.holds(), param << " du1=" << rep.du1 << " du2=" << rep.du2);
  }
  CHECK(checked > 150);
  CHECK(flat > 10);
}

TEST_CASE("challenge costs move payoffs only inside the window") {
  OneSidedGame g = oracle::p0();
  const MonotonicityReport rep = comp_statics_check(g, "c1", 0.01);
  // In the reference game player 1 concedes, so nothing moves.
  CHECK(rep.predicted1 == 0);
  CHECK(std::abs(rep.du1) < kFlatTolerance);
  g.z1 = 0.5;  // between the curve value and the switch reputation
  const onesided::CoevolutionCurve curve(g);
  REQUIRE(g.z1 > curve.player1_at(g.z2));
  REQUIRE(g.z1 < curve.switch_reputation());
  const MonotonicityReport inside = comp_statics_check(g, "c1", 0.01);
  CHECK(inside.predicted1 == -1);
  CHECK(inside.du1 < 0.0);
}

TEST_CASE("raising the own prior in the window helps") {
  OneSidedGame g = oracle::p0();
  g.z1 = 0.5;
  const MonotonicityReport rep = comp_statics_check(g, "z1", 1e-3);
  CHECK(rep.predicted1 == 1);
  CHECK(rep.du1 > 0.0);
}

TEST_CASE("unknown parameters are rejected") {
  CHECK_THROWS_AS(get_param(oracle::p0(), "beta"), InvalidGame);
  CHECK_THROWS_AS(comp_statics_check(oracle::p0(), "a1", 0.01), InvalidGame);
}

TEST_CASE("gamma sensitivity regions") {
  OneSidedGame g = oracle::p0();  // player 1 concedes at zero
  const SignReport flat = gamma_sensitivity(g);
  CHECK(flat.region == "constant");
  CHECK(std::abs(flat.finite_difference) < 1e-5);
  g.z1 = 0.9;
  const SignReport down = gamma_sensitivity(g);
  CHECK(down.region == "decreasing");
  CHECK(down.finite_difference < 0.0);
  g.gamma1 = 2.0;  // equals lambda1
  CHECK_THROWS_AS(gamma_sensitivity(g), InvalidGame);
}

TEST_CASE("gamma sensitivity sign matches finite differences in the window") {
  std::mt19937_64 rng(36);
  int window = 0;
  for (int n = 0; n < 2000 && window < 200; ++n) {
    OneSidedGame g = oracle::random_game(rng);
    const onesided::CoevolutionCurve curve(g);
    const double lo = curve.player1_at(g.z2), hi = curve.switch_reputation();
    if (!(hi - lo > 1e-3)) continue;
    g.z1 = oracle::uniform(rng, lo, hi);
    const SignReport rep = gamma_sensitivity(g);
    if (rep.region != "window" || !rep.same_region || std::abs(rep.finite_difference) < 1e-6) continue;
    ++window;
    CHECK(rep.agrees);
  }
  CHECK(window >= 100);
}

TEST_CASE("sweep keeps order and reports failures per row") {
  const std::vector<double> values = {0.05, 0.1, 0.2, 0.95};
  const std::vector<SweepRow> rows = sweep(oracle::p0(), "z1", values);
  REQUIRE(rows.size() == values.size());
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(rows[n].value == values[n]);
    CHECK(rows[n].error.empty());
    CHECK(rows[n].u1 == doctest::Approx(onesided::solve(with_param(oracle::p0(), "z1", values[n])).payoff1()));
  }
  const std::vector<SweepRow> bad = sweep(oracle::p0(), "z1", {1.5});
  CHECK_FALSE(bad[0].error.empty());
}

TEST_CASE("gamma sweeps converge to the arrival-free payoffs") {
  OneSidedGame quiet = oracle::p0();
  quiet.gamma1 = 0.0;
  const auto base = onesided::solve(quiet);
  const std::vector<SweepRow> rows = sweep(oracle::p0(), "gamma1", {1e-3, 1e-4, 1e-5});
  for (const SweepRow& row : rows) {
    CHECK(std::abs(row.u1 - base.payoff1()) < 1e-3);
    CHECK(std::abs(row.u2 - base.payoff2()) < 1e-3);
  }
}
