#include <doctest.h>

#include <cmath>
#include <random>

#include "attrition/deviation.hpp"
#include "attrition/errors.hpp"
#include "attrition/onesided.hpp"
#include "support/oracles.hpp"

using namespace attrition;

namespace {

// Player 1's reputation when player 2's is mu2, by integrating both
// reputations backward from (1,1) with Runge-Kutta.
double curve_by_integration(const OneSidedGame& g, double mu2) {
  const Derived d = derive(g);
  const double lam1 = d.concession_rate1, lam2 = d.concession_rate2;
  const double nu = d.indifference_posterior;
  const double s_target = -std::log(mu2) / lam2;
  const double s_switch = -std::log(d.challenge_threshold) / lam2;
  // Backward in time the drift flips sign.
  const double quiet = oracle::rk4(-(lam1 - g.gamma1), -g.gamma1, 1.0, std::min(s_target, s_switch));
  if (s_target <= s_switch) return quiet;
  return oracle::rk4(-(lam1 - g.gamma1), -g.gamma1 / nu, quiet, s_target - s_switch);
}

std::vector<double> interior_grid(double end, int n) {
  std::vector<double> ts;
  for (int k = 1; k < n; ++k) ts.push_back(end * k / n);
  return ts;
}

}  // namespace

TEST_CASE("curve ends at (1,1)") {
  const onesided::CoevolutionCurve curve(oracle::p0());
  CHECK(curve.player1_at(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(curve.player2_at(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("switch reputation of the reference game") {
  const onesided::CoevolutionCurve curve(oracle::p0());
  const double expected = 1.5 / (2.0 * std::pow(0.5, -0.75) - 0.5);
  CHECK(curve.player1_at(0.5) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(curve.switch_reputation() == doctest::Approx(0.523819).epsilon(1e-6));
}

TEST_CASE("without arrivals the curve is a power law") {
  OneSidedGame g = oracle::p0();
  g.gamma1 = 0.0;
  g.r1 = 0.7;
  g.a2 = 0.55;
  const Derived d = derive(g);
  const onesided::CoevolutionCurve curve(g);
  double worst = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double mu2 = k / 1000.0;
    worst = std::max(worst, std::abs(curve.player1_at(mu2) - std::pow(mu2, d.concession_rate1 / d.concession_rate2)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("curve agrees with direct integration on random games") {
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int n = 0; n < 40; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const onesided::CoevolutionCurve curve(g);
    for (double mu2 : {0.9, 0.6, 0.35, 0.15, 0.05}) {
      const double oracle_value = curve_by_integration(g, mu2);
      if (!(oracle_value > 1e-6)) continue;
      worst = std::max(worst, std::abs(curve.player1_at(mu2) - oracle_value));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("curve maps are monotone inverses") {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 30; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const onesided::CoevolutionCurve curve(g);
    double prev = 0.0;
    for (int k = 1; k <= 200; ++k) {
      const double mu2 = k / 200.0;
      const double mu1 = curve.player1_at(mu2);
      // Near the asymptote neighbouring values agree to double precision.
      if (mu1 - curve.asymptote() > 1e-9) {
        CHECK(mu1 > prev);
      } else {
        CHECK(mu1 >= prev);
      }
      prev = mu1;
      if (mu1 > curve.asymptote() + 1e-6 && mu2 < 1.0) {
        CHECK(std::abs(curve.player2_at(mu1) - mu2) < 1e-10);
      }
    }
    const Derived d = derive(g);
    const double lo = curve.player1_at(d.challenge_threshold * (1 - 1e-12));
    const double hi = curve.player1_at(d.challenge_threshold);
    CHECK(std::abs(hi - lo) < 1e-10);
  }
}

TEST_CASE("curve domain") {
  OneSidedGame g = oracle::p0();
  g.gamma1 = 3.0;  // decay floor 1/3, so the curve has a positive asymptote
  const onesided::CoevolutionCurve curve(g);
  CHECK(curve.asymptote() > 0.0);
  CHECK_THROWS_AS(curve.player2_at(0.5 * curve.asymptote()), DomainError);
  CHECK_THROWS(curve.player1_at(0.0));
}

TEST_CASE("initial atoms put the posterior on the curve") {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 100; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const onesided::CoevolutionCurve curve(g);
    const onesided::InitialAtoms atoms = onesided::initial_atoms(g, curve);
    CHECK(atoms.q1 * atoms.q2 == 0.0);
    const double target = curve.player1_at(g.z2);
    if (g.z1 < target) {
      CHECK(atoms.loser == 1);
      const double expected = 1.0 - (g.z1 / (1.0 - g.z1)) / (target / (1.0 - target));
      CHECK(atoms.q1 == doctest::Approx(expected).epsilon(1e-12));
      const double posterior = g.z1 / (g.z1 + (1.0 - g.z1) * (1.0 - atoms.q1));
      CHECK(std::abs(posterior - target) < 1e-12);
    } else {
      CHECK(atoms.loser == 2);
      const double posterior = g.z2 / (g.z2 + (1.0 - g.z2) * (1.0 - atoms.q2));
      CHECK(std::abs(curve.player1_at(posterior) - g.z1) < 1e-10);
    }
  }
}

TEST_CASE("atom of 5/9 from a 0.2 target") {
  // z1 = 0.1 against a curve value of 0.2.
  const double q = 1.0 - (0.1 / 0.9) / (0.2 / 0.8);
  CHECK(q == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  OneSidedGame g = oracle::p0();
  g.gamma1 = 0.0;
  g.z2 = 0.2;  // power law with exponent 1: curve value equals z2
  const onesided::CoevolutionCurve curve(g);
  CHECK(onesided::initial_atoms(g, curve).q1 == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("prior on the curve has no atoms") {
  OneSidedGame g = oracle::p0();
  const onesided::CoevolutionCurve curve(g);
  g.z1 = curve.player1_at(g.z2);
  const onesided::InitialAtoms atoms = onesided::initial_atoms(g, curve);
  CHECK(atoms.q1 == 0.0);
  CHECK(atoms.q2 == 0.0);
  CHECK(atoms.loser == 0);
}

TEST_CASE("reference game profile") {
  const onesided::EquilibriumProfile eq = onesided::solve(oracle::p0());
  CHECK(eq.atom1() > 0.0);
  CHECK(eq.atom2() == 0.0);
  CHECK(eq.payoff1() == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(eq.horizon() > eq.challenge_end());
  CHECK(eq.challenge_end() > 0.0);
  CHECK(onesided::yield_at(oracle::p0(), 0.3) == doctest::Approx((1 / 0.8) * (0.5 / 0.7 - 0.2)).epsilon(1e-14));
  CHECK(onesided::yield_at(oracle::p0(), 0.3) == doctest::Approx(0.642857).epsilon(1e-6));
  CHECK(onesided::challenge_hazard_at(oracle::p0(), 0.5) == doctest::Approx(0.3).epsilon(1e-14));
  // Loser 1 pays out the winner's share plus the atom gain.
  CHECK(eq.payoff2() == doctest::Approx(1 - 0.6 + 0.9 * eq.atom1() * 0.2).epsilon(1e-13));
}

TEST_CASE("profile invariants on random games") {
  std::mt19937_64 rng(24);
  for (int n = 0; n < 60; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const onesided::EquilibriumProfile eq = onesided::solve(g);
    const double T = eq.horizon(), T1 = eq.challenge_end();
    CHECK(std::isfinite(T));
    CHECK(T1 < T);
    CHECK(eq.atom1() * eq.atom2() == 0.0);
    CHECK(eq.concede_cdf1(T) + eq.challenge_cdf1(T1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eq.concede_cdf2(T) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(eq.reputation1(T) - 1.0) < 1e-9);
    CHECK(std::abs(eq.reputation2(T) - 1.0) < 1e-9);
    if (T1 > 0.0) CHECK(std::abs(eq.reputation2(T1) - eq.derived().challenge_threshold) < 1e-9);
    double f1 = 0, f2 = 0, g1 = 0;
    for (double t : interior_grid(T * 1.2, 300)) {
      CHECK(eq.concede_cdf1(t) >= f1 - 1e-15);
      CHECK(eq.concede_cdf2(t) >= f2 - 1e-15);
      CHECK(eq.challenge_cdf1(t) >= g1 - 1e-15);
      f1 = eq.concede_cdf1(t);
      f2 = eq.concede_cdf2(t);
      g1 = eq.challenge_cdf1(t);
      if (t > T1) CHECK(eq.challenge_cdf1(t) == doctest::Approx(eq.challenge_cdf1(T1)).epsilon(1e-14));
      if (t < T1) {
        CHECK(eq.yield2(t) > 0.0);
        CHECK(eq.yield2(t) < 1.0);
      } else if (t < T) {
        CHECK(eq.yield2(t) == 1.0);
      }
      if (t > T) CHECK(eq.concede_cdf1(t) == eq.concede_cdf1(T));
      if (t < T && eq.reputation1(t) < 1 - 1e-9 && eq.reputation2(t) < 1 - 1e-9) {
        CHECK(eq.concede_hazard(1, t) * (1 - eq.reputation1(t)) == doctest::Approx(eq.derived().concession_rate1));
        CHECK(eq.concede_hazard(2, t) * (1 - eq.reputation2(t)) == doctest::Approx(eq.derived().concession_rate2));
      }
    }
  }
}

TEST_CASE("reputations reach one together") {
  std::mt19937_64 rng(25);
  for (int n = 0; n < 60; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const onesided::EquilibriumProfile eq = onesided::solve(g);
    const onesided::CoevolutionCurve curve(g);
    const double t2 = curve.backward().time_at(1, eq.reputation2(0.0));
    CHECK(std::abs(t2 - eq.horizon()) < 1e-9);
    // Player 1's time is ill-conditioned where its curve is flat, so compare
    // reputations at the common time instead.
    CHECK(std::abs(curve.backward().reputation(0, eq.horizon()) - eq.reputation1(0.0)) < 1e-12);
    const double t1 = curve.backward().time_at(0, eq.reputation1(0.0));
    const double slope = std::abs(curve.backward().reputation(0, t1 * (1 + 1e-6)) - eq.reputation1(0.0)) / (t1 * 1e-6);
    if (slope > 1e-3) CHECK(std::abs(t1 - t2) < 1e-9);
  }
}

TEST_CASE("Bayes consistency of the path reputations") {
  std::mt19937_64 rng(26);
  for (int n = 0; n < 20; ++n) {
    const onesided::EquilibriumProfile eq = onesided::solve(oracle::random_game(rng));
    for (int i = 0; i < 2; ++i) {
      const PlayerPath& path = eq.profile().player[i];
      const std::vector<double> grid = oracle::resolvable(path, interior_grid(eq.horizon(), 1000));
      CHECK(grid.size() > 10);
      CHECK(bayes_gap(path, grid) < 1e-8);
    }
  }
}

TEST_CASE("indifference along the reference profile") {
  const onesided::EquilibriumProfile eq = onesided::solve(oracle::p0());
  const DeviationPayoffs dev(eq.profile());
  const double T = eq.horizon(), T1 = eq.challenge_end();
  for (double t : interior_grid(T, 60)) {
    CHECK(std::abs(dev.concede(0, t) - eq.payoff1()) < 1e-6);
    CHECK(std::abs(dev.concede(1, t) - eq.payoff2()) < 1e-6);
    if (t < T1) CHECK(std::abs(dev.challenge(0, t) - dev.concede(0, t)) < 1e-6);
    if (t > T1) CHECK(dev.challenge(0, t) < dev.concede(0, t));
  }
  CHECK(onesided::deviation_payoff_concede(eq, 1, 0.5 * T) == doctest::Approx(eq.payoff1()).epsilon(1e-6));
  CHECK(onesided::deviation_payoff_challenge(eq, 0.5 * T1) == doctest::Approx(eq.payoff1()).epsilon(1e-6));
}

TEST_CASE("no profitable deviation on a 2000-point grid") {
  const onesided::EquilibriumProfile eq = onesided::solve(oracle::p0());
  const DeviationPayoffs dev(eq.profile());
  const std::vector<double> grid = audit_grid(eq.horizon(), 2000);
  const DeviationCurve c1 = dev.curve(0, grid), c2 = dev.curve(1, grid);
  double worst = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    worst = std::max({worst, c1.concede[k] - eq.payoff1(), c1.challenge[k] - eq.payoff1(), c2.concede[k] - eq.payoff2()});
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("hazard schedule jumps") {
  const onesided::EquilibriumProfile eq = onesided::solve(oracle::p0());
  const HazardSchedule h = onesided::hazard_schedule(eq);
  const double nu = eq.derived().indifference_posterior;
  bool saw_switch = false, saw_horizon = false;
  for (const HazardJump& j : h.jumps()) {
    if (j.label == "challenge_end_1") {
      saw_switch = true;
      CHECK(std::abs(j.challenge_left / j.challenge_right - 1.0 / nu) < 1e-9);
      CHECK(j.time == eq.challenge_end());
    }
    if (j.label == "horizon") {
      saw_horizon = true;
      CHECK(j.resolution_right == doctest::Approx(0.5).epsilon(1e-14));
    }
  }
  CHECK(saw_switch);
  CHECK(saw_horizon);
  CHECK(h.resolution(eq.horizon() + 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(h.concession(0, 0.1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(h.concession(1, eq.horizon() + 0.1) == 0.0);
}

TEST_CASE("hazards without arrivals") {
  OneSidedGame g = oracle::p0();
  g.gamma1 = 0.0;
  const onesided::EquilibriumProfile eq = onesided::solve(g);
  const HazardSchedule h = onesided::hazard_schedule(eq);
  CHECK(eq.challenge_end() == 0.0);
  for (double t : interior_grid(eq.horizon(), 20)) CHECK(h.resolution(t) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(h.resolution(eq.horizon() + 0.5) == 0.0);
}

TEST_CASE("empty challenge phase when player 2 starts above the threshold") {
  OneSidedGame g = oracle::p0();
  g.z2 = 0.6;
  g.z1 = 0.02;
  const onesided::EquilibriumProfile eq = onesided::solve(g);
  CHECK(eq.challenge_end() == 0.0);
  CHECK(eq.challenge_cdf1(eq.horizon()) == 0.0);
}

TEST_CASE("loser gets the concession payoff") {
  std::mt19937_64 rng(27);
  for (int n = 0; n < 40; ++n) {
    const OneSidedGame g = oracle::random_game(rng);
    const onesided::EquilibriumProfile eq = onesided::solve(g);
    if (eq.atom1() > 0.0) CHECK(eq.payoff1() == doctest::Approx(1.0 - g.a2).epsilon(1e-12));
    if (eq.atom2() > 0.0) CHECK(eq.payoff2() == doctest::Approx(1.0 - g.a1).epsilon(1e-12));
  }
}
