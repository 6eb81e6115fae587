#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "attrition/errors.hpp"
#include "attrition/montecarlo.hpp"
#include "attrition/onesided.hpp"
#include "support/oracles.hpp"

using namespace attrition;
using namespace attrition::montecarlo;

namespace {

const onesided::EquilibriumProfile& reference() {
  static const onesided::EquilibriumProfile eq = onesided::solve(oracle::p0());
  return eq;
}

const SimReport& reference_run() {
  static const SimReport rep = [] {
    SimConfig cfg;
    cfg.replications = 100000;
    cfg.seed = 7;
    cfg.bin_width = reference().horizon() / 40;
    return simulate(reference().profile(), cfg);
  }();
  return rep;
}

}  // namespace

TEST_CASE("configuration is validated") {
  SimConfig cfg;
  cfg.replications = 0;
  CHECK_THROWS_AS(validate(cfg), InvalidGame);
  cfg = SimConfig{};
  cfg.bin_width = 0.0;
  CHECK_THROWS_AS(validate(cfg), InvalidGame);
  cfg = SimConfig{};
  cfg.time_cap = -1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidGame);
}

TEST_CASE("simulated payoffs match the equilibrium payoffs") {
  const SimReport& rep = reference_run();
  for (int i = 0; i < 2; ++i) {
    const Estimate& e = rep.payoff[i];
    CHECK(e.std_error > 0.0);
    CHECK(std::abs(e.mean - reference().profile().payoff[i]) < 3 * e.std_error);
  }
}

TEST_CASE("ending probabilities sum to one") {
  const SimReport& rep = reference_run();
  double total = 0.0;
  for (double p : rep.ending) total += p;
  CHECK(std::abs(total - 1.0) < 3.0 / std::sqrt(static_cast<double>(rep.replications)));
  CHECK(rep.ending[censored] == 0.0);
  // Player 1's time-0 atom among strategic types.
  const double atom = (1 - oracle::p0().z1) * reference().atom1();
  const double se = std::sqrt(atom * (1 - atom) / rep.replications);
  CHECK(std::abs(rep.at_zero[concede_1] - atom) < 4 * se);
}

TEST_CASE("same seed gives identical reports") {
  SimConfig cfg;
  cfg.replications = 5000;
  cfg.seed = 99;
  const SimReport a = simulate(reference().profile(), cfg);
  const SimReport b = simulate(reference().profile(), cfg);
  CHECK(std::memcmp(a.ending.data(), b.ending.data(), sizeof(double) * ending_count) == 0);
  CHECK(a.payoff[0].mean == b.payoff[0].mean);
  CHECK(a.payoff[1].std_error == b.payoff[1].std_error);
  REQUIRE(a.bins.size() == b.bins.size());
  for (std::size_t n = 0; n < a.bins.size(); ++n) CHECK(a.bins[n].exposure == b.bins[n].exposure);
  cfg.seed = 100;
  const SimReport c = simulate(reference().profile(), cfg);
  CHECK(c.payoff[0].mean != a.payoff[0].mean);
}

TEST_CASE("justified fractions track the reputations") {
  const SimReport& rep = reference_run();
  const double T = reference().horizon();
  for (int player : {1, 2}) CHECK(posterior_z_score(rep, reference().profile(), player, 0.0, T) < 3.0);
  CHECK_THROWS_AS(posterior_z_score(rep, reference().profile(), 0, 0.0, T), InvalidGame);
}

TEST_CASE("concession hazards are flat") {
  const SimReport& rep = reference_run();
  const Derived d = reference().derived();
  const double T = reference().horizon();
  CHECK(flat_hazard_test(rep, "concede1", d.concession_rate1, 0.0, T).p_value > 0.01);
  CHECK(flat_hazard_test(rep, "concede2", d.concession_rate2, 0.0, T).p_value > 0.01);
}

TEST_CASE("challenge hazard follows its analytic schedule") {
  const SimReport& rep = reference_run();
  const HazardSchedule schedule = onesided::hazard_schedule(reference());
  double expected = 0.0, observed = 0.0;
  for (const SimBin& b : rep.bins) {
    if (b.end > reference().horizon()) break;
    expected += b.exposure * schedule.challenge(0.5 * (b.start + b.end));
    observed += b.challenges[0];
  }
  CHECK(std::abs(observed - expected) < 4 * std::sqrt(expected));
}

TEST_CASE("tampered yields are detected") {
  Profile tampered = reference().profile();
  tampered.yield_scale[1] = 0.9;
  const double T = reference().horizon();
  const AuditReport honest = montecarlo::best_response_audit(reference().profile(), audit_grid(T, 400));
  const AuditReport bad = montecarlo::best_response_audit(tampered, audit_grid(T, 400));
  CHECK(honest.max_advantage <= 1e-5);
  CHECK(bad.max_advantage > 2e-5);
}

TEST_CASE("late deviations do not pay") {
  const double T = reference().horizon();
  const DeviationPayoffs dev(reference().profile());
  for (double t : {1.01 * T, 1.5 * T, 3 * T}) {
    for (int i = 0; i < 2; ++i) CHECK(dev.concede(i, t) <= reference().profile().payoff[i] + 1e-9);
  }
}

TEST_CASE("one bin holding every duration") {
  const std::vector<double> d = {0.1, 0.2, 0.3, 0.4};
  const std::vector<HazardBin> h = empirical_hazard(d, std::vector<bool>(4, false), 0.5);
  REQUIRE(h.size() == 1);
  CHECK(h[0].at_risk == 4);
  CHECK(h[0].events == 4);
  CHECK(*h[0].hazard == doctest::Approx(2.0));
}

TEST_CASE("censored durations leave the risk set without an event") {
  const std::vector<HazardBin> h = empirical_hazard({0.1, 0.3, 1.2, 2.5}, {false, true, false, false}, 1.0);
  REQUIRE(h.size() == 3);
  CHECK(h[0].at_risk == 4);
  CHECK(h[0].events == 1);
  CHECK(*h[0].hazard == doctest::Approx(0.25));
  CHECK(h[1].at_risk == 2);
  CHECK(*h[1].hazard == doctest::Approx(0.5));
  CHECK(h[2].at_risk == 1);
  CHECK(*h[2].hazard == doctest::Approx(1.0));
  CHECK_THROWS_AS(empirical_hazard({}, {}, 1.0), EmptyInput);
  CHECK_THROWS(empirical_hazard({1.0}, {false}, 0.0));
  CHECK_THROWS(empirical_hazard({-1.0}, {false}, 1.0));
}

TEST_CASE("bins nobody reaches have no hazard") {
  SimReport rep;
  rep.replications = 2;
  SimBin live;
  live.end = 1.0;
  live.at_risk = 2;
  live.exposure = 1.5;
  live.resolutions = 2;
  SimBin dead;
  dead.start = 1.0;
  dead.end = 2.0;
  rep.bins = {live, dead};
  const std::vector<HazardBin> h = bin_hazard(rep, "resolution");
  REQUIRE(h.size() == 2);
  CHECK(*h[0].hazard == doctest::Approx(2.0 / 1.5));
  CHECK_FALSE(h[1].hazard.has_value());
}

TEST_CASE("exponential durations have a flat hazard") {
  std::mt19937_64 rng(61);
  std::exponential_distribution<double> draw(2.0);
  std::vector<double> d(100000);
  for (double& x : d) x = draw(rng);
  const std::vector<HazardBin> h = empirical_hazard(d, std::vector<bool>(d.size(), false), 0.02);
  // Exact hazard of a bin under events / (at risk * width).
  const double expected = (1 - std::exp(-2.0 * 0.02)) / 0.02;
  for (int n = 0; n < 10; ++n) CHECK(std::abs(*h[n].hazard / expected - 1.0) < 0.05);
}
