#include "attrition/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "attrition/errors.hpp"

namespace attrition {

namespace {

std::string num(double v) {
  std::ostringstream out;
  out.precision(15);
  out << v;
  return out.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidGame(what);
}

void check_finite(double v, const std::string& name) { require(std::isfinite(v), name + " must be finite"); }

void check_open_unit(double v, const std::string& name) {
  check_finite(v, name);
  require(v > 0.0 && v < 1.0, "0 < " + name + " < 1 violated (" + name + " = " + num(v) + ")");
}

void check_court(double c, double k, double w, const std::string& ci, const std::string& kj, const std::string& wi) {
  check_finite(c, ci);
  check_finite(k, kj);
  check_finite(w, wi);
  require(w >= 0.0 && w < 1.0, "0 <= " + wi + " < 1 violated (" + wi + " = " + num(w) + ")");
  require(c < 1.0, ci + " < 1 violated (" + ci + " = " + num(c) + ")");
  require(w < c, wi + " < " + ci + " violated (" + wi + " = " + num(w) + ", " + ci + " = " + num(c) + ")");
  require(k > 0.0, "0 < " + kj + " violated (" + kj + " = " + num(k) + ")");
  require(k < 1.0 - w, kj + " < 1 - " + wi + " violated (" + kj + " = " + num(k) + ", " + wi + " = " + num(w) + ")");
}

void check_rates(double r1, double r2, double g1) {
  check_finite(r1, "r1");
  check_finite(r2, "r2");
  check_finite(g1, "gamma1");
  require(r1 > 0.0, "r1 > 0 violated (r1 = " + num(r1) + ")");
  require(r2 > 0.0, "r2 > 0 violated (r2 = " + num(r2) + ")");
  require(g1 >= 0.0, "gamma1 >= 0 violated (gamma1 = " + num(g1) + ")");
}

void check_overlap(double a1, double a2) {
  require(a1 + a2 - 1.0 > 0.0,
          "D = a1 + a2 - 1 > 0 violated (a1 = " + num(a1) + ", a2 = " + num(a2) + ", D = " + num(a1 + a2 - 1.0) + ")");
}

}  // namespace

void validate(const OneSidedGame& g) {
  check_open_unit(g.a1, "a1");
  check_open_unit(g.a2, "a2");
  check_overlap(g.a1, g.a2);
  check_open_unit(g.z1, "z1");
  check_open_unit(g.z2, "z2");
  check_rates(g.r1, g.r2, g.gamma1);
  check_court(g.c1, g.k2, g.w1, "c1", "k2", "w1");
}

void validate(const TwoSidedGame& g) {
  for (int i = 0; i < 2; ++i) {
    const std::string s = std::to_string(i + 1);
    check_open_unit(g.a[i], "a" + s);
    check_open_unit(g.z[i], "z" + s);
    check_finite(g.r[i], "r" + s);
    require(g.r[i] > 0.0, "r" + s + " > 0 violated (r" + s + " = " + num(g.r[i]) + ")");
    check_finite(g.gamma[i], "gamma" + s);
    require(g.gamma[i] >= 0.0, "gamma" + s + " >= 0 violated");
  }
  check_overlap(g.a[0], g.a[1]);
  for (int i = 0; i < 2; ++i) {
    const std::string s = std::to_string(i + 1);
    const std::string o = std::to_string(2 - i);
    check_court(g.c[i], g.k[1 - i], g.w[i], "c" + s, "k" + o, "w" + s);
  }
}

void validate(const MultiDemandGame& g) {
  auto check_grid = [](const std::vector<double>& grid, const std::vector<double>& prior, const std::string& s) {
    require(!grid.empty(), "A" + s + " must be non-empty");
    require(grid.size() == prior.size(), "pi" + s + " must have one entry per demand in A" + s);
    double total = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      check_open_unit(grid[n], "A" + s + "[" + std::to_string(n) + "]");
      if (n > 0) require(grid[n] > grid[n - 1], "A" + s + " must be strictly increasing");
      check_finite(prior[n], "pi" + s);
      require(prior[n] > 0.0, "pi" + s + " entries must be > 0");
      total += prior[n];
    }
    require(std::abs(total - 1.0) <= 1e-12, "pi" + s + " must sum to 1 (sum = " + num(total) + ")");
  };
  check_grid(g.demands1, g.prior1, "1");
  check_grid(g.demands2, g.prior2, "2");
  require(g.demands1.back() + g.demands2.front() > 1.0, "max A1 + min A2 > 1 violated");
  require(g.demands2.back() + g.demands1.front() > 1.0, "max A2 + min A1 > 1 violated");
  check_open_unit(g.z1, "z1");
  check_open_unit(g.z2, "z2");
  check_rates(g.r1, g.r2, g.gamma1);
  check_court(g.c1, g.k2, g.w1, "c1", "k2", "w1");
}

Derived derive(const OneSidedGame& g) {
  validate(g);
  Derived d;
  d.overlap = g.a1 + g.a2 - 1.0;
  d.concession_rate1 = g.r2 * (1.0 - g.a1) / d.overlap;
  d.concession_rate2 = g.r1 * (1.0 - g.a2) / d.overlap;
  d.challenge_threshold = 1.0 - g.c1;
  d.indifference_posterior = 1.0 - g.k2 / (1.0 - g.w1);
  d.challenges_active = g.gamma1 > 0.0;
  if (d.challenges_active) d.decay_floor = 1.0 - d.concession_rate1 / g.gamma1;
  // Backward from (1,1): player 2 rises at its concession rate, player 1 without challenges.
  const bernoulli::Dynamics second{d.concession_rate2, 0.0};
  const bernoulli::Dynamics quiet{d.concession_rate1 - g.gamma1, g.gamma1};
  const double back = 0.0 + bernoulli::hitting_time(second, d.challenge_threshold, 1.0);
  d.switch_reputation = bernoulli::evolve(quiet, 1.0, -(back - 0.0));
  return d;
}

TwoSidedDerived derive_two_sided(const TwoSidedGame& g) {
  validate(g);
  TwoSidedDerived d;
  d.overlap = g.a[0] + g.a[1] - 1.0;
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    d.concession_rate[i] = g.r[j] * (1.0 - g.a[i]) / d.overlap;
    d.challenge_threshold[i] = 1.0 - g.c[j];
    d.indifference_posterior[i] = 1.0 - g.k[j] / (1.0 - g.w[i]);
    if (g.gamma[i] > 0.0) d.decay_floor[i] = 1.0 - d.concession_rate[i] / g.gamma[i];
  }
  return d;
}

TwoSidedGame embed(const OneSidedGame& g) {
  TwoSidedGame t;
  t.a = {g.a1, g.a2};
  t.z = {g.z1, g.z2};
  t.r = {g.r1, g.r2};
  t.gamma = {g.gamma1, 0.0};
  t.c = {g.c1, 0.5};
  t.k = {0.5, g.k2};
  t.w = {g.w1, 0.0};
  return t;
}

OneSidedGame pair_game(const MultiDemandGame& g, double a1, double a2) {
  return OneSidedGame{a1, a2, g.z1, g.z2, g.r1, g.r2, g.gamma1, g.c1, g.k2, g.w1};
}

bernoulli::Dynamics quiet_dynamics(const TwoSidedDerived& d, const TwoSidedGame& g, int i) {
  return {d.concession_rate[i] - g.gamma[i], g.gamma[i]};
}

bernoulli::Dynamics challenge_dynamics(const TwoSidedDerived& d, const TwoSidedGame& g, int i) {
  return {d.concession_rate[i] - g.gamma[i], g.gamma[i] / d.indifference_posterior[i]};
}

double challenge_intensity(const TwoSidedDerived& d, const TwoSidedGame& g, int i) {
  const double nu = d.indifference_posterior[i];
  return (1.0 - nu) / nu * g.gamma[i];
}

}  // namespace attrition
