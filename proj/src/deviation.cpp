#include "attrition/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attrition/quadrature.hpp"

namespace attrition {

namespace {

constexpr double kQuadratureTolerance = 1e-9;

}  // namespace

DeviationPayoffs::DeviationPayoffs(const Profile& profile) : profile_(profile) {
  for (const PlayerPath& p : profile_.player) {
    for (double b : p.breakpoints()) cuts_.push_back(b);
  }
  std::sort(cuts_.begin(), cuts_.end());
}

double DeviationPayoffs::running(int i, double s) const {
  const int j = 1 - i;
  const TwoSidedGame& g = profile_.game;
  const PlayerPath& opp = profile_.player[j];
  const double d = profile_.derived.overlap;
  const double q = profile_.yield_probability(i, s);
  const double concede = (1.0 - g.z[j]) * g.a[i] * opp.concede_density(s);
  const double justified = g.z[j] * g.gamma[j] * std::exp(-g.gamma[j] * s) * (1.0 - g.a[j] - (1.0 - q) * g.k[i] * d);
  const double bluff =
      (1.0 - g.z[j]) * opp.challenge_density(s) * (1.0 - g.a[j] + (1.0 - q) * (1.0 - g.w[j] - g.k[i]) * d);
  return std::exp(-g.r[i] * s) * (concede + justified + bluff);
}

double DeviationPayoffs::opponent_alive(int i, double t) const {
  const int j = 1 - i;
  const TwoSidedGame& g = profile_.game;
  return g.z[j] * std::exp(-g.gamma[j] * t) + (1.0 - g.z[j]) * profile_.player[j].survival(t);
}

double DeviationPayoffs::concede_tail(int i, double t) const {
  const TwoSidedGame& g = profile_.game;
  return std::exp(-g.r[i] * t) * (1.0 - g.a[1 - i]) * opponent_alive(i, t);
}

double DeviationPayoffs::challenge_tail(int i, double t) const {
  const int j = 1 - i;
  const TwoSidedGame& g = profile_.game;
  const double d = profile_.derived.overlap;
  const double q = profile_.yield_probability(j, t);
  const double strategic = (1.0 - g.z[j]) * profile_.player[j].survival(t);
  const double value =
      opponent_alive(i, t) * (1.0 - g.a[j] - g.c[i] * d) + strategic * ((1.0 - q) * g.w[i] + q) * d;
  return std::exp(-g.r[i] * t) * value;
}

double DeviationPayoffs::atom_payoff(int i) const {
  const int j = 1 - i;
  return (1.0 - profile_.game.z[j]) * profile_.player[j].atom() * profile_.game.a[i];
}

double DeviationPayoffs::time_zero_concede(int i) const {
  const int j = 1 - i;
  const TwoSidedGame& g = profile_.game;
  const double mass = (1.0 - g.z[j]) * profile_.player[j].atom();
  return (1.0 - mass) * (1.0 - g.a[j]) + mass * (g.a[i] + 1.0 - g.a[j]) / 2.0;
}

double DeviationPayoffs::truncation(int i) const { return 12.0 * std::log(10.0) / profile_.game.r[i]; }

double DeviationPayoffs::concede(int i, double t) const {
  if (t <= 0.0) return time_zero_concede(i);
  auto h = [&](double s) { return running(i, s); };
  return atom_payoff(i) + integrate(h, 0.0, t, kQuadratureTolerance, cuts_) + concede_tail(i, t);
}

double DeviationPayoffs::challenge(int i, double t) const {
  t = std::max(t, 0.0);
  auto h = [&](double s) { return running(i, s); };
  return atom_payoff(i) + integrate(h, 0.0, t, kQuadratureTolerance, cuts_) + challenge_tail(i, t);
}

DeviationCurve DeviationPayoffs::curve(int i, const std::vector<double>& grid) const {
  DeviationCurve out;
  auto h = [&](double s) { return running(i, s); };
  double acc = 0.0;
  double last = 0.0;
  for (double t : grid) {
    if (t < last) continue;
    acc += integrate(h, last, t, kQuadratureTolerance, cuts_);
    last = t;
    out.time.push_back(t);
    out.concede.push_back(t <= 0.0 ? time_zero_concede(i) : atom_payoff(i) + acc + concede_tail(i, t));
    out.challenge.push_back(atom_payoff(i) + acc + challenge_tail(i, t));
  }
  return out;
}

double DeviationPayoffs::realized(int i) const {
  const PlayerPath& own = profile_.player[i];
  const double upto = std::min(profile_.horizon, truncation(i));
  auto flow = [&](double s) {
    double v = running(i, s) * own.survival(s) + own.concede_density(s) * concede_tail(i, s);
    const double g = own.challenge_density(s);
    if (g > 0.0) v += g * challenge_tail(i, s);
    return v;
  };
  const double atom = own.atom();
  return atom * time_zero_concede(i) + (1.0 - atom) * atom_payoff(i) +
         integrate(flow, 0.0, upto, kQuadratureTolerance, cuts_);
}

double DeviationPayoffs::response_gain(int i, double t) const {
  const int j = 1 - i;
  const TwoSidedGame& g = profile_.game;
  const double d = profile_.derived.overlap;
  const double justified = profile_.player[j].challenger_posterior(t);
  const double yield = 1.0 - g.a[j];
  const double see = yield + (1.0 - justified) * (1.0 - g.w[j]) * d - g.k[i] * d;
  const double q = profile_.yield_probability(i, t);
  return std::max(yield, see) - (q * yield + (1.0 - q) * see);
}

std::vector<double> audit_grid(double horizon, int points, bool include_tail) {
  std::vector<double> grid;
  const int tail = include_tail && std::isfinite(horizon) ? std::max(1, points / 10) : 0;
  const int half = std::max(2, (points - tail) / 2);
  for (int k = 0; k < half; ++k) {
    const double u = 0.5 * horizon * std::pow(10.0, -6.0 + 6.0 * k / (half - 1));
    grid.push_back(u);
    if (std::isfinite(horizon)) grid.push_back(horizon - u);
  }
  for (int k = 1; k <= tail; ++k) grid.push_back(horizon * (1.0 + static_cast<double>(k) / tail));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

AuditReport best_response_audit(const Profile& profile, const std::vector<double>& grid) {
  AuditReport report;
  report.max_advantage = -std::numeric_limits<double>::infinity();
  const DeviationPayoffs dev(profile);
  for (int i = 0; i < 2; ++i) {
    PlayerAudit& a = report.player[i];
    const PlayerPath& own = profile.player[i];
    a.challenges = profile.game.gamma[i] > 0.0;
    a.realized = dev.realized(i);
    a.best_deviation = dev.concede(i, 0.0);
    a.best_kind = "concede";
    a.best_time = 0.0;
    if (a.challenges) {
      const double v0 = dev.challenge(i, 0.0);
      if (v0 > a.best_deviation) {
        a.best_deviation = v0;
        a.best_kind = "challenge";
      }
    }
    const DeviationCurve c = dev.curve(i, grid);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    a.after_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < c.time.size(); ++n) {
      const double t = c.time[n];
      if (c.concede[n] > a.best_deviation) {
        a.best_deviation = c.concede[n];
        a.best_kind = "concede";
        a.best_time = t;
      }
      if (a.challenges && c.challenge[n] > a.best_deviation) {
        a.best_deviation = c.challenge[n];
        a.best_kind = "challenge";
        a.best_time = t;
      }
      if (t > 0.0 && t < profile.horizon) {
        lo = std::min(lo, c.concede[n]);
        hi = std::max(hi, c.concede[n]);
        if (a.challenges && own.challenging(t)) a.challenge_gap = std::max(a.challenge_gap, std::abs(c.challenge[n] - c.concede[n]));
        if (a.challenges && !own.challenging(t)) a.after_gap = std::max(a.after_gap, c.challenge[n] - c.concede[n]);
        if (profile.game.gamma[1 - i] > 0.0) a.response_gain = std::max(a.response_gain, dev.response_gain(i, t));
      }
    }
    a.concede_spread = hi >= lo ? hi - lo : 0.0;
    a.advantage = a.best_deviation - a.realized;
    report.max_advantage = std::max(report.max_advantage, a.advantage);
  }
  return report;
}

}  // namespace attrition
