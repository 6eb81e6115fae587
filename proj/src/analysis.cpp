#include "attrition/analysis.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "attrition/errors.hpp"
#include "attrition/parallel.hpp"

namespace attrition::analysis {

namespace {

constexpr double kEdge = 1e-9;
constexpr int kScanPoints = 10000;

bool knife_edge(double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y)); }

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Root of f on [lo, hi] where f changes sign; bisects to full precision.
double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  auto [a, b] = boost::math::tools::bisect(f, lo, hi, boost::math::tools::eps_tolerance<double>(52));
  return 0.5 * (a + b);
}

// Sign change of f on [lo, hi] located on a uniform scan; picks the first
// from the left (from_left) or right.
std::optional<std::pair<double, double>> scan_bracket(const std::function<double(double)>& f, double lo, double hi,
                                                      bool from_left) {
  double prev_x = from_left ? lo : hi;
  double prev = f(prev_x);
  for (int n = 1; n <= kScanPoints; ++n) {
    const double x = from_left ? lo + (hi - lo) * n / kScanPoints : hi - (hi - lo) * n / kScanPoints;
    const double v = f(x);
    if (sign_of(v) != sign_of(prev)) {
      return from_left ? std::make_pair(prev_x, x) : std::make_pair(x, prev_x);
    }
    prev_x = x;
    prev = v;
  }
  return std::nullopt;
}

struct Regions {
  int loser = 0;
  bool window1 = false;  // player 1 not conceding and below its switch reputation
  bool window2 = false;  // player 2 not conceding and below the challenge threshold
};

Regions regions_of(const OneSidedGame& game) {
  const onesided::CoevolutionCurve curve(game);
  const onesided::InitialAtoms atoms = onesided::initial_atoms(game, curve);
  Regions r;
  r.loser = atoms.loser;
  r.window1 = atoms.q1 == 0.0 && game.z1 < curve.switch_reputation();
  r.window2 = atoms.q2 == 0.0 && game.z2 < curve.derived().challenge_threshold;
  return r;
}

std::string loser_label(int loser) {
  if (loser == 1) return "player1_concedes";
  if (loser == 2) return "player2_concedes";
  return "on_curve";
}

struct Prediction {
  int sign1 = 0, sign2 = 0;
  std::string region;
  bool covered = true;
};

// Predicted payoff responses to a parameter move in direction dir (+1 or -1).
Prediction predict(const Regions& r, const std::string& param, int dir) {
  Prediction p;
  p.region = loser_label(r.loser);
  if (param == "z1" || param == "z2" || param == "r1" || param == "r2") {
    const int player = param.back() == '1' ? 1 : 2;
    const int favour = (param[0] == 'z' ? 1 : -1) * dir;
    const bool loses = r.loser == player;
    const int own = loses ? 0 : favour;
    const int other = loses ? -favour : 0;
    p.sign1 = player == 1 ? own : other;
    p.sign2 = player == 1 ? other : own;
    return p;
  }
  if (param == "c1" || param == "k2" || param == "w1") {
    const int favour = (param == "c1" ? -1 : 1) * dir;
    p.sign1 = r.window1 ? favour : 0;
    p.sign2 = r.window2 ? -favour : 0;
    if (r.window1) p.region += ",window1";
    if (r.window2) p.region += ",window2";
    return p;
  }
  p.covered = false;
  return p;
}

bool matches(int predicted, double change) {
  if (predicted == 0) return std::abs(change) < kFlatTolerance;
  return predicted > 0 ? change > 0.0 : change < 0.0;
}

bool same_regions(const Regions& a, const Regions& b) {
  return a.loser == b.loser && a.window1 == b.window1 && a.window2 == b.window2;
}

double payoff1(const OneSidedGame& game) { return onesided::solve(game).payoff1(); }

}  // namespace

bool BenefitRegion::benefits(double z1, double z2) const {
  if (!condition_holds || !(z1 > mu1_lower && z1 < mu1_upper)) return false;
  return z2 < curve->player2_at(z1);
}

std::pair<double, double> BenefitRegion::bounds() const {
  if (!condition_holds) throw NoBenefitRegion("the ultimatum opportunity cannot benefit player 1 in this game");
  return {mu1_lower, mu1_upper};
}

double time_to_one(const onesided::CoevolutionCurve& curve, double mu1) { return curve.backward().time_at(0, mu1); }

double time_to_one_quiet(const OneSidedGame& game, double mu1) {
  const Derived d = derive(game);
  return -std::log(mu1) / d.concession_rate1;
}

double target_sign_expression(const OneSidedGame& game) {
  const Derived d = derive(game);
  const double l1 = d.concession_rate1;
  const double l2 = d.concession_rate2;
  const double g = game.gamma1;
  const double nu = d.indifference_posterior;
  const double m = d.challenge_threshold;
  return (l1 - g) * ((1.0 - std::pow(nu, -g / l1)) / (1.0 - nu) * nu + g / l1 * std::pow(m, (l1 - g) / l2));
}

BenefitRegion who_benefits(const OneSidedGame& game) {
  if (!(game.gamma1 > 0.0)) throw InvalidGame("gamma1 > 0 required to compare against the game without ultimatums");
  BenefitRegion region;
  region.curve.emplace(game);
  const onesided::CoevolutionCurve& curve = *region.curve;
  const Derived& d = curve.derived();
  region.target = d.indifference_posterior;
  region.switch_reputation = curve.switch_reputation();
  region.time_with = time_to_one(curve, region.target);
  region.time_without = time_to_one_quiet(game, region.target);
  region.condition_holds = region.switch_reputation > region.target && region.time_with < region.time_without;
  if (!region.condition_holds) return region;

  auto gap = [&](double mu) { return time_to_one_quiet(game, mu) - time_to_one(curve, mu); };
  // The time to one diverges only logarithmically at the asymptote, so the
  // lower crossing can sit much closer to it than kEdge. Walk in geometrically.
  const double floor = curve.asymptote();
  double distance = std::max(kEdge, floor * kEdge);
  double low_end = floor + distance;
  while (gap(low_end) > 0.0) {
    distance *= 1e-3;
    const double next = floor + distance;
    if (!(next > floor) || next == low_end) {
      region.lower_unresolved = true;
      break;
    }
    low_end = next;
  }
  const double high_end = region.switch_reputation;
  auto solve_side = [&](double lo, double hi, bool lower) {
    if (sign_of(gap(lo)) != sign_of(gap(hi)) && gap(lo) != 0.0 && gap(hi) != 0.0) return bisect_root(gap, lo, hi);
    region.scanned = true;
    const auto bracket = scan_bracket(gap, lo, hi, !lower);
    if (!bracket) throw BracketingFailure("no sign change of the curve gap on the scan");
    return bisect_root(gap, bracket->first, bracket->second);
  };
  region.mu1_lower = region.lower_unresolved ? low_end : solve_side(low_end, region.target, true);
  region.mu1_upper = solve_side(region.target, high_end, false);
  return region;
}

LimitPayoffs limit_payoffs_single(const OneSidedGame& game) {
  const Derived d = derive(game);
  const double l1 = d.concession_rate1;
  const double l2 = d.concession_rate2;
  const double g = game.gamma1;
  LimitPayoffs out;
  if (knife_edge(l1, g + l2)) {
    out.generic = false;
    out.case_label = "indeterminate_knife_edge";
    return out;
  }
  out.efficient = true;
  if (l1 < g + l2) {
    out.u1 = 1.0 - game.a2;
    out.u2 = game.a2;
    out.winner = 2;
    out.case_label = l1 < g ? "fast_ultimatum" : "player2_faster";
    if (knife_edge(l1, g)) out.generic = false;
  } else {
    out.u1 = game.a1;
    out.u2 = 1.0 - game.a1;
    out.winner = 1;
    out.case_label = "player1_faster";
  }
  return out;
}

double get_param(const OneSidedGame& g, const std::string& name) {
  if (name == "a1") return g.a1;
  if (name == "a2") return g.a2;
  if (name == "z1") return g.z1;
  if (name == "z2") return g.z2;
  if (name == "r1") return g.r1;
  if (name == "r2") return g.r2;
  if (name == "gamma1") return g.gamma1;
  if (name == "c1") return g.c1;
  if (name == "k2") return g.k2;
  if (name == "w1") return g.w1;
  throw InvalidGame("unknown parameter " + name);
}

OneSidedGame with_param(OneSidedGame g, const std::string& name, double value) {
  if (name == "a1") g.a1 = value;
  else if (name == "a2") g.a2 = value;
  else if (name == "z1") g.z1 = value;
  else if (name == "z2") g.z2 = value;
  else if (name == "r1") g.r1 = value;
  else if (name == "r2") g.r2 = value;
  else if (name == "gamma1") g.gamma1 = value;
  else if (name == "c1") g.c1 = value;
  else if (name == "k2") g.k2 = value;
  else if (name == "w1") g.w1 = value;
  else throw InvalidGame("unknown parameter " + name);
  return g;
}

MonotonicityReport comp_statics_check(const OneSidedGame& game, const std::string& param, double delta) {
  const OneSidedGame moved = with_param(game, param, get_param(game, param) + delta);
  validate(moved);
  const auto base = onesided::solve(game);
  const auto next = onesided::solve(moved);
  MonotonicityReport rep;
  rep.param = param;
  rep.delta = delta;
  rep.u1 = base.payoff1();
  rep.u2 = base.payoff2();
  rep.du1 = next.payoff1() - base.payoff1();
  rep.du2 = next.payoff2() - base.payoff2();
  const Regions before = regions_of(game);
  const Prediction p = predict(before, param, sign_of(delta));
  if (!p.covered) throw InvalidGame("no monotonicity prediction for parameter " + param);
  rep.predicted1 = p.sign1;
  rep.predicted2 = p.sign2;
  rep.region = p.region;
  rep.same_region = before.loser != 0 && same_regions(before, regions_of(moved));
  rep.holds1 = !rep.same_region || matches(p.sign1, rep.du1);
  rep.holds2 = !rep.same_region || matches(p.sign2, rep.du2);
  return rep;
}

SignReport gamma_sensitivity(const OneSidedGame& game) {
  if (!(game.gamma1 > 0.0)) throw InvalidGame("gamma1 > 0 required");
  const Derived d = derive(game);
  const double l1 = d.concession_rate1;
  const double l2 = d.concession_rate2;
  const double g = game.gamma1;
  if (knife_edge(g, l1)) throw InvalidGame("gamma1 = lambda1 is excluded");
  const double nu = d.indifference_posterior;
  const double m = d.challenge_threshold;
  const double z1 = game.z1;

  SignReport rep;
  const Regions r = regions_of(game);
  if (r.loser == 1) {
    rep.region = "constant";
  } else if (!r.window1) {
    rep.region = "decreasing";
  } else {
    rep.region = "window";
  }

  const onesided::CoevolutionCurve curve(game);
  if (z1 > curve.asymptote()) {
    const double reach = curve.player2_at(z1);
    const double weight = (1.0 - nu) / nu;
    const double power = std::pow(m, (l1 - g) / l2);
    const double den = 1.0 + weight * (g / l1) * power;
    const double num = (l1 - g) / l1 / z1 + (g / l1) / nu;
    const double x = std::pow(reach, (g - l1) / l2);
    const double dden = weight / l1 * power - weight * (g / l1) * power / l2 * std::log(m);
    const double dnum = (1.0 / l1) * (1.0 / nu - 1.0 / z1);
    rep.derivative = -(l2 / ((g - l1) * (g - l1))) * std::log(x) + (l2 / (g - l1)) / x * (dnum / den - num / (den * den) * dden);
    rep.displayed = l2 / (g - l1) *
                    (-std::log(reach) / l2 + (1.0 / nu - 1.0 / z1) / (1.0 / z1 + g * (1.0 / nu - 1.0 / z1)) +
                     weight / l1 * power * (g / l2 * std::log(m) - 1.0));
  }

  const double h = 1e-4 * g;
  const OneSidedGame up = with_param(game, "gamma1", g + h);
  const OneSidedGame down = with_param(game, "gamma1", g - h);
  rep.finite_difference = (payoff1(up) - payoff1(down)) / (2.0 * h);
  rep.same_region = same_regions(r, regions_of(up)) && same_regions(r, regions_of(down)) && r.loser != 0;
  if (rep.region == "constant") {
    rep.agrees = std::abs(rep.finite_difference) < kFlatTolerance / h;
  } else if (rep.region == "decreasing") {
    rep.agrees = rep.finite_difference < 0.0;
  } else {
    rep.agrees = sign_of(rep.derivative) == sign_of(rep.finite_difference);
  }
  return rep;
}

std::vector<SweepRow> sweep(const OneSidedGame& game, const std::string& param, const std::vector<double>& values) {
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), [&](std::size_t n) {
    SweepRow& row = rows[n];
    row.value = values[n];
    try {
      const OneSidedGame g = with_param(game, param, values[n]);
      const auto eq = onesided::solve(g);
      row.u1 = eq.payoff1();
      row.u2 = eq.payoff2();
      row.horizon = eq.horizon();
      row.challenge_end = eq.challenge_end();
      row.atom1 = eq.atom1();
      row.atom2 = eq.atom2();
      const Regions r = regions_of(g);
      if (param == "gamma1" && g.gamma1 > 0.0) {
        const SignReport s = gamma_sensitivity(g);
        row.region = loser_label(r.loser) + "," + s.region;
        row.sign1 = s.region == "decreasing" ? -1 : s.region == "window" ? sign_of(s.derivative) : 0;
      } else {
        const Prediction p = predict(r, param, 1);
        row.region = p.region;
        row.sign1 = p.sign1;
        row.sign2 = p.sign2;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace attrition::analysis
