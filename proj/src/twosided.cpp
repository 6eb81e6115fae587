#include "attrition/twosided.hpp"

#include <algorithm>
#include <cmath>

#include "attrition/backward.hpp"
#include "attrition/bernoulli.hpp"
#include "attrition/errors.hpp"

namespace attrition::twosided {

namespace {

constexpr double kLineTolerance = 1e-10;
constexpr double kCurveTolerance = 1e-9;

bool fast_arrivals(const TwoSidedDerived& d, const TwoSidedGame& g) {
  return g.gamma[0] > d.concession_rate[0] && g.gamma[1] > d.concession_rate[1];
}

bool steady_admissible(const RegimeClass& rc) {
  for (int i = 0; i < 2; ++i) {
    if (!(rc.theta[i] > rc.phi_nu[i] && rc.theta[i] < rc.phi[i])) return false;
  }
  return true;
}

bernoulli::Dynamics branch_dynamics(const TwoSidedDerived& d, const TwoSidedGame& g, int i, Branch b) {
  return b == Branch::low ? challenge_dynamics(d, g, i) : quiet_dynamics(d, g, i);
}

// Forward time for player i's reputation to move from mu to its threshold
// along the branch; infinity when the branch does not pass through mu.
double time_to_threshold(const TwoSidedDerived& d, const TwoSidedGame& g, int i, Branch b, double mu) {
  const double theta = d.challenge_threshold[i];
  if (std::abs(mu - theta) <= 1e-12 * theta) return 0.0;
  if (b == Branch::low ? mu > theta : mu < theta) return kInfinity;
  try {
    return bernoulli::hitting_time(branch_dynamics(d, g, i, b), mu, theta);
  } catch (const Unreachable&) {
    return kInfinity;
  }
}

double branch_value(const TwoSidedDerived& d, const TwoSidedGame& g, int i, Branch b, double s) {
  return bernoulli::evolve(branch_dynamics(d, g, i, b), d.challenge_threshold[i], -s);
}

std::vector<Type2Entry> enumerate_type2(const TwoSidedDerived& d, const TwoSidedGame& g) {
  std::vector<Type2Entry> out;
  for (Branch b : {Branch::low, Branch::high}) {
    for (int p = 0; p < 2; ++p) {
      const int o = 1 - p;
      const double s = time_to_threshold(d, g, o, b, g.z[o]);
      if (!std::isfinite(s)) continue;
      const double target = branch_value(d, g, p, b, s);
      if (target < g.z[p] * (1.0 - kCurveTolerance)) continue;
      Type2Entry e;
      e.branch = b;
      e.absorption = s;
      if (target > g.z[p] * (1.0 + kCurveTolerance)) e.atom = {p, atom_for(g.z[p], target)};
      const bool seen = std::any_of(out.begin(), out.end(), [&](const Type2Entry& f) {
        return f.atom.player == e.atom.player && std::abs(f.atom.atom - e.atom.atom) <= 1e-12;
      });
      if (!seen) out.push_back(e);
    }
  }
  return out;
}

bool near_line(double z, double line) { return std::abs(z - line) <= kLineTolerance; }

std::array<double, 2> apply_atom(const TwoSidedGame& g, const AtomChoice& atom) {
  std::array<double, 2> x = g.z;
  if (atom.player < 0) return x;
  if (atom.player > 1 || !(atom.atom >= 0.0 && atom.atom < 1.0)) {
    throw AtomOutOfRange("atom must be a player 1 or 2 mass in [0, 1)");
  }
  x[atom.player] = posterior_after(g.z[atom.player], atom.atom);
  return x;
}

std::array<double, 2> atom_masses(const AtomChoice& atom) {
  std::array<double, 2> q{};
  if (atom.player >= 0) q[atom.player] = atom.atom;
  return q;
}

Phase make_phase(double start, double end, double anchor_time, double anchor_value, const bernoulli::Dynamics& dyn,
                 double intensity, bool challenging) {
  Phase p;
  p.start = start;
  p.end = end;
  p.anchor_time = anchor_time;
  p.anchor_value = anchor_value;
  p.dyn = dyn;
  p.intensity = challenging ? intensity : 0.0;
  p.challenging = challenging;
  return p;
}

InfiniteProfile assemble(const TwoSidedGame& g, const TwoSidedDerived& d, const AtomChoice& atom,
                         const std::array<double, 2>& posterior, std::array<std::vector<Phase>, 2> phases) {
  InfiniteProfile out;
  out.atom = atom;
  out.posterior = posterior;
  out.profile.game = g;
  out.profile.derived = d;
  out.profile.horizon = kInfinity;
  const auto q = atom_masses(atom);
  for (int i = 0; i < 2; ++i) {
    out.profile.player[i] =
        PlayerPath(g.z[i], q[i], d.concession_rate[i], g.gamma[i], kInfinity, std::move(phases[i]));
  }
  out.profile.payoff = closed_form_payoffs(g, d.overlap, q);
  return out;
}

}  // namespace

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::unique_finite_T: return "unique_finite_T";
    case Regime::type1_only: return "type1_only";
    case Regime::type2_only: return "type2_only";
    case Regime::type1_and_type2: return "type1_and_type2";
    case Regime::boundary: return "boundary";
  }
  return "boundary";
}

std::string to_string(Branch branch) { return branch == Branch::low ? "low" : "high"; }

RegimeClass classify(const TwoSidedGame& game) {
  const TwoSidedDerived d = derive_two_sided(game);
  RegimeClass rc;
  for (int i = 0; i < 2; ++i) {
    rc.theta[i] = d.challenge_threshold[i];
    rc.phi[i] = std::max(0.0, d.decay_floor[i].value_or(0.0));
    rc.phi_nu[i] = rc.phi[i] * d.indifference_posterior[i];
  }
  try {
    const BackwardCurve curve(game, d);
    place_on_curve(curve, game.z);
    rc.finite_exists = true;
  } catch (const RegimeMismatch&) {
    rc.finite_exists = false;
  }
  if (!fast_arrivals(d, game)) {
    rc.regime = Regime::unique_finite_T;
    rc.note = "a player's arrival rate does not exceed its concession rate";
    return rc;
  }
  for (int i = 0; i < 2; ++i) {
    if (near_line(game.z[i], rc.phi_nu[i]) || near_line(game.z[i], rc.phi[i])) {
      rc.regime = Regime::boundary;
      rc.note = "prior on a region boundary";
      return rc;
    }
  }
  rc.type1 = game.z[0] < rc.phi_nu[0] && game.z[1] < rc.phi_nu[1];
  if (rc.type1) {
    for (int i = 0; i < 2; ++i) rc.type1_atoms.push_back({i, 0.0, atom_for(game.z[i], rc.phi_nu[i])});
  }
  if (steady_admissible(rc)) rc.type2_atoms = enumerate_type2(d, game);
  rc.type2 = !rc.type2_atoms.empty();
  if (rc.type1 && rc.type2) {
    rc.regime = Regime::type1_and_type2;
  } else if (rc.type1) {
    rc.regime = Regime::type1_only;
  } else if (rc.type2) {
    rc.regime = Regime::type2_only;
  } else if (rc.finite_exists) {
    rc.regime = Regime::unique_finite_T;
  } else {
    rc.regime = Regime::boundary;
    rc.note = "no constructed equilibrium reaches this prior";
  }
  return rc;
}

Profile solve_finite(const TwoSidedGame& game) {
  const RegimeClass rc = classify(game);
  if (rc.regime != Regime::unique_finite_T) {
    throw RegimeMismatch("finite-horizon solver needs regime unique_finite_T, got " + to_string(rc.regime));
  }
  return finite_profile(game);
}

double steady_residual(const TwoSidedGame& game, int i, double chi) {
  const TwoSidedDerived d = derive_two_sided(game);
  const double theta = d.challenge_threshold[i];
  return d.concession_rate[i] - (1.0 - theta) * game.gamma[i] + (1.0 - theta) * chi;
}

std::array<double, 2> steady_state_rates(const TwoSidedGame& game) {
  const TwoSidedDerived d = derive_two_sided(game);
  std::array<double, 2> chi{};
  for (int i = 0; i < 2; ++i) {
    chi[i] = game.gamma[i] - d.concession_rate[i] / (1.0 - d.challenge_threshold[i]);
    if (!(chi[i] > 0.0)) {
      throw RegimeMismatch("steady challenge rate of player " + std::to_string(i + 1) + " is not positive");
    }
  }
  return chi;
}

InfiniteProfile construct_type1(const TwoSidedGame& game, const AtomChoice& atom) {
  const TwoSidedDerived d = derive_two_sided(game);
  if (!fast_arrivals(d, game)) throw RegimeMismatch("type-1 paths need gamma_i > lambda_i for both players");
  const RegimeClass rc = classify(game);
  const std::array<double, 2> x = apply_atom(game, atom);
  for (int i = 0; i < 2; ++i) {
    if (!(x[i] < rc.phi_nu[i] - kLineTolerance)) {
      throw AtomOutOfRange("post-atom reputation of player " + std::to_string(i + 1) + " is not below " +
                           std::to_string(rc.phi_nu[i]));
    }
  }
  // Player i challenges once the opponent's reputation drops below its
  // threshold. Both reputations fall throughout, so each switch happens once.
  std::array<std::vector<Phase>, 2> phases;
  std::array<bool, 2> active{};
  std::array<double, 2> value = x;
  double now = 0.0;
  for (int i = 0; i < 2; ++i) active[i] = x[1 - i] < d.challenge_threshold[1 - i];
  auto dynamics = [&](int i) { return active[i] ? challenge_dynamics(d, game, i) : quiet_dynamics(d, game, i); };
  for (;;) {
    double next = kInfinity;
    int who = -1;
    for (int i = 0; i < 2; ++i) {
      if (active[i]) continue;
      const int j = 1 - i;
      const double wait = bernoulli::hitting_time(dynamics(j), value[j], d.challenge_threshold[j]);
      if (now + wait < next) {
        next = now + wait;
        who = i;
      }
    }
    for (int i = 0; i < 2; ++i) {
      const double intensity = challenge_intensity(d, game, i);
      phases[i].push_back(make_phase(now, next, now, value[i], dynamics(i), intensity, active[i]));
    }
    if (who < 0) break;
    for (int i = 0; i < 2; ++i) value[i] = bernoulli::evolve(dynamics(i), value[i], next - now);
    now = next;
    active[who] = true;
  }
  InfiniteProfile out = assemble(game, d, atom, x, std::move(phases));
  out.kind = "type1";
  return out;
}

InfiniteProfile construct_type2(const TwoSidedGame& game, const AtomChoice& atom) {
  const TwoSidedDerived d = derive_two_sided(game);
  if (!fast_arrivals(d, game)) throw RegimeMismatch("type-2 paths need gamma_i > lambda_i for both players");
  const RegimeClass rc = classify(game);
  if (!steady_admissible(rc)) {
    throw RegimeMismatch("type-2 paths need each threshold strictly between the two drift thresholds");
  }
  const std::array<double, 2> chi = steady_state_rates(game);
  const std::array<double, 2> x = apply_atom(game, atom);
  const bool below = x[0] <= rc.theta[0] * (1.0 + 1e-12) && x[1] <= rc.theta[1] * (1.0 + 1e-12);
  const bool above = x[0] >= rc.theta[0] * (1.0 - 1e-12) && x[1] >= rc.theta[1] * (1.0 - 1e-12);
  if (!below && !above) throw AtomOutOfRange("post-atom prior straddles the thresholds");
  const Branch branch = below ? Branch::low : Branch::high;
  std::array<double, 2> s{};
  for (int i = 0; i < 2; ++i) {
    s[i] = time_to_threshold(d, game, i, branch, x[i]);
    if (!std::isfinite(s[i])) {
      throw AtomOutOfRange("player " + std::to_string(i + 1) + " never reaches its threshold on the " +
                           to_string(branch) + " branch");
    }
  }
  if (std::abs(s[0] - s[1]) > kCurveTolerance * std::max(1.0, std::max(s[0], s[1]))) {
    throw AtomOutOfRange("post-atom prior is off the curve into the thresholds (arrival times " +
                         std::to_string(s[0]) + " and " + std::to_string(s[1]) + ")");
  }
  std::array<std::vector<Phase>, 2> phases;
  for (int i = 0; i < 2; ++i) {
    const bernoulli::Dynamics dyn = branch_dynamics(d, game, i, branch);
    const double intensity = challenge_intensity(d, game, i);
    if (s[i] > 0.0) phases[i].push_back(make_phase(0.0, s[i], 0.0, x[i], dyn, intensity, branch == Branch::low));
    const double theta = d.challenge_threshold[i];
    const double start = s[i] > 0.0 ? bernoulli::evolve(dyn, x[i], s[i]) : x[i];
    // Held at the threshold: strategic challenges exactly offset the drift.
    const double steady = (game.gamma[i] - d.concession_rate[i]) / theta - game.gamma[i];
    phases[i].push_back(make_phase(s[i], kInfinity, s[i], start, bernoulli::Dynamics{0.0, 0.0}, steady, true));
  }
  InfiniteProfile out = assemble(game, d, atom, x, std::move(phases));
  out.kind = "type2";
  out.branch = branch;
  out.absorption = s;
  out.steady_rates = chi;
  return out;
}

double max_drift(const InfiniteProfile& profile, const std::vector<double>& grid) {
  double worst = -kInfinity;
  for (const PlayerPath& path : profile.profile.player) {
    for (double t : grid) {
      for (const Phase& p : path.phases()) {
        if (t >= p.start && t < p.end) {
          worst = std::max(worst, bernoulli::rate(p.dyn, path.reputation(t)));
          break;
        }
      }
    }
  }
  return worst;
}

double absorption_gap(const InfiniteProfile& profile) {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double t = profile.absorption[i];
    if (!std::isfinite(t)) continue;
    const double theta = profile.profile.derived.challenge_threshold[i];
    const PlayerPath& path = profile.profile.player[i];
    for (const Phase& p : path.phases()) {
      if (p.end == t) worst = std::max(worst, std::abs(bernoulli::evolve(p.dyn, p.anchor_value, t - p.anchor_time) - theta));
    }
    worst = std::max(worst, std::abs(path.reputation(t) - theta));
  }
  return worst;
}

}  // namespace attrition::twosided
