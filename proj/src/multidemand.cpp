#include "attrition/multidemand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "attrition/backward.hpp"
#include "attrition/errors.hpp"
#include "attrition/parallel.hpp"

namespace attrition::multidemand {

namespace {

constexpr int kMaxBisection = 200;
constexpr int kAuditGrid = 200;
constexpr double kMassTolerance = 1e-13;

double overlap(double a1, double a2) { return a1 + a2 - 1.0; }

// a2 = 1 - a1 counts as accepting a1.
bool compatible(double a1, double a2) { return overlap(a1, a2) <= 1e-12; }

std::size_t index_of(const std::vector<double>& grid, double v) {
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (grid[n] == v) return n;
  }
  throw InvalidGame("demand " + std::to_string(v) + " is not on the grid");
}

// Player 2's reputation on the curve at player 1's reputation mu1; zero at or
// below the asymptote, where the curve never gets.
double curve_partner(const onesided::CoevolutionCurve& curve, double mu1) {
  if (!(mu1 > curve.asymptote())) return 0.0;
  return curve.player2_at(std::min(mu1, 1.0));
}

double mimic_from_posterior(const MultiDemandGame& g, std::size_t i2, double y) {
  return g.z2 * g.prior2[i2] * (1.0 / y - 1.0) / (1.0 - g.z2);
}

double cap_of(const PairCurves& curves, std::size_t i1, std::size_t i2, double x) {
  const auto* curve = curves.at(i1, i2);
  if (curve == nullptr) return 0.0;
  const double y = curve_partner(*curve, x);
  if (!(y > 0.0)) return 1.0;
  return std::clamp(mimic_from_posterior(curves.game(), i2, y), 0.0, 1.0);
}

// Mimic probability of demand i2 that gives strategic player 2 exactly `level`.
double mimic_at_level(const PairCurves& curves, std::size_t i1, std::size_t i2, double x, double level, double cap) {
  const auto* curve = curves.at(i1, i2);
  if (curve == nullptr) return 0.0;
  const MultiDemandGame& g = curves.game();
  const double a1 = g.demands1[i1];
  const double q = (level - (1.0 - a1)) / ((1.0 - x) * overlap(a1, g.demands2[i2]));
  if (q <= 0.0) return cap;
  if (q >= 1.0) return 0.0;
  const double y = curve_partner(*curve, posterior_after(x, q));
  if (!(y > 0.0)) return cap;
  return std::clamp(mimic_from_posterior(g, i2, y), 0.0, cap);
}

void fill_details(const PairCurves& curves, std::size_t i1, MimicDistribution& m) {
  const MultiDemandGame& g = curves.game();
  const std::size_t n2 = g.demands2.size();
  m.posterior2.assign(n2, 1.0);
  m.posterior1.assign(n2, m.x);
  m.atom1.assign(n2, 0.0);
  m.payoff2.assign(n2, 0.0);
  for (std::size_t i2 = 0; i2 < n2; ++i2) {
    const double a2 = g.demands2[i2];
    const auto* curve = curves.at(i1, i2);
    if (curve == nullptr) {
      m.payoff2[i2] = a2;
      continue;
    }
    const double y = demand_posterior(g, i2, m.sigma[i2]);
    m.posterior2[i2] = y;
    const double target = y >= 1.0 ? 1.0 : curve->player1_at(y);
    m.posterior1[i2] = std::max(target, m.x);
    m.atom1[i2] = target >= 1.0 ? 1.0 : std::max(0.0, atom_for(m.x, target));
    m.payoff2[i2] = 1.0 - m.a1 + (1.0 - m.x) * m.atom1[i2] * overlap(m.a1, a2);
  }
}

}  // namespace

PairCurves::PairCurves(const MultiDemandGame& game) : game_(game) {
  validate(game);
  curves_.resize(game.demands1.size());
  for (std::size_t i1 = 0; i1 < game.demands1.size(); ++i1) {
    curves_[i1].resize(game.demands2.size());
    for (std::size_t i2 = 0; i2 < game.demands2.size(); ++i2) {
      const double a1 = game.demands1[i1];
      const double a2 = game.demands2[i2];
      if (!compatible(a1, a2)) {
        curves_[i1][i2] = std::make_unique<onesided::CoevolutionCurve>(pair_game(game, a1, a2));
      }
    }
  }
}

const onesided::CoevolutionCurve* PairCurves::at(std::size_t i1, std::size_t i2) const {
  return curves_[i1][i2].get();
}

double time_to_one(const MultiDemandGame& game, double a1, double a2, double x) {
  const onesided::CoevolutionCurve curve(pair_game(game, a1, a2));
  if (!(x > curve.asymptote())) return kInfinity;
  return curve.backward().time_at(0, x);
}

double time_to_one_2(const MultiDemandGame& game, double a1, double a2, double y) {
  return -overlap(a1, a2) / (game.r1 * (1.0 - a2)) * std::log(y);
}

double sigma_bar(const MultiDemandGame& game, double a1, double a2, double x) {
  if (compatible(a1, a2)) return 0.0;
  const onesided::CoevolutionCurve curve(pair_game(game, a1, a2));
  const double y = curve_partner(curve, x);
  if (!(y > 0.0)) return 1.0;
  const std::size_t i2 = index_of(game.demands2, a2);
  return std::clamp(mimic_from_posterior(game, i2, y), 0.0, 1.0);
}

double demand_posterior(const MultiDemandGame& game, std::size_t i2, double sigma) {
  const double justified = game.z2 * game.prior2[i2];
  return justified / (justified + (1.0 - game.z2) * sigma);
}

MimicDistribution solve_sigma2(const PairCurves& curves, std::size_t i1, double x, const SolverOptions& opts) {
  const MultiDemandGame& g = curves.game();
  const std::size_t n2 = g.demands2.size();
  MimicDistribution m;
  m.a1 = g.demands1[i1];
  m.x = x;
  m.sigma.assign(n2, 0.0);
  m.cap.assign(n2, 0.0);
  if (x >= 1.0) {
    m.sigma_accept = 1.0;
    m.level = 1.0 - m.a1;
    fill_details(curves, i1, m);
    return m;
  }
  double cap_total = 0.0;
  for (std::size_t i2 = 0; i2 < n2; ++i2) {
    m.cap[i2] = cap_of(curves, i1, i2, x);
    cap_total += m.cap[i2];
  }
  if (cap_total < 1.0) {
    m.sigma = m.cap;
    m.sigma_accept = 1.0 - cap_total;
    m.level = 1.0 - m.a1;
    fill_details(curves, i1, m);
    return m;
  }

  auto masses = [&](double level) {
    std::vector<double> sigma(n2);
    for (std::size_t i2 = 0; i2 < n2; ++i2) sigma[i2] = mimic_at_level(curves, i1, i2, x, level, m.cap[i2]);
    return sigma;
  };
  auto sum = [](const std::vector<double>& v) {
    double total = 0.0;
    for (double s : v) total += s;
    return total;
  };
  double lo = 1.0 - m.a1;
  double hi = 1.0 - m.a1 + (1.0 - x) * overlap(m.a1, g.demands2.back());
  std::vector<double> sigma_lo = m.cap, sigma_hi(n2, 0.0);
  std::mt19937_64 rng(opts.seed.value_or(0));
  std::uniform_real_distribution<double> split(0.1, 0.9);
  int step = 0;
  for (; step < kMaxBisection; ++step) {
    const double frac = opts.seed && step < 8 ? split(rng) : 0.5;
    const double level = lo + frac * (hi - lo);
    if (!(level > lo && level < hi)) break;
    std::vector<double> sigma = masses(level);
    if (sum(sigma) >= 1.0 - kMassTolerance) {
      lo = level;
      sigma_lo = std::move(sigma);
    } else {
      hi = level;
      sigma_hi = std::move(sigma);
    }
  }
  m.iterations = step;
  m.level = lo;
  m.sigma = sigma_lo;
  if (sum(sigma_lo) > 1.0 + kMassTolerance) {
    // The bracket is down to adjacent doubles; a demand whose curve is vertical
    // there jumps between its end values, so interpolate the masses.
    const double over = sum(sigma_lo), under = sum(sigma_hi);
    const double weight = (1.0 - under) / (over - under);
    for (std::size_t i2 = 0; i2 < n2; ++i2) m.sigma[i2] = sigma_hi[i2] + weight * (sigma_lo[i2] - sigma_hi[i2]);
  }
  const double total = sum(m.sigma);
  m.residual = std::abs(total - 1.0);
  if (m.residual > 1e-11) {
    throw ConvergenceFailure("mimic masses sum to " + std::to_string(total) + " at x = " + std::to_string(x) +
                             " after " + std::to_string(step) + " steps");
  }
  fill_details(curves, i1, m);
  return m;
}

MimicDistribution solve_sigma2(const MultiDemandGame& game, double a1, double x) {
  MultiDemandGame single = game;
  single.demands1 = {a1};
  single.prior1 = {1.0};
  const PairCurves curves(single);
  return solve_sigma2(curves, 0, x);
}

double player1_payoff(const PairCurves& curves, const MimicDistribution& m) {
  const MultiDemandGame& g = curves.game();
  double strategic = m.sigma_accept * m.a1;
  double justified = 0.0;
  for (std::size_t i2 = 0; i2 < g.demands2.size(); ++i2) {
    const double a2 = g.demands2[i2];
    strategic += m.sigma[i2] * (1.0 - a2);
    justified += g.prior2[i2] * (compatible(m.a1, a2) ? m.a1 : 1.0 - a2);
  }
  return (1.0 - g.z2) * strategic + g.z2 * justified;
}

double player1_payoff(const PairCurves& curves, std::size_t i1, double x) {
  return player1_payoff(curves, solve_sigma2(curves, i1, x));
}

namespace {

double posterior1(const MultiDemandGame& g, std::size_t i1, double sigma) {
  const double justified = g.z1 * g.prior1[i1];
  return justified / (justified + (1.0 - g.z1) * sigma);
}

double sigma_from_posterior1(const MultiDemandGame& g, std::size_t i1, double x) {
  return std::clamp(g.z1 * g.prior1[i1] * (1.0 / x - 1.0) / (1.0 - g.z1), 0.0, 1.0);
}

struct PayoffProfile {
  std::vector<double> x, u;
  double flat = 0.0, flat_end = 0.0, top = 0.0;
  bool monotone = true;
};

// u1 on a log-spaced posterior grid, with the end of the flat stretch located.
PayoffProfile profile_payoffs(const PairCurves& curves, std::size_t i1) {
  const MultiDemandGame& g = curves.game();
  PayoffProfile p;
  const double x_min = posterior1(g, i1, 1.0);
  for (int k = 0; k < kAuditGrid; ++k) {
    const double x = k + 1 == kAuditGrid ? 1.0 : std::exp(std::log(x_min) * (1.0 - static_cast<double>(k) / (kAuditGrid - 1)));
    p.x.push_back(x);
    p.u.push_back(player1_payoff(curves, i1, x));
  }
  p.flat = p.u.front();
  p.top = p.u.back();
  const double tol = 1e-12 * std::max(1.0, std::abs(p.flat));
  for (std::size_t k = 1; k < p.u.size(); ++k) {
    if (p.u[k] < p.u[k - 1] - tol) p.monotone = false;
  }
  std::size_t k = 1;
  while (k < p.u.size() && p.u[k] <= p.flat + tol) ++k;
  if (k == p.u.size()) {
    p.flat_end = 1.0;
    return p;
  }
  double lo = p.x[k - 1], hi = p.x[k];
  for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (player1_payoff(curves, i1, mid) <= p.flat + tol ? lo : hi) = mid;
  }
  p.flat_end = lo;
  return p;
}

// Largest mimic probability of demand i1 at which player 1 still earns level.
double mimic_for_level(const PairCurves& curves, std::size_t i1, const PayoffProfile& p, double level) {
  const MultiDemandGame& g = curves.game();
  if (level <= p.flat) return 1.0;
  if (level > p.top) return 0.0;
  std::size_t k = 1;
  while (k < p.u.size() && p.u[k] < level) ++k;
  double lo = std::max(p.x[k - 1], p.flat_end);
  double hi = p.x[std::min(k, p.u.size() - 1)];
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (player1_payoff(curves, i1, mid) >= level ? hi : lo) = mid;
  }
  return sigma_from_posterior1(g, i1, hi);
}

// Where u1 is vertical at the resolution of doubles, the posterior that pays
// exactly `level` lies between two adjacent doubles. Player 2 is indifferent
// across the two mimic distributions, so mix them to hit the level.
MimicDistribution settle(const PairCurves& curves, std::size_t i1, double x, double level, const SolverOptions& opts) {
  MimicDistribution m = solve_sigma2(curves, i1, x, opts);
  const double u = player1_payoff(curves, m);
  if (std::abs(u - level) <= 1e-12 * std::max(1.0, std::abs(level))) return m;
  const double toward = u > level ? 0.0 : 1.0;
  double xn = x;
  for (int step = 0; step < 8; ++step) {
    xn = std::nextafter(xn, toward);
    if (xn <= 0.0 || xn >= 1.0) break;
    const MimicDistribution n = solve_sigma2(curves, i1, xn, opts);
    const double un = player1_payoff(curves, n);
    if ((un - level) * (u - level) > 0.0) continue;
    const double w = (level - un) / (u - un);
    MimicDistribution mix = m;
    for (std::size_t i2 = 0; i2 < mix.sigma.size(); ++i2) mix.sigma[i2] = w * m.sigma[i2] + (1.0 - w) * n.sigma[i2];
    mix.sigma_accept = w * m.sigma_accept + (1.0 - w) * n.sigma_accept;
    mix.level = w * m.level + (1.0 - w) * n.level;
    fill_details(curves, i1, mix);
    return mix;
  }
  return m;
}

}  // namespace

Outcome outcome_of(const MultiDemandGame& g, const std::vector<DemandChoice>& choices) {
  Outcome out;
  for (std::size_t i1 = 0; i1 < choices.size(); ++i1) {
    const DemandChoice& c = choices[i1];
    const MimicDistribution& m = c.mimic;
    const double announce1 = g.z1 * g.prior1[i1] + (1.0 - g.z1) * c.sigma;
    double accept = (1.0 - g.z2) * m.sigma_accept;
    for (std::size_t i2 = 0; i2 < g.demands2.size(); ++i2) {
      const double a2 = g.demands2[i2];
      if (compatible(c.a1, a2)) {
        accept += g.z2 * g.prior2[i2];
        continue;
      }
      PairOutcome pair;
      pair.a1 = c.a1;
      pair.a2 = a2;
      pair.announce = announce1 * (g.z2 * g.prior2[i2] + (1.0 - g.z2) * m.sigma[i2]);
      const double concede = (1.0 - c.posterior) * m.atom1[i2];
      pair.immediate = pair.announce * concede;
      pair.attrition = pair.announce * (1.0 - concede);
      out.agreement += pair.immediate;
      if (pair.immediate > 0.0) out.split[1.0 - a2] += pair.immediate;
      out.pairs.push_back(pair);
    }
    out.agreement += announce1 * accept;
    if (announce1 * accept > 0.0) out.split[c.a1] += announce1 * accept;
  }
  return out;
}

MultiDemandSolution solve_game(const MultiDemandGame& game, const SolverOptions& opts) {
  const PairCurves curves(game);
  const std::size_t n1 = game.demands1.size();
  std::vector<PayoffProfile> profiles(n1);
  parallel_for(n1, [&](std::size_t i1) { profiles[i1] = profile_payoffs(curves, i1); });

  auto masses = [&](double level) {
    std::vector<double> sigma(n1);
    parallel_for(n1, [&](std::size_t i1) { sigma[i1] = mimic_for_level(curves, i1, profiles[i1], level); });
    return sigma;
  };
  auto sum = [](const std::vector<double>& v) {
    double total = 0.0;
    for (double s : v) total += s;
    return total;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const PayoffProfile& p : profiles) {
    lo = std::min(lo, p.flat);
    hi = std::max(hi, p.top);
  }
  std::vector<double> sigma_lo(n1, 1.0), sigma_hi(n1, 0.0);
  if (n1 == 1) {
    hi = lo;
  } else {
    sigma_lo = masses(lo);
    for (int it = 0; it < kMaxBisection; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      std::vector<double> sigma = masses(mid);
      if (sum(sigma) >= 1.0) {
        lo = mid;
        sigma_lo = std::move(sigma);
      } else {
        hi = mid;
        sigma_hi = std::move(sigma);
      }
    }
  }
  const double level = lo;

  MultiDemandSolution sol;
  sol.level = level;
  sol.choices.resize(n1);
  std::vector<std::size_t> loose;
  double floor_loose = 0.0, over = 0.0, under = 0.0;
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    DemandChoice& c = sol.choices[i1];
    const PayoffProfile& p = profiles[i1];
    c.a1 = game.demands1[i1];
    c.flat_payoff = p.flat;
    c.flat_end = p.flat_end;
    c.monotone = p.monotone;
    c.degenerate = std::abs(p.flat - level) <= 1e-13 * std::max(1.0, std::abs(level));
    if (c.degenerate) {
      c.sigma = sigma_from_posterior1(game, i1, p.flat_end);
      floor_loose += c.sigma;
      loose.push_back(i1);
    } else {
      over += sigma_lo[i1];
      under += sigma_hi[i1];
    }
  }
  // A demand whose payoff is vertical in the last bracket jumps between the
  // bracket ends; interpolate so the masses add up.
  double weight = 1.0;
  if (over + floor_loose > 1.0 && over > under) weight = std::clamp((1.0 - floor_loose - under) / (over - under), 0.0, 1.0);
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    DemandChoice& c = sol.choices[i1];
    if (!c.degenerate) c.sigma = sigma_hi[i1] + weight * (sigma_lo[i1] - sigma_hi[i1]);
  }
  // Split what is left among the demands whose mixing is not pinned down.
  double left = 1.0 - floor_loose - (under + weight * (over - under));
  if (!loose.empty() && left > 0.0) {
    std::vector<double> share(loose.size(), 1.0);
    if (opts.seed) {
      std::mt19937_64 rng(*opts.seed);
      std::uniform_real_distribution<double> draw(0.05, 1.0);
      for (double& w : share) w = draw(rng);
    }
    std::vector<bool> full(loose.size(), false);
    for (std::size_t round = 0; round < loose.size() && left > 0.0; ++round) {
      double total_share = 0.0;
      for (std::size_t n = 0; n < loose.size(); ++n) {
        if (!full[n]) total_share += share[n];
      }
      double spent = 0.0;
      for (std::size_t n = 0; n < loose.size(); ++n) {
        if (full[n]) continue;
        DemandChoice& c = sol.choices[loose[n]];
        const double add = std::min(left * share[n] / total_share, 1.0 - c.sigma);
        if (add >= 1.0 - c.sigma) full[n] = true;
        c.sigma += add;
        spent += add;
      }
      left -= spent;
    }
  }
  double total = 0.0;
  for (DemandChoice& c : sol.choices) total += c.sigma;
  sol.mass_residual = std::abs(total - 1.0);

  parallel_for(n1, [&](std::size_t i1) {
    DemandChoice& c = sol.choices[i1];
    c.posterior = posterior1(game, i1, c.sigma);
    c.mimic = c.sigma > 0.0 && !c.degenerate ? settle(curves, i1, c.posterior, level, opts)
                                             : solve_sigma2(curves, i1, c.posterior, opts);
    c.payoff = player1_payoff(curves, c.mimic);
  });
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    const DemandChoice& c = sol.choices[i1];
    sol.payoff2 += (game.z1 * game.prior1[i1] + (1.0 - game.z1) * c.sigma) * c.mimic.level;
  }
  sol.outcome = outcome_of(game, sol.choices);
  return sol;
}

RichBounds limit_payoffs_rich(double r1, double r2, double gamma1, int K) {
  if (K < 4) throw InvalidGame("K >= 4 required");
  const double fast = std::max(r1, gamma1);
  return {r2 / (fast + r2) - 1.0 / K, fast / (fast + r2) - 1.0 / K};
}

std::vector<double> rich_grid(int K) {
  if (K < 4) throw InvalidGame("K >= 4 required");
  std::vector<double> grid;
  for (int k = 2; k < K; ++k) grid.push_back(static_cast<double>(k) / K);
  return grid;
}

}  // namespace attrition::multidemand
