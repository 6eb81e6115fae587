#include "attrition/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>

#include "attrition/errors.hpp"
#include "attrition/parallel.hpp"

namespace attrition::montecarlo {

namespace {

constexpr std::size_t kBlock = 1000;
constexpr std::size_t kMaxBins = 200000;

enum class Act { none, concede, challenge };

struct Plan {
  Act act = Act::none;
  double time = kInfinity;
};

// Sufficient statistics of one block of replications.
struct Tally {
  std::array<std::size_t, ending_count> ending{}, at_zero{};
  std::array<double, 2> sum{}, sum_sq{};
  std::array<std::size_t, 2> strategic{};
  std::vector<std::size_t> ended, ended_just1, ended_just2, resolutions;
  std::vector<std::array<std::size_t, 2>> concessions, challenges;
  std::vector<double> partial;
  std::size_t started = 0;                 // games alive after time 0
  std::array<std::size_t, 2> started_just{};

  explicit Tally(std::size_t bins)
      : ended(bins), ended_just1(bins), ended_just2(bins), resolutions(bins), concessions(bins), challenges(bins),
        partial(bins) {}

  void merge(const Tally& o) {
    for (int e = 0; e < ending_count; ++e) {
      ending[e] += o.ending[e];
      at_zero[e] += o.at_zero[e];
    }
    for (int i = 0; i < 2; ++i) {
      sum[i] += o.sum[i];
      sum_sq[i] += o.sum_sq[i];
      strategic[i] += o.strategic[i];
      started_just[i] += o.started_just[i];
    }
    started += o.started;
    for (std::size_t k = 0; k < ended.size(); ++k) {
      ended[k] += o.ended[k];
      ended_just1[k] += o.ended_just1[k];
      ended_just2[k] += o.ended_just2[k];
      resolutions[k] += o.resolutions[k];
      partial[k] += o.partial[k];
      for (int i = 0; i < 2; ++i) {
        concessions[k][i] += o.concessions[k][i];
        challenges[k][i] += o.challenges[k][i];
      }
    }
  }
};

class Sampler {
 public:
  Sampler(const Profile& profile, const SimConfig& cfg) : profile_(profile), cfg_(cfg) {
    for (int i = 0; i < 2; ++i) {
      const PlayerPath& path = profile_.player[i];
      limit_[i] = std::min(cfg_.time_cap, path.horizon());
      floor_[i] = limit_[i] < path.horizon() ? path.survival(limit_[i]) : 0.0;
    }
  }

  // Strategic plan: the time-0 atom, else the exit time by inverting survival,
  // split between conceding and challenging by their densities.
  Plan strategic(int i, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PlayerPath& path = profile_.player[i];
    const double u = unit(rng);
    if (u < path.atom()) return {Act::concede, 0.0};
    const double target = 1.0 - u;
    if (target <= floor_[i]) return {};
    double t = limit_[i];
    if (target < path.survival(0.0)) {
      auto f = [&](double s) { return path.survival(s) - target; };
      boost::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, 0.0, limit_[i], path.survival(0.0) - target,
                                                       floor_[i] - target,
                                                       boost::math::tools::eps_tolerance<double>(50), iters);
      t = 0.5 * (r.first + r.second);
    } else {
      t = 0.0;
    }
    const double g = path.challenge_density(t);
    const double f = path.concede_density(t);
    const bool challenge = g > 0.0 && unit(rng) * (f + g) < g;
    return {challenge ? Act::challenge : Act::concede, t};
  }

  Plan justified(int i, std::mt19937_64& rng) const {
    const double gamma = profile_.game.gamma[i];
    if (!(gamma > 0.0)) return {};
    std::exponential_distribution<double> wait(gamma);
    return {Act::challenge, wait(rng)};
  }

 private:
  const Profile& profile_;
  const SimConfig& cfg_;
  std::array<double, 2> limit_{}, floor_{};
};

struct Result {
  Ending ending = censored;
  double time = kInfinity;
  std::array<double, 2> share{};
  int actor = -1;
};

Result play(const Profile& profile, const std::array<bool, 2>& justified, const std::array<Plan, 2>& plan,
            std::mt19937_64& rng) {
  const TwoSidedGame& g = profile.game;
  const double d = profile.derived.overlap;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Result r;
  const double t = std::min(plan[0].time, plan[1].time);
  if (!std::isfinite(t)) return r;
  r.time = t;
  std::array<bool, 2> moves{plan[0].time == t, plan[1].time == t};
  if (moves[0] && moves[1]) {
    const bool c0 = plan[0].act == Act::concede, c1 = plan[1].act == Act::concede;
    if (c0 && c1) {
      // Simultaneous concessions split the disagreement equally.
      r.ending = unit(rng) < 0.5 ? concede_1 : concede_2;
      r.actor = r.ending == concede_1 ? 0 : 1;
      for (int i = 0; i < 2; ++i) r.share[i] = 0.5 * (g.a[i] + 1.0 - g.a[1 - i]);
      return r;
    }
    if (c0 != c1) {
      moves[c0 ? 1 : 0] = false;  // concession beats a challenge at the same instant
    } else {
      moves[unit(rng) < 0.5 ? 1 : 0] = false;
    }
  }
  const int i = moves[0] ? 0 : 1;
  const int j = 1 - i;
  r.actor = i;
  if (plan[i].act == Act::concede) {
    r.ending = i == 0 ? concede_1 : concede_2;
    r.share[i] = 1.0 - g.a[j];
    r.share[j] = g.a[j];
    return r;
  }
  const bool yields = !justified[j] && unit(rng) < profile.yield_probability(j, t);
  r.share[i] = -g.c[i] * d;
  if (yields) {
    r.ending = i == 0 ? challenge_1_yield : challenge_2_yield;
    r.share[i] += g.a[i];
    r.share[j] = 1.0 - g.a[i];
    return r;
  }
  r.ending = i == 0 ? challenge_1_court : challenge_2_court;
  r.share[j] = -g.k[j] * d;
  if (justified[i] && justified[j]) {
    r.share[i] += 0.5 * (g.a[i] + 1.0 - g.a[j]);
    r.share[j] += 0.5 * (g.a[j] + 1.0 - g.a[i]);
  } else if (justified[i]) {
    r.share[i] += g.a[i];
    r.share[j] += 1.0 - g.a[i];
  } else if (justified[j]) {
    r.share[i] += 1.0 - g.a[j];
    r.share[j] += g.a[j];
  } else {
    r.share[i] += 1.0 - g.a[j] + g.w[i] * d;
    r.share[j] += 1.0 - g.a[i] + (1.0 - g.w[i]) * d;
  }
  return r;
}

Tally run_block(const Profile& profile, const SimConfig& cfg, const Sampler& sampler, std::size_t block,
                std::size_t count, std::size_t bins) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Tally tally(bins);
  for (std::size_t n = 0; n < count; ++n) {
    std::array<bool, 2> justified{};
    std::array<Plan, 2> plan;
    for (int i = 0; i < 2; ++i) {
      justified[i] = unit(rng) < profile.game.z[i];
      plan[i] = justified[i] ? sampler.justified(i, rng) : sampler.strategic(i, rng);
    }
    Result r = play(profile, justified, plan, rng);
    if (r.time > cfg.time_cap) {
      r = Result{};
    }
    tally.ending[r.ending] += 1;
    for (int i = 0; i < 2; ++i) {
      if (justified[i]) continue;
      const double value = std::isfinite(r.time) ? std::exp(-profile.game.r[i] * r.time) * r.share[i] : 0.0;
      tally.sum[i] += value;
      tally.sum_sq[i] += value * value;
      tally.strategic[i] += 1;
    }
    if (r.time == 0.0) {
      tally.at_zero[r.ending] += 1;
      continue;
    }
    tally.started += 1;
    for (int i = 0; i < 2; ++i) tally.started_just[i] += justified[i] ? 1 : 0;
    const double end = std::min(r.time, cfg.time_cap);
    const std::size_t k = std::min(bins - 1, static_cast<std::size_t>(end / cfg.bin_width));
    if (end >= cfg.bin_width * static_cast<double>(bins)) continue;  // runs past the last bin
    tally.ended[k] += 1;
    tally.ended_just1[k] += justified[0] ? 1 : 0;
    tally.ended_just2[k] += justified[1] ? 1 : 0;
    tally.partial[k] += end - cfg.bin_width * static_cast<double>(k);
    if (r.ending != censored) {
      tally.resolutions[k] += 1;
      if (r.ending == concede_1 || r.ending == concede_2) {
        tally.concessions[k][r.actor] += 1;
      } else {
        tally.challenges[k][r.actor] += 1;
      }
    }
  }
  return tally;
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.replications < 1) throw InvalidGame("replications >= 1 required");
  if (!(cfg.time_cap > 0.0) || !std::isfinite(cfg.time_cap)) throw InvalidGame("time_cap > 0 required");
  if (!(cfg.bin_width > 0.0)) throw InvalidGame("bin_width > 0 required");
}

std::string ending_name(int ending) {
  static const char* names[] = {"concede_1",         "concede_2",         "challenge_1_yield", "challenge_1_court",
                                "challenge_2_yield", "challenge_2_court", "censored"};
  return ending >= 0 && ending < ending_count ? names[ending] : "unknown";
}

SimReport simulate(const Profile& profile, const SimConfig& cfg) {
  validate(cfg);
  const std::size_t bins =
      std::min(kMaxBins, static_cast<std::size_t>(std::ceil(cfg.time_cap / cfg.bin_width - 1e-9)));
  const Sampler sampler(profile, cfg);
  const std::size_t blocks = (cfg.replications + kBlock - 1) / kBlock;
  std::vector<Tally> parts(blocks, Tally(0));
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t count = std::min(kBlock, cfg.replications - b * kBlock);
    parts[b] = run_block(profile, cfg, sampler, b, count, bins);
  });
  Tally total(bins);
  for (const Tally& t : parts) total.merge(t);

  SimReport rep;
  rep.replications = cfg.replications;
  const double n = static_cast<double>(cfg.replications);
  for (int e = 0; e < ending_count; ++e) {
    rep.ending[e] = static_cast<double>(total.ending[e]) / n;
    rep.at_zero[e] = static_cast<double>(total.at_zero[e]) / n;
  }
  for (int i = 0; i < 2; ++i) {
    Estimate& est = rep.payoff[i];
    est.count = total.strategic[i];
    if (est.count == 0) continue;
    const double m = total.sum[i] / static_cast<double>(est.count);
    est.mean = m;
    if (est.count > 1) {
      const double var = (total.sum_sq[i] - static_cast<double>(est.count) * m * m) / static_cast<double>(est.count - 1);
      est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(est.count));
    }
  }
  rep.truncation_bound = std::exp(-std::min(profile.game.r[0], profile.game.r[1]) * cfg.time_cap);

  std::size_t alive = total.started;
  std::array<std::size_t, 2> alive_just = total.started_just;
  rep.bins.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    SimBin& b = rep.bins[k];
    b.start = cfg.bin_width * static_cast<double>(k);
    b.end = std::min(cfg.time_cap, b.start + cfg.bin_width);
    b.at_risk = alive;
    b.justified = alive_just;
    b.exposure = cfg.bin_width * static_cast<double>(alive - total.ended[k]) + total.partial[k];
    b.resolutions = total.resolutions[k];
    b.concessions = total.concessions[k];
    b.challenges = total.challenges[k];
    alive -= total.ended[k];
    alive_just[0] -= total.ended_just1[k];
    alive_just[1] -= total.ended_just2[k];
  }
  if (cfg.audit_points > 0) {
    const double horizon = std::isfinite(profile.horizon) ? profile.horizon : cfg.time_cap;
    rep.audit = attrition::best_response_audit(profile, audit_grid(horizon, cfg.audit_points));
  }
  return rep;
}

AuditReport best_response_audit(const Profile& profile, const std::vector<double>& grid) {
  return attrition::best_response_audit(profile, grid);
}

std::vector<HazardBin> empirical_hazard(const std::vector<double>& durations, const std::vector<bool>& censored,
                                        double bin_width) {
  if (durations.empty()) throw EmptyInput("no durations");
  if (!(bin_width > 0.0)) throw InvalidGame("bin_width > 0 required");
  if (censored.size() != durations.size()) throw InvalidGame("one censoring flag per duration required");
  double longest = 0.0;
  for (double d : durations) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidGame("durations must be finite and nonnegative");
    longest = std::max(longest, d);
  }
  const std::size_t bins = static_cast<std::size_t>(longest / bin_width) + 1;
  if (bins > kMaxBins) throw InvalidGame("bin_width too small for the longest duration");
  std::vector<std::size_t> leaving(bins), events(bins);
  for (std::size_t n = 0; n < durations.size(); ++n) {
    const std::size_t k = std::min(bins - 1, static_cast<std::size_t>(durations[n] / bin_width));
    leaving[k] += 1;
    if (!censored[n]) events[k] += 1;
  }
  std::vector<HazardBin> out(bins);
  std::size_t alive = durations.size();
  for (std::size_t k = 0; k < bins; ++k) {
    HazardBin& b = out[k];
    b.start = bin_width * static_cast<double>(k);
    b.end = b.start + bin_width;
    b.at_risk = alive;
    b.events = events[k];
    if (alive > 0) b.hazard = static_cast<double>(b.events) / (static_cast<double>(alive) * bin_width);
    alive -= leaving[k];
  }
  return out;
}

namespace {

std::size_t events_of(const SimBin& b, const std::string& kind) {
  if (kind == "resolution") return b.resolutions;
  if (kind == "challenge1") return b.challenges[0];
  if (kind == "challenge2") return b.challenges[1];
  if (kind == "concede1") return b.concessions[0];
  if (kind == "concede2") return b.concessions[1];
  throw InvalidGame("unknown event kind '" + kind + "'");
}

}  // namespace

std::vector<HazardBin> bin_hazard(const SimReport& report, const std::string& kind) {
  std::vector<HazardBin> out;
  for (const SimBin& b : report.bins) {
    HazardBin h;
    h.start = b.start;
    h.end = b.end;
    h.at_risk = b.at_risk;
    h.events = events_of(b, kind);
    if (b.exposure > 0.0) h.hazard = static_cast<double>(h.events) / b.exposure;
    out.push_back(h);
  }
  return out;
}

FlatnessTest flat_hazard_test(const SimReport& report, const std::string& kind, double rate, double from,
                              double to) {
  FlatnessTest out;
  double observed = 0.0, expected = 0.0;
  for (const SimBin& b : report.bins) {
    if (b.start < from || b.end > to) continue;
    observed += static_cast<double>(events_of(b, kind));
    expected += rate * b.exposure;
    if (expected < 5.0) continue;
    out.statistic += (observed - expected) * (observed - expected) / expected;
    out.dof += 1;
    observed = expected = 0.0;
  }
  if (out.dof == 0) return out;
  const boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

double posterior_z_score(const SimReport& report, const Profile& profile, int player, double from, double to,
                         std::size_t min_count) {
  if (player != 1 && player != 2) throw InvalidGame("player must be 1 or 2");
  const int idx = player - 1;
  double worst = 0.0;
  for (const SimBin& b : report.bins) {
    if (b.start < from || b.start >= to || b.at_risk < min_count) continue;
    const double mu = profile.reputation(idx, b.start);
    if (!(mu > 0.0 && mu < 1.0)) continue;
    const double n = static_cast<double>(b.at_risk);
    const double frac = static_cast<double>(b.justified[idx]) / n;
    worst = std::max(worst, std::abs(frac - mu) / std::sqrt(mu * (1.0 - mu) / n));
  }
  return worst;
}

}  // namespace attrition::montecarlo
