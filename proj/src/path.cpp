#include "attrition/profile.hpp"

#include <algorithm>
#include <cmath>

#include "attrition/errors.hpp"
#include "attrition/quadrature.hpp"

namespace attrition {

namespace {

// Integral of e^{-rate s} over [lo, hi].
double discount_integral(double rate, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (rate == 0.0) return hi - lo;
  if (std::isinf(hi)) return std::exp(-rate * lo) / rate;
  return std::exp(-rate * lo) * -std::expm1(-rate * (hi - lo)) / rate;
}

}  // namespace

PlayerPath::PlayerPath(double prior, double atom, double concession_rate, double arrival_rate, double horizon,
                       std::vector<Phase> phases)
    : prior_(prior),
      atom_(atom),
      concession_rate_(concession_rate),
      arrival_rate_(arrival_rate),
      horizon_(horizon),
      phases_(std::move(phases)) {
  if (phases_.empty()) throw DomainError("a reputation path needs at least one phase");
  double acc = 0.0;
  for (const Phase& p : phases_) {
    challenge_before_.push_back(acc);
    acc += p.intensity * discount_integral(arrival_rate_, p.start, std::min(p.end, horizon_));
  }
}

const Phase* PlayerPath::phase_at(double t, bool left_limit) const {
  for (const Phase& p : phases_) {
    if (left_limit ? (t > p.start && t <= p.end) : (t >= p.start && t < p.end)) return &p;
  }
  if (t <= phases_.front().start) return &phases_.front();
  return &phases_.back();
}

double PlayerPath::phase_value(const Phase& p, double t) const {
  return bernoulli::evolve(p.dyn, p.anchor_value, t - p.anchor_time);
}

double PlayerPath::reputation(double t) const {
  if (t >= horizon_) return 1.0;
  return phase_value(*phase_at(std::max(t, 0.0)), std::max(t, 0.0));
}

double PlayerPath::survival(double t) const {
  if (t < 0.0) return 1.0;
  if (t >= horizon_) return 0.0;
  const double mu = reputation(t);
  return prior_ * std::exp(-arrival_rate_ * t) * (1.0 / mu - 1.0) / (1.0 - prior_);
}

double PlayerPath::challenge_cdf(double t) const {
  if (t <= 0.0) return 0.0;
  const double upto = std::min(t, horizon_);
  double acc = 0.0;
  for (std::size_t n = 0; n < phases_.size(); ++n) {
    const Phase& p = phases_[n];
    if (p.start >= upto) break;
    acc = challenge_before_[n] + p.intensity * discount_integral(arrival_rate_, p.start, std::min(upto, p.end));
  }
  return prior_ / (1.0 - prior_) * acc;
}

double PlayerPath::concede_cdf(double t) const {
  if (t < 0.0) return 0.0;
  return 1.0 - challenge_cdf(t) - survival(t);
}

double PlayerPath::concede_density(double t) const {
  if (t <= 0.0 || t >= horizon_) return 0.0;
  return concession_rate_ * prior_ * std::exp(-arrival_rate_ * t) / ((1.0 - prior_) * reputation(t));
}

double PlayerPath::challenge_density(double t) const {
  if (t <= 0.0 || t >= horizon_) return 0.0;
  const Phase* p = phase_at(t);
  if (!p->challenging) return 0.0;
  return p->intensity * prior_ * std::exp(-arrival_rate_ * t) / (1.0 - prior_);
}

double PlayerPath::concede_hazard(double t) const {
  if (t >= horizon_) return 0.0;
  return concession_rate_ / (1.0 - reputation(t));
}

double PlayerPath::challenge_hazard(double t) const {
  if (t >= horizon_) return 0.0;
  const Phase* p = phase_at(std::max(t, 0.0));
  if (!p->challenging) return 0.0;
  const double mu = reputation(t);
  return p->intensity * mu / (1.0 - mu);
}

bool PlayerPath::challenging(double t) const {
  if (t >= horizon_) return false;
  return phase_at(std::max(t, 0.0))->challenging;
}

double PlayerPath::challenge_end() const {
  double last = 0.0;
  for (const Phase& p : phases_) {
    if (p.challenging) last = std::max(last, std::min(p.end, horizon_));
  }
  return last;
}

double PlayerPath::overall_challenge_hazard(double t, bool left_limit) const {
  const bool after = left_limit ? t > horizon_ : t >= horizon_;
  if (after) return arrival_rate_;
  const Phase* p = phase_at(t, left_limit);
  const double mu = phase_value(*p, t);
  return mu * (arrival_rate_ + (p->challenging ? p->intensity : 0.0));
}

double PlayerPath::challenger_posterior(double t) const {
  if (t >= horizon_) return 1.0;
  const Phase* p = phase_at(std::max(t, 0.0));
  const double k = p->challenging ? p->intensity : 0.0;
  if (arrival_rate_ + k == 0.0) return 1.0;
  return arrival_rate_ / (arrival_rate_ + k);
}

std::vector<double> PlayerPath::breakpoints() const {
  std::vector<double> out;
  for (const Phase& p : phases_) {
    if (std::isfinite(p.end) && p.end < horizon_) out.push_back(p.end);
  }
  if (std::isfinite(horizon_)) out.push_back(horizon_);
  return out;
}

double Profile::yield_probability(int defender, double t) const {
  const int challenger = 1 - defender;
  if (!player[challenger].challenging(t)) return yield_scale[defender];
  const double mu = reputation(defender, t);
  if (mu >= 1.0) return yield_scale[defender];
  const double c = game.c[challenger];
  const double w = game.w[challenger];
  const double q = (c / (1.0 - mu) - w) / (1.0 - w);
  return yield_scale[defender] * std::clamp(q, 0.0, 1.0);
}

std::array<double, 2> closed_form_payoffs(const TwoSidedGame& game, double overlap,
                                          const std::array<double, 2>& atoms) {
  std::array<double, 2> u{};
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    u[i] = 1.0 - game.a[j] + (1.0 - game.z[j]) * atoms[j] * overlap;
  }
  return u;
}

HazardSchedule::HazardSchedule(const Profile& profile) : profile_(profile) {
  std::vector<double> times;
  for (const PlayerPath& p : profile_.player) {
    for (double b : p.breakpoints()) times.push_back(b);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times) {
    if (!(t > 0.0)) continue;
    HazardJump jump;
    jump.time = t;
    jump.challenge_left = challenge_side(t, true);
    jump.challenge_right = challenge_side(t, false);
    jump.resolution_left = resolution_side(t, true);
    jump.resolution_right = resolution_side(t, false);
    if (jump.challenge_left == jump.challenge_right && jump.resolution_left == jump.resolution_right) continue;
    if (t == profile_.horizon) {
      jump.label = "horizon";
    } else {
      jump.label = "phase";
      for (int i = 0; i < 2; ++i) {
        if (profile_.player[i].challenging(t - 1e-12 * std::max(1.0, t)) && !profile_.player[i].challenging(t)) {
          jump.label = "challenge_end_" + std::to_string(i + 1);
        }
      }
    }
    jumps_.push_back(jump);
  }
}

double HazardSchedule::challenge_side(double t, bool left) const {
  return profile_.player[0].overall_challenge_hazard(t, left) + profile_.player[1].overall_challenge_hazard(t, left);
}

double HazardSchedule::resolution_side(double t, bool left) const {
  const bool before = left ? t <= profile_.horizon : t < profile_.horizon;
  double r = challenge_side(t, left);
  if (before) r += profile_.derived.concession_rate[0] + profile_.derived.concession_rate[1];
  return r;
}

double HazardSchedule::challenge(double t) const { return challenge_side(t, false); }

double HazardSchedule::resolution(double t) const { return resolution_side(t, false); }

double HazardSchedule::concession(int i, double t) const {
  return t < profile_.horizon ? profile_.derived.concession_rate[i] : 0.0;
}

double bayes_gap(const PlayerPath& path, const std::vector<double>& grid) {
  const double z = path.prior();
  const double g = path.arrival_rate();
  auto density = [&](double s) { return path.concede_density(s); };
  std::vector<double> cuts = path.breakpoints();
  double concede = path.atom();
  double last = 0.0;
  double gap = 0.0;
  for (double t : grid) {
    if (!(t > last)) continue;
    concede += integrate(density, last, t, 1e-11, cuts);
    last = t;
    if (t >= path.horizon()) continue;
    const double justified = z * std::exp(-g * t);
    const double rest = (1.0 - z) * (1.0 - concede - path.challenge_cdf(t));
    const double posterior = justified / (justified + rest);
    gap = std::max(gap, std::abs(posterior - path.reputation(t)));
  }
  return gap;
}

}  // namespace attrition
