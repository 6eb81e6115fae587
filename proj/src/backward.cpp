#include "attrition/backward.hpp"

#include <algorithm>
#include <cmath>

#include "attrition/errors.hpp"

namespace attrition {

namespace {

// Value approached by a segment run backward forever.
double backward_limit(const bernoulli::Dynamics& dyn) {
  if (dyn.quadratic == 0.0) return 0.0;
  const double p = bernoulli::fixed_point(dyn);
  return std::max(0.0, p);
}

}  // namespace

BackwardCurve::BackwardCurve(const TwoSidedGame& game, const TwoSidedDerived& derived) {
  for (int i = 0; i < 2; ++i) {
    Segment seg;
    seg.dyn = quiet_dynamics(derived, game, i);
    segments_[i].push_back(seg);
  }
  std::array<bool, 2> pending{game.gamma[0] > 0.0, game.gamma[1] > 0.0};
  for (;;) {
    std::array<double, 2> when{kInfinity, kInfinity};
    for (int i = 0; i < 2; ++i) {
      if (pending[i]) when[i] = time_at(1 - i, derived.challenge_threshold[1 - i]);
    }
    // Ties go to the lower index.
    const int next = when[1] < when[0] ? 1 : 0;
    const double s = when[next];
    if (!std::isfinite(s)) break;
    const double value = reputation(next, s);
    segments_[next].back().end = s;
    Segment seg;
    seg.begin = s;
    seg.anchor_s = s;
    seg.anchor_value = value;
    seg.dyn = challenge_dynamics(derived, game, next);
    seg.intensity = challenge_intensity(derived, game, next);
    seg.challenging = true;
    segments_[next].push_back(seg);
    switch_time_[next] = s;
    pending[next] = false;
  }
}

double BackwardCurve::segment_value(const Segment& seg, double s) const {
  if (std::isinf(s)) return backward_limit(seg.dyn);
  return bernoulli::evolve(seg.dyn, seg.anchor_value, -(s - seg.anchor_s));
}

double BackwardCurve::reputation(int i, double s) const {
  for (const Segment& seg : segments_[i]) {
    if (s < seg.end) return segment_value(seg, std::max(s, seg.begin));
  }
  return backward_limit(segments_[i].back().dyn);
}

double BackwardCurve::floor(int i) const { return backward_limit(segments_[i].back().dyn); }

double BackwardCurve::time_at(int i, double mu) const {
  if (mu >= 1.0) return 0.0;
  for (const Segment& seg : segments_[i]) {
    const double bottom = segment_value(seg, seg.end);
    const bool inside = std::isinf(seg.end) ? mu > bottom : mu >= bottom;
    if (!inside) continue;
    if (mu >= seg.anchor_value) return seg.anchor_s;
    try {
      return seg.anchor_s + bernoulli::hitting_time(seg.dyn, mu, seg.anchor_value);
    } catch (const Unreachable&) {
      // mu rounds onto the fixed point the segment decays towards.
      return kInfinity;
    }
  }
  return kInfinity;
}

double atom_for(double prior, double target) {
  return 1.0 - (prior / (1.0 - prior)) / (target / (1.0 - target));
}

double posterior_after(double prior, double atom) { return prior / (prior + (1.0 - prior) * (1.0 - atom)); }

Placement place_on_curve(const BackwardCurve& curve, const std::array<double, 2>& prior) {
  Placement out;
  const double s2 = curve.time_at(1, prior[1]);
  if (std::isfinite(s2)) {
    const double c1 = curve.reputation(0, s2);
    if (std::abs(prior[0] - c1) <= 1e-12 * c1) {
      out.horizon = s2;
      return out;
    }
    if (prior[0] < c1) {
      out.atom[0] = atom_for(prior[0], c1);
      out.loser = 0;
      out.horizon = s2;
      return out;
    }
  }
  const double s1 = curve.time_at(0, prior[0]);
  if (!std::isfinite(s1)) throw RegimeMismatch("neither prior can be placed on the finite-horizon curve");
  const double c2 = curve.reputation(1, s1);
  out.atom[1] = atom_for(prior[1], c2);
  out.loser = 1;
  out.horizon = s1;
  return out;
}

Profile finite_profile(const TwoSidedGame& game) {
  Profile profile;
  profile.game = game;
  profile.derived = derive_two_sided(game);
  const BackwardCurve curve(game, profile.derived);
  const Placement place = place_on_curve(curve, game.z);
  const double horizon = place.horizon;
  for (int i = 0; i < 2; ++i) {
    std::vector<Phase> phases;
    const auto& segs = curve.segments(i);
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
      if (!(it->begin < horizon)) continue;
      Phase p;
      p.start = std::max(0.0, horizon - it->end);
      p.end = horizon - it->begin;
      p.anchor_time = horizon - it->anchor_s;
      p.anchor_value = it->anchor_value;
      p.dyn = it->dyn;
      p.intensity = it->intensity;
      p.challenging = it->challenging;
      phases.push_back(p);
    }
    profile.player[i] = PlayerPath(game.z[i], place.atom[i], profile.derived.concession_rate[i], game.gamma[i],
                                   horizon, std::move(phases));
  }
  profile.horizon = horizon;
  profile.payoff = closed_form_payoffs(game, profile.derived.overlap, place.atom);
  return profile;
}

}  // namespace attrition
