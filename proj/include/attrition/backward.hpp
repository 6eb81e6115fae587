#pragma once

#include <array>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/profile.hpp"

namespace attrition {

// Reputation pair traced backward from (1,1). Backward time s = T - t.
class BackwardCurve {
 public:
  struct Segment {
    double begin = 0.0;
    double end = kInfinity;
    double anchor_s = 0.0;
    double anchor_value = 1.0;
    bernoulli::Dynamics dyn;
    double intensity = 0.0;
    bool challenging = false;
  };

  BackwardCurve(const TwoSidedGame& game, const TwoSidedDerived& derived);

  double reputation(int i, double s) const;
  // Backward time at which player i's reputation equals mu; infinity when the
  // curve never gets that low.
  double time_at(int i, double mu) const;
  // Infimum of player i's reputation along the curve.
  double floor(int i) const;
  // Backward time at which player i starts challenging (infinity if never).
  double switch_time(int i) const { return switch_time_[i]; }
  const std::vector<Segment>& segments(int i) const { return segments_[i]; }

 private:
  double segment_value(const Segment& seg, double s) const;
  std::array<std::vector<Segment>, 2> segments_;
  std::array<double, 2> switch_time_{kInfinity, kInfinity};
};

struct Placement {
  std::array<double, 2> atom{};
  int loser = -1;  // player with a positive atom, -1 if none
  double horizon = 0.0;
};

// Time-0 atoms that put the prior on the curve, and the implied horizon.
Placement place_on_curve(const BackwardCurve& curve, const std::array<double, 2>& prior);

// Atom that lifts the posterior from prior to target.
double atom_for(double prior, double target);
double posterior_after(double prior, double atom);

// The finite-horizon profile traced from (1,1).
Profile finite_profile(const TwoSidedGame& game);

}  // namespace attrition
