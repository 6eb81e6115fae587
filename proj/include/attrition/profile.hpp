#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "attrition/bernoulli.hpp"
#include "attrition/model.hpp"

namespace attrition {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// One stretch of a reputation path with fixed dynamics, in forward time.
struct Phase {
  double start = 0.0;
  double end = kInfinity;
  double anchor_time = 0.0;  // reputation equals anchor_value here
  double anchor_value = 1.0;
  bernoulli::Dynamics dyn;
  double intensity = 0.0;    // strategic challenge hazard is intensity * mu / (1 - mu)
  bool challenging = false;  // the opponent sits below its challenge threshold
};

// Reputation and strategy of one player. Strategic survival is recovered
// from the reputation by Bayes' rule; the concession distribution is the
// complement of survival and challenges.
class PlayerPath {
 public:
  PlayerPath() = default;
  PlayerPath(double prior, double atom, double concession_rate, double arrival_rate, double horizon,
             std::vector<Phase> phases);

  double prior() const { return prior_; }
  double atom() const { return atom_; }
  double concession_rate() const { return concession_rate_; }
  double arrival_rate() const { return arrival_rate_; }
  double horizon() const { return horizon_; }
  const std::vector<Phase>& phases() const { return phases_; }

  // Posterior after the time-0 atom; 1 from a finite horizon on.
  double reputation(double t) const;
  double survival(double t) const;  // strategic type neither conceded nor challenged by t
  double concede_cdf(double t) const;
  double challenge_cdf(double t) const;
  double concede_density(double t) const;  // continuous part, t > 0
  double challenge_density(double t) const;
  double concede_hazard(double t) const;    // per remaining strategic type
  double challenge_hazard(double t) const;  // per remaining strategic type
  bool challenging(double t) const;
  double challenge_end() const;  // last time the player challenges (0 if never)
  // Unconditional hazard of a challenge by this player; left limit on request.
  double overall_challenge_hazard(double t, bool left_limit = false) const;
  // Probability a challenge at t comes from the justified type.
  double challenger_posterior(double t) const;
  std::vector<double> breakpoints() const;

 private:
  const Phase* phase_at(double t, bool left_limit = false) const;
  double phase_value(const Phase& p, double t) const;

  double prior_ = 0.5, atom_ = 0.0, concession_rate_ = 0.0, arrival_rate_ = 0.0, horizon_ = kInfinity;
  std::vector<Phase> phases_;
  std::vector<double> challenge_before_;  // integral of intensity * e^{-gamma s} before each phase
};

// A strategy profile of the two-player game together with its primitives.
struct Profile {
  TwoSidedGame game;
  TwoSidedDerived derived;
  std::array<PlayerPath, 2> player;
  double horizon = kInfinity;
  std::array<double, 2> payoff{};  // strategic payoffs
  std::array<double, 2> yield_scale{1.0, 1.0};  // perturbs the yield probabilities in audits

  double reputation(int i, double t) const { return player[i].reputation(t); }
  // Probability that strategic player `defender` yields to a challenge at t.
  double yield_probability(int defender, double t) const;
};

// 1 - a_j + (1 - z_j) Q_j D for both players.
std::array<double, 2> closed_form_payoffs(const TwoSidedGame& game, double overlap, const std::array<double, 2>& atoms);

struct HazardJump {
  double time = 0.0;
  std::string label;
  double challenge_left = 0.0, challenge_right = 0.0;
  double resolution_left = 0.0, resolution_right = 0.0;
};

// Unconditional hazards of challenging and of resolution along a profile.
class HazardSchedule {
 public:
  explicit HazardSchedule(const Profile& profile);
  double challenge(double t) const;
  double resolution(double t) const;
  double concession(int i, double t) const;
  const std::vector<HazardJump>& jumps() const { return jumps_; }

 private:
  double challenge_side(double t, bool left) const;
  double resolution_side(double t, bool left) const;
  Profile profile_;
  std::vector<HazardJump> jumps_;
};

// Largest gap between the path reputation and the Bayes posterior computed
// from an independently integrated concession density.
double bayes_gap(const PlayerPath& path, const std::vector<double>& grid);

}  // namespace attrition
