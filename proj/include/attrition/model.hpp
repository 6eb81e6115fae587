#pragma once

#include <array>
#include <optional>
#include <vector>

#include "attrition/bernoulli.hpp"

namespace attrition {

// Only player 1 receives ultimatum opportunities.
struct OneSidedGame {
  double a1 = 0.0, a2 = 0.0;    // demands
  double z1 = 0.0, z2 = 0.0;    // prior probability of the justified type
  double r1 = 0.0, r2 = 0.0;    // discount rates
  double gamma1 = 0.0;          // ultimatum arrival rate of player 1
  double c1 = 0.0;              // challenge cost, fraction of the overlap
  double k2 = 0.0;              // cost of seeing a challenge, fraction of the overlap
  double w1 = 0.0;              // win probability of an unjustified challenger
};

// Index 0 is player 1, index 1 is player 2.
struct TwoSidedGame {
  std::array<double, 2> a{}, z{}, r{}, gamma{}, c{}, k{}, w{};
};

struct MultiDemandGame {
  std::vector<double> demands1, demands2;  // strictly increasing grids in (0,1)
  std::vector<double> prior1, prior2;      // justified-demand distributions
  double z1 = 0.0, z2 = 0.0, r1 = 0.0, r2 = 0.0, gamma1 = 0.0, c1 = 0.0, k2 = 0.0, w1 = 0.0;
};

struct Derived {
  double overlap = 0.0;  // a1 + a2 - 1
  double concession_rate1 = 0.0, concession_rate2 = 0.0;
  double challenge_threshold = 0.0;     // player 1 challenges while player 2's reputation is below
  double indifference_posterior = 0.0;  // challenger posterior that leaves the defender indifferent
  std::optional<double> decay_floor;    // no-challenge drift sign threshold; empty when gamma1 = 0
  double switch_reputation = 0.0;       // player 1's reputation when player 2's hits the threshold
  bool challenges_active = false;
};

struct TwoSidedDerived {
  double overlap = 0.0;
  std::array<double, 2> concession_rate{};
  std::array<double, 2> challenge_threshold{};     // on player i's own reputation
  std::array<double, 2> indifference_posterior{};  // player i as challenger
  std::array<std::optional<double>, 2> decay_floor{};
};

void validate(const OneSidedGame& game);
void validate(const TwoSidedGame& game);
void validate(const MultiDemandGame& game);

Derived derive(const OneSidedGame& game);
TwoSidedDerived derive_two_sided(const TwoSidedGame& game);

// gamma2 = 0 embedding; the unused court parameters get fixed admissible values.
TwoSidedGame embed(const OneSidedGame& game);
// Single-demand game for one demand pair of a multi-demand game.
OneSidedGame pair_game(const MultiDemandGame& game, double a1, double a2);

// Reputation dynamics of player i while not challenging / while challenging.
bernoulli::Dynamics quiet_dynamics(const TwoSidedDerived& d, const TwoSidedGame& game, int i);
bernoulli::Dynamics challenge_dynamics(const TwoSidedDerived& d, const TwoSidedGame& game, int i);
// k such that the strategic challenge hazard is k * mu / (1 - mu) in the challenge phase.
double challenge_intensity(const TwoSidedDerived& d, const TwoSidedGame& game, int i);

}  // namespace attrition
