#pragma once

#include "attrition/backward.hpp"
#include "attrition/deviation.hpp"
#include "attrition/model.hpp"
#include "attrition/profile.hpp"

namespace attrition::onesided {

// Reputation pairs on the equilibrium path to (1,1).
class CoevolutionCurve {
 public:
  explicit CoevolutionCurve(const OneSidedGame& game);

  // Player 1's reputation on the curve when player 2's is mu2, for mu2 in (0,1].
  double player1_at(double mu2) const;
  // Inverse map; throws DomainError at or below the asymptote.
  double player2_at(double mu1) const;
  // Player 1's reputation as player 2's goes to zero.
  double asymptote() const { return curve_.floor(0); }
  // Player 1's reputation where player 2's crosses the challenge threshold.
  double switch_reputation() const;
  const BackwardCurve& backward() const { return curve_; }
  const Derived& derived() const { return derived_; }

 private:
  OneSidedGame game_;
  Derived derived_;
  BackwardCurve curve_;
};

struct InitialAtoms {
  double q1 = 0.0, q2 = 0.0;
  int loser = 0;  // 1 or 2, 0 when the prior is on the curve
};

InitialAtoms initial_atoms(const OneSidedGame& game, const CoevolutionCurve& curve);

class EquilibriumProfile {
 public:
  EquilibriumProfile() = default;
  EquilibriumProfile(const OneSidedGame& game, Profile profile);

  const OneSidedGame& game() const { return game_; }
  const Derived& derived() const { return derived_; }
  const Profile& profile() const { return profile_; }

  double horizon() const { return profile_.horizon; }                 // T
  double challenge_end() const { return profile_.player[0].challenge_end(); }  // T1
  double atom1() const { return profile_.player[0].atom(); }
  double atom2() const { return profile_.player[1].atom(); }
  double payoff1() const { return profile_.payoff[0]; }
  double payoff2() const { return profile_.payoff[1]; }

  double concede_cdf1(double t) const { return profile_.player[0].concede_cdf(t); }
  double concede_cdf2(double t) const { return profile_.player[1].concede_cdf(t); }
  double challenge_cdf1(double t) const { return profile_.player[0].challenge_cdf(t); }
  double yield2(double t) const { return profile_.yield_probability(1, t); }
  double reputation1(double t) const { return profile_.reputation(0, t); }
  double reputation2(double t) const { return profile_.reputation(1, t); }
  double concede_hazard(int player, double t) const { return profile_.player[player - 1].concede_hazard(t); }
  double challenge_hazard1(double t) const { return profile_.player[0].challenge_hazard(t); }

 private:
  OneSidedGame game_;
  Derived derived_;
  Profile profile_;
};

EquilibriumProfile solve(const OneSidedGame& game);

// Payoff to a strategic player who concedes at t (player is 1 or 2).
double deviation_payoff_concede(const EquilibriumProfile& eq, int player, double t);
// Payoff to strategic player 1 who challenges at t.
double deviation_payoff_challenge(const EquilibriumProfile& eq, double t);

HazardSchedule hazard_schedule(const EquilibriumProfile& eq);

// Yield probability of player 2 at reputation mu2 while challenged.
double yield_at(const OneSidedGame& game, double mu2);
// Strategic challenge hazard of player 1 at reputation mu1 during the challenge phase.
double challenge_hazard_at(const OneSidedGame& game, double mu1);

}  // namespace attrition::onesided
