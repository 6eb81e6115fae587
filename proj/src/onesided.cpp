#include "attrition/onesided.hpp"

#include <algorithm>
#include <cmath>

#include "attrition/errors.hpp"

namespace attrition::onesided {

CoevolutionCurve::CoevolutionCurve(const OneSidedGame& game)
    : game_(game), derived_(derive(game)), curve_(embed(game), derive_two_sided(embed(game))) {}

double CoevolutionCurve::player1_at(double mu2) const {
  if (!(mu2 > 0.0) || mu2 > 1.0) throw DomainError("player 2's reputation must lie in (0,1]");
  return curve_.reputation(0, curve_.time_at(1, mu2));
}

double CoevolutionCurve::player2_at(double mu1) const {
  if (!(mu1 > asymptote()) || mu1 > 1.0) throw DomainError("player 1's reputation is at or below the curve asymptote");
  return curve_.reputation(1, curve_.time_at(0, mu1));
}

double CoevolutionCurve::switch_reputation() const { return player1_at(derived_.challenge_threshold); }

InitialAtoms initial_atoms(const OneSidedGame& game, const CoevolutionCurve& curve) {
  const Placement place = place_on_curve(curve.backward(), {game.z1, game.z2});
  return InitialAtoms{place.atom[0], place.atom[1], place.loser + 1};
}

EquilibriumProfile::EquilibriumProfile(const OneSidedGame& game, Profile profile)
    : game_(game), derived_(derive(game)), profile_(std::move(profile)) {}

EquilibriumProfile solve(const OneSidedGame& game) {
  validate(game);
  return EquilibriumProfile(game, finite_profile(embed(game)));
}

double deviation_payoff_concede(const EquilibriumProfile& eq, int player, double t) {
  return DeviationPayoffs(eq.profile()).concede(player - 1, t);
}

double deviation_payoff_challenge(const EquilibriumProfile& eq, double t) {
  return DeviationPayoffs(eq.profile()).challenge(0, t);
}

HazardSchedule hazard_schedule(const EquilibriumProfile& eq) { return HazardSchedule(eq.profile()); }

double yield_at(const OneSidedGame& game, double mu2) {
  const double q = (game.c1 / (1.0 - mu2) - game.w1) / (1.0 - game.w1);
  return std::clamp(q, 0.0, 1.0);
}

double challenge_hazard_at(const OneSidedGame& game, double mu1) {
  const double nu = 1.0 - game.k2 / (1.0 - game.w1);
  return (1.0 - nu) / nu * mu1 / (1.0 - mu1) * game.gamma1;
}

}  // namespace attrition::onesided
