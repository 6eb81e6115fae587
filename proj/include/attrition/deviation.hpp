#pragma once

#include <array>
#include <string>
#include <vector>

#include "attrition/profile.hpp"

namespace attrition {

struct DeviationCurve {
  std::vector<double> time;
  std::vector<double> concede;    // payoff from conceding at time[n]
  std::vector<double> challenge;  // payoff from challenging at time[n]
};

// Expected payoff of a strategic player who follows a pure plan against the
// opponent's strategy in the profile.
class DeviationPayoffs {
 public:
  explicit DeviationPayoffs(const Profile& profile);

  double concede(int i, double t) const;
  double challenge(int i, double t) const;
  // Both payoffs along an ascending grid, integrating piecewise.
  DeviationCurve curve(int i, const std::vector<double>& grid) const;
  // Expected payoff of the strategic type under the profile's own mixing.
  double realized(int i) const;
  // Gain of the better pure response over the prescribed mix when player i
  // is challenged at t.
  double response_gain(int i, double t) const;

 private:
  double running(int i, double s) const;
  double opponent_alive(int i, double t) const;
  double concede_tail(int i, double t) const;
  double challenge_tail(int i, double t) const;
  double atom_payoff(int i) const;
  double time_zero_concede(int i) const;
  double truncation(int i) const;

  Profile profile_;
  std::vector<double> cuts_;
};

// Points in (0, horizon) bunched geometrically near both ends, plus a tail
// past the horizon. For infinite horizons `horizon` is the truncation time.
std::vector<double> audit_grid(double horizon, int points, bool include_tail = true);

struct PlayerAudit {
  double realized = 0.0;
  double best_deviation = 0.0;
  double advantage = 0.0;       // best_deviation - realized
  std::string best_kind;        // "concede" or "challenge"
  double best_time = 0.0;
  double concede_spread = 0.0;  // max - min of the concession payoff inside (0, T)
  double challenge_gap = 0.0;   // max |V - U| while challenging
  double after_gap = 0.0;       // max V - U where the player does not challenge (should be < 0)
  double response_gain = 0.0;
  bool challenges = false;
};

struct AuditReport {
  std::array<PlayerAudit, 2> player;
  double max_advantage = 0.0;
};

AuditReport best_response_audit(const Profile& profile, const std::vector<double>& grid);

}  // namespace attrition
