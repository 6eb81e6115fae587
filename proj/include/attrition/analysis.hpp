#pragma once

#include <optional>
#include <string>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/onesided.hpp"

namespace attrition::analysis {

// Priors at which strategic player 1 gains from the ultimatum opportunity.
class BenefitRegion {
 public:
  bool condition_holds = false;
  double mu1_lower = 0.0, mu1_upper = 0.0;  // crossings of the curves with and without challenges
  double switch_reputation = 0.0;
  double target = 0.0;                      // challenger posterior that leaves the defender indifferent
  double time_with = 0.0, time_without = 0.0;  // time from target to 1 with and without challenges
  bool scanned = false;                     // a bracket degenerated and the roots came from a dense scan
  bool lower_unresolved = false;            // lower crossing within rounding of the asymptote; mu1_lower is the nearest point probed

  bool benefits(double z1, double z2) const;
  // Throws NoBenefitRegion when the condition fails.
  std::pair<double, double> bounds() const;

  std::optional<onesided::CoevolutionCurve> curve;
};

BenefitRegion who_benefits(const OneSidedGame& game);

// Time for player 1's reputation to climb from mu1 to 1 on the curve.
double time_to_one(const onesided::CoevolutionCurve& curve, double mu1);
// Same with no ultimatum opportunities.
double time_to_one_quiet(const OneSidedGame& game, double mu1);
// Sign expression used to test the condition at the target posterior.
double target_sign_expression(const OneSidedGame& game);

struct LimitPayoffs {
  std::optional<double> u1, u2;  // empty at the knife-edge
  int winner = 0;                // 1 or 2, 0 when indeterminate
  bool efficient = false;
  bool generic = true;
  std::string case_label;
};

LimitPayoffs limit_payoffs_single(const OneSidedGame& game);

double get_param(const OneSidedGame& game, const std::string& name);
OneSidedGame with_param(OneSidedGame game, const std::string& name, double value);

struct MonotonicityReport {
  std::string param;
  double delta = 0.0;
  double u1 = 0.0, u2 = 0.0;
  double du1 = 0.0, du2 = 0.0;
  int predicted1 = 0, predicted2 = 0;  // -1, 0, +1
  bool same_region = true;
  bool holds1 = true, holds2 = true;
  std::string region;
  bool holds() const { return holds1 && holds2; }
};

// Payoff changes are "zero" below this.
inline constexpr double kFlatTolerance = 1e-9;

MonotonicityReport comp_statics_check(const OneSidedGame& game, const std::string& param, double delta);

struct SignReport {
  std::string region;            // "constant", "decreasing" or "window"
  double derivative = 0.0;       // d log(curve value at z1) / d gamma1, unsimplified form
  double displayed = 0.0;        // the compact sign expression
  double finite_difference = 0.0;
  bool same_region = true;
  bool agrees = true;            // sign of derivative matches the finite difference
};

SignReport gamma_sensitivity(const OneSidedGame& game);

struct SweepRow {
  double value = 0.0;
  double u1 = 0.0, u2 = 0.0;
  double horizon = 0.0, challenge_end = 0.0;
  double atom1 = 0.0, atom2 = 0.0;
  std::string region;
  int sign1 = 0, sign2 = 0;  // predicted payoff response to an increase of the parameter
  std::string error;         // non-empty when the point could not be solved
};

std::vector<SweepRow> sweep(const OneSidedGame& game, const std::string& param, const std::vector<double>& values);

}  // namespace attrition::analysis
