#pragma once

#include <array>
#include <string>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/profile.hpp"

namespace attrition::twosided {

enum class Regime { unique_finite_T, type1_only, type2_only, type1_and_type2, boundary };

std::string to_string(Regime regime);

// Time-0 concession by one player; player -1 means no atom.
struct AtomChoice {
  int player = -1;
  double atom = 0.0;
};

// Atoms of `player` that keep the post-atom prior inside the type-1 region.
struct AtomInterval {
  int player = 0;
  double lo = 0.0, hi = 0.0;  // [lo, hi)
};

enum class Branch { low, high };

std::string to_string(Branch branch);

struct Type2Entry {
  AtomChoice atom;
  Branch branch = Branch::low;
  double absorption = 0.0;  // time at which both reputations reach the thresholds
};

struct RegimeClass {
  Regime regime = Regime::unique_finite_T;
  std::array<double, 2> theta{};   // player i's threshold on its own reputation
  std::array<double, 2> phi{};     // no-challenge drift threshold; 0 when gamma_i <= lambda_i
  std::array<double, 2> phi_nu{};  // challenge-phase drift threshold
  bool finite_exists = false;      // the curve from (1,1) reaches the prior
  bool type1 = false, type2 = false;
  std::vector<AtomInterval> type1_atoms;
  std::vector<Type2Entry> type2_atoms;
  std::string note;
};

RegimeClass classify(const TwoSidedGame& game);

// Throws RegimeMismatch unless the regime is unique_finite_T.
Profile solve_finite(const TwoSidedGame& game);

// Challenge hazards that hold both reputations at their thresholds.
std::array<double, 2> steady_state_rates(const TwoSidedGame& game);
// lambda_i - (1 - theta_i) gamma_i + (1 - theta_i) chi_i.
double steady_residual(const TwoSidedGame& game, int i, double chi);

struct InfiniteProfile {
  Profile profile;
  std::string kind;  // "type1" or "type2"
  AtomChoice atom;
  Branch branch = Branch::low;
  std::array<double, 2> absorption{kInfinity, kInfinity};
  std::array<double, 2> steady_rates{};
  std::array<double, 2> posterior{};  // after the atom
};

InfiniteProfile construct_type1(const TwoSidedGame& game, const AtomChoice& atom);
InfiniteProfile construct_type2(const TwoSidedGame& game, const AtomChoice& atom);

// Largest reputation drift of either player over the grid.
double max_drift(const InfiniteProfile& profile, const std::vector<double>& grid);
// Largest jump of either reputation across its absorption time.
double absorption_gap(const InfiniteProfile& profile);

}  // namespace attrition::twosided
