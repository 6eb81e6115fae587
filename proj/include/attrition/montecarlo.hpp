#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attrition/deviation.hpp"
#include "attrition/profile.hpp"

namespace attrition::montecarlo {

struct SimConfig {
  std::size_t replications = 10000;
  std::uint64_t seed = 0;
  double time_cap = 50.0;  // runs still going at this time are censored
  double bin_width = 0.05;
  int audit_points = 0;    // deviation audit grid size; 0 skips the audit
};

void validate(const SimConfig& cfg);

enum Ending {
  concede_1,
  concede_2,
  challenge_1_yield,
  challenge_1_court,
  challenge_2_yield,
  challenge_2_court,
  censored,
  ending_count
};

std::string ending_name(int ending);

struct Estimate {
  double mean = 0.0, std_error = 0.0;
  std::size_t count = 0;
};

struct SimBin {
  double start = 0.0, end = 0.0;
  std::size_t at_risk = 0;  // games still running at start
  double exposure = 0.0;    // total time at risk inside the bin
  std::size_t resolutions = 0;
  std::array<std::size_t, 2> concessions{}, challenges{};
  std::array<std::size_t, 2> justified{};  // among those at risk at start
};

struct SimReport {
  std::size_t replications = 0;
  std::array<double, ending_count> ending{};  // probabilities
  std::array<double, ending_count> at_zero{};  // probabilities of endings at t = 0
  std::array<Estimate, 2> payoff;              // strategic players, discounted
  double truncation_bound = 0.0;               // payoff mass lost to censoring
  std::vector<SimBin> bins;
  std::optional<AuditReport> audit;
};

SimReport simulate(const Profile& profile, const SimConfig& cfg);

// The quadrature audit from the deviation module, over the given grid.
AuditReport best_response_audit(const Profile& profile, const std::vector<double>& grid);

struct HazardBin {
  double start = 0.0, end = 0.0;
  std::size_t at_risk = 0, events = 0;
  std::optional<double> hazard;  // empty when nobody is at risk
};

// Per-bin events / (at risk * bin_width). Censored durations leave the risk
// set without an event.
std::vector<HazardBin> empirical_hazard(const std::vector<double>& durations, const std::vector<bool>& censored,
                                        double bin_width);

// Occurrence / exposure hazards of the simulated bins for one event kind: "resolution",
// "challenge1", "challenge2", "concede1", "concede2".
std::vector<HazardBin> bin_hazard(const SimReport& report, const std::string& kind);

struct FlatnessTest {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Chi-square test that event counts match rate * exposure on bins inside
// [from, to); bins expecting fewer than 5 events are pooled into neighbours.
FlatnessTest flat_hazard_test(const SimReport& report, const std::string& kind, double rate, double from, double to);

// Worst |z| of the justified fraction at risk against the path reputation,
// over bins inside [from, to) with at least min_count games at risk. player is 1 or 2.
double posterior_z_score(const SimReport& report, const Profile& profile, int player, double from, double to,
                         std::size_t min_count = 100);

}  // namespace attrition::montecarlo
