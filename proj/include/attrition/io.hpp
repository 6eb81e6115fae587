#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "attrition/analysis.hpp"
#include "attrition/model.hpp"
#include "attrition/montecarlo.hpp"
#include "attrition/multidemand.hpp"
#include "attrition/onesided.hpp"
#include "attrition/profile.hpp"
#include "attrition/twosided.hpp"

namespace attrition::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "attrition-lab/v1";

using Game = std::variant<OneSidedGame, TwoSidedGame, MultiDemandGame>;

// Parses and validates a game document. A1 selects the multi-demand game,
// gamma2 the two-sided one, anything else is one-sided.
Game parse_game(const std::string& text);
Game parse_game(const Json& doc);

Json to_json(const OneSidedGame& game);
Json to_json(const TwoSidedGame& game);
Json to_json(const MultiDemandGame& game);
Json to_json(const Game& game);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Rounds to 15 significant digits.
double round15(double x);
std::string format15(double x);
// A rounded number, or "inf" / "-inf" / "nan" as a string.
Json number(double x);
Json numbers(const std::vector<double>& xs);
// Pretty output ends with a newline; compact output does not.
std::string dump(const Json& doc, bool pretty = true);

using Cell = std::variant<double, std::string>;

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void add(std::vector<Cell> row);
  std::size_t size() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

Json to_json(const Derived& derived);
Json to_json(const TwoSidedDerived& derived);
Json to_json(const onesided::EquilibriumProfile& eq);
Json to_json(const Profile& profile);
Json to_json(const twosided::RegimeClass& regime);
Json to_json(const twosided::InfiniteProfile& profile);
Json to_json(const analysis::BenefitRegion& region);
Json to_json(const analysis::LimitPayoffs& limit);
Json to_json(const analysis::MonotonicityReport& report);
Json to_json(const multidemand::MultiDemandSolution& solution);
Json to_json(const montecarlo::SimReport& report);
Json to_json(const AuditReport& audit);

// Times 0 .. end in n equal steps; end is the horizon when finite.
std::vector<double> sample_times(const Profile& profile, int n);
// t, F1, F2, G1, G2, q1, q2, mu1, mu2, concession and challenge hazards.
Csv curves_csv(const Profile& profile, int n);
// Coevolution curve mu1 against mu2 on n points of (0, 1].
Csv coevolution_csv(const onesided::CoevolutionCurve& curve, int n);
// Hazard schedule with one flagged row per side of each jump.
Csv hazard_csv(const Profile& profile, int n);
Csv sweep_csv(const std::string& param, const std::vector<analysis::SweepRow>& rows);
Csv hazard_bins_csv(const std::vector<montecarlo::HazardBin>& bins);
Csv multi_tables_csv(const multidemand::MultiDemandSolution& solution);

struct Durations {
  std::vector<double> duration;
  std::vector<bool> censored;
};

// CSV with duration and censored columns (censored is 0/1 or true/false).
Durations parse_durations(const std::string& text);

}  // namespace attrition::io
