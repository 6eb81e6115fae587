#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/onesided.hpp"

namespace attrition::multidemand {

// Coevolution curves for every incompatible demand pair, built once.
class PairCurves {
 public:
  explicit PairCurves(const MultiDemandGame& game);
  const MultiDemandGame& game() const { return game_; }
  // Null when a1 + a2 <= 1.
  const onesided::CoevolutionCurve* at(std::size_t i1, std::size_t i2) const;

 private:
  MultiDemandGame game_;
  std::vector<std::vector<std::unique_ptr<onesided::CoevolutionCurve>>> curves_;
};

// Time for each reputation to reach 1 on the pair's equilibrium path.
double time_to_one(const MultiDemandGame& game, double a1, double a2, double x);
double time_to_one_2(const MultiDemandGame& game, double a1, double a2, double y);

// Largest mimic probability of demand a2 that keeps player 2 from conceding at time 0.
double sigma_bar(const MultiDemandGame& game, double a1, double a2, double x);

// Posterior of player 2 after demanding a2 when strategic types mimic it with probability sigma.
double demand_posterior(const MultiDemandGame& game, std::size_t i2, double sigma);

struct MimicDistribution {
  double a1 = 0.0, x = 0.0;
  std::vector<double> sigma;         // per demand of player 2
  double sigma_accept = 0.0;         // immediate acceptance of a1
  std::vector<double> cap;           // sigma_bar per demand
  std::vector<double> posterior2;    // time-0 posterior of player 2 per demand
  std::vector<double> posterior1;    // player 1's posterior after its time-0 atom, per demand
  std::vector<double> atom1;         // player 1's time-0 concession probability, per demand
  std::vector<double> payoff2;       // strategic player 2's payoff per demand
  double level = 0.0;                // common payoff of supported options
  double residual = 0.0;             // |total mass - 1|
  int iterations = 0;
};

struct SolverOptions {
  std::optional<std::uint64_t> seed;  // randomizes starting brackets and tie splits
};

MimicDistribution solve_sigma2(const PairCurves& curves, std::size_t i1, double x, const SolverOptions& opts = {});
MimicDistribution solve_sigma2(const MultiDemandGame& game, double a1, double x);

// Strategic player 1's payoff after announcing demands1[i1] with posterior x.
double player1_payoff(const PairCurves& curves, const MimicDistribution& mimic);
double player1_payoff(const PairCurves& curves, std::size_t i1, double x);

struct DemandChoice {
  double a1 = 0.0;
  double sigma = 0.0;
  double posterior = 0.0;
  double payoff = 0.0;          // u1 at this posterior
  double flat_payoff = 0.0;     // u1 on the flat stretch of low posteriors
  double flat_end = 0.0;        // posterior where u1 starts rising
  bool degenerate = false;      // in the set where the split is not pinned down
  bool monotone = true;         // u1 nondecreasing on the audit grid
  MimicDistribution mimic;
};

struct PairOutcome {
  double a1 = 0.0, a2 = 0.0;
  double announce = 0.0;     // probability of this demand pair
  double immediate = 0.0;    // agreement at time 0 by player 1's concession
  double attrition = 0.0;    // enters the war of attrition
};

struct Outcome {
  double agreement = 0.0;          // time-0 agreement probability
  std::map<double, double> split;  // player 1's share at time-0 agreement -> probability
  std::vector<PairOutcome> pairs;
};

struct MultiDemandSolution {
  std::vector<DemandChoice> choices;
  double level = 0.0;      // strategic player 1's payoff
  double payoff2 = 0.0;    // strategic player 2's expected payoff
  Outcome outcome;
  double mass_residual = 0.0;
};

MultiDemandSolution solve_game(const MultiDemandGame& game, const SolverOptions& opts = {});

Outcome outcome_of(const MultiDemandGame& game, const std::vector<DemandChoice>& choices);

struct RichBounds {
  double u1 = 0.0, u2 = 0.0;
};

RichBounds limit_payoffs_rich(double r1, double r2, double gamma1, int K);

// Demand grid {2/K, ..., (K-1)/K}.
std::vector<double> rich_grid(int K);

}  // namespace attrition::multidemand
