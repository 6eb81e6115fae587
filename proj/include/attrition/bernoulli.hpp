#pragma once

// Closed-form kernel for mu' = growth * mu + quadratic * mu^2.

namespace attrition::bernoulli {

struct Dynamics {
  double growth = 0.0;     // linear coefficient, per unit time
  double quadratic = 0.0;  // quadratic coefficient, per unit time
};

// Below this |growth| the growth = 0 closed form is used.
inline constexpr double kLinearCutoff = 1e-9;

// Right-hand side of the ODE.
double rate(const Dynamics& dyn, double mu);

// -growth/quadratic, or NaN when the quadratic term vanishes.
double fixed_point(const Dynamics& dyn);

// 1/mu(t). Throws Blowup if the reciprocal reaches zero between 0 and t.
double reciprocal(const Dynamics& dyn, double mu0, double t);

// mu(t) from mu(0) = mu0 in (0,1]; t may be negative (backward in time).
// Throws Blowup on finite-time escape and ReputationExit if the value
// leaves (0,1].
double evolve(const Dynamics& dyn, double mu0, double t);

// Elapsed time for the flow to carry mu0 to target (both in (0,1]).
// Throws Unreachable when the flow points away or a fixed point is in between.
double hitting_time(const Dynamics& dyn, double mu0, double target);

}  // namespace attrition::bernoulli
