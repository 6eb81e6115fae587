#include "attrition/bernoulli.hpp"

#include <cmath>
#include <limits>

#include "attrition/errors.hpp"

namespace attrition::bernoulli {

namespace {

constexpr double kRangeSlack = 1e-12;

double effective_growth(const Dynamics& dyn) {
  return std::abs(dyn.growth) < kLinearCutoff ? 0.0 : dyn.growth;
}

void require_reputation(double mu, const char* what) {
  if (!(mu > 0.0) || mu > 1.0 + kRangeSlack) {
    throw DomainError(std::string(what) + " must lie in (0,1]");
  }
}

// Time at which 1/mu reaches zero, given it does.
double escape_time(double growth, double quadratic, double mu0) {
  if (growth == 0.0) return 1.0 / (quadratic * mu0);
  return std::log1p(growth / (quadratic * mu0)) / growth;
}

}  // namespace

double rate(const Dynamics& dyn, double mu) { return dyn.growth * mu + dyn.quadratic * mu * mu; }

double fixed_point(const Dynamics& dyn) {
  if (dyn.quadratic == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -effective_growth(dyn) / dyn.quadratic;
}

double reciprocal(const Dynamics& dyn, double mu0, double t) {
  const double a = effective_growth(dyn);
  const double b = dyn.quadratic;
  double r;
  if (a == 0.0) {
    r = 1.0 / mu0 - b * t;
  } else if (b == 0.0) {
    r = std::exp(-a * t) / mu0;
  } else {
    r = std::exp(-a * t) / mu0 + b * std::expm1(-a * t) / a;
  }
  // The reciprocal is monotone in t, so checking the endpoint covers [0,t].
  if (!(r > 0.0)) throw Blowup(escape_time(a, b, mu0));
  return r;
}

double evolve(const Dynamics& dyn, double mu0, double t) {
  require_reputation(mu0, "initial reputation");
  if (t == 0.0) return mu0;
  const double mu = 1.0 / reciprocal(dyn, mu0, t);
  if (mu > 1.0) {
    if (mu > 1.0 + kRangeSlack) {
      double t_exit = std::numeric_limits<double>::quiet_NaN();
      try {
        t_exit = hitting_time(dyn, mu0, 1.0);
      } catch (const Unreachable&) {
      }
      throw ReputationExit(t_exit, mu);
    }
    return 1.0;
  }
  return mu;
}

double hitting_time(const Dynamics& dyn, double mu0, double target) {
  require_reputation(mu0, "initial reputation");
  require_reputation(target, "target reputation");
  if (target == mu0) return 0.0;
  const double a = effective_growth(dyn);
  const double b = dyn.quadratic;
  const double drift = a * mu0 + b * mu0 * mu0;
  if (drift == 0.0) throw Unreachable("initial reputation is a fixed point");
  if ((drift > 0.0) != (target > mu0)) throw Unreachable("flow points away from the target");
  if (b != 0.0) {
    const double p = -a / b;
    if ((p - mu0) * (p - target) <= 0.0) throw Unreachable("a fixed point separates the target");
  }
  if (a == 0.0) return (1.0 / mu0 - 1.0 / target) / b;
  if (b == 0.0) return std::log(target / mu0) / a;
  return std::log1p(a * (1.0 / mu0 - 1.0 / target) / (a / target + b)) / a;
}

}  // namespace attrition::bernoulli
