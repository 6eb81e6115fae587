#include "attrition/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <utility>
#include <string>

#include "attrition/errors.hpp"

namespace attrition {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr int kMaxPieces = 4000;

struct Piece {
  double lo = 0.0, hi = 0.0, value = 0.0, error = 0.0;
  bool operator<(const Piece& other) const { return error < other.error; }
};

Piece rule(const std::function<double(double)>& f, double lo, double hi) {
  Piece p{lo, hi, 0.0, 0.0};
  p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error);
  return p;
}

// Global adaptive bisection: keep splitting the worst piece until the summed
// estimate meets tol or the piece budget runs out.
std::pair<double, double> adapt(const std::function<double(double)>& f, double lo, double hi, double tol) {
  std::priority_queue<Piece> heap;
  heap.push(rule(f, lo, hi));
  double error = heap.top().error;
  while (error > tol && static_cast<int>(heap.size()) < kMaxPieces) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;
    heap.pop();
    const Piece left = rule(f, worst.lo, mid);
    const Piece right = rule(f, mid, worst.hi);
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  double value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double abs_tol,
                 const std::vector<double>& breakpoints) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  double error = 0.0;
  for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
    const double share = abs_tol * 0.1 * (cuts[n + 1] - cuts[n]) / (hi - lo);
    const auto [value, piece_error] = adapt(f, cuts[n], cuts[n + 1], share);
    total += value;
    error += piece_error;
  }
  if (!std::isfinite(total) || !(error <= abs_tol)) {
    throw QuadratureFailure("error estimate " + std::to_string(error) + " on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
  return total;
}

}  // namespace attrition
