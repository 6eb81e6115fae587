#pragma once

#include <functional>
#include <vector>

namespace attrition {

// Globally adaptive Gauss-Kronrod (7/15) over [lo, hi], split at any breakpoints
// strictly inside. Throws QuadratureFailure when the summed error estimate
// exceeds abs_tol.
double integrate(const std::function<double(double)>& f, double lo, double hi, double abs_tol = 1e-9,
                 const std::vector<double>& breakpoints = {});

}  // namespace attrition
