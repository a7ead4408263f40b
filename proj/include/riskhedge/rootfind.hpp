#pragma once

#include <functional>

namespace riskhedge {

// Deterministic bisection on [lo, hi]; requires f(lo) * f(hi) <= 0.
// Returns y with |f(y)| <= tol or bracket width <= tol * max(1, |y|).
// Throws std::invalid_argument("no sign change") on an invalid bracket.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol = 1e-12);

}  // namespace riskhedge
