#pragma once

#include <vector>

namespace riskhedge {

// Discrete-slot provisioning problem: choose capacities P_1..P_T with
// P_i - P_{i-1} in [theta_l * gamma, theta_u * gamma], minimizing
//   sum_i  c_plus (P_i - g_i)^+ + c_minus (g_i - P_i)^+
//        + inc_cost (P_i - P_{i-1})^+ + dec_cost (P_{i-1} - P_i)^+.
struct SlotLpProblem {
    std::vector<double> slot_demand;  // g_1..g_T
    double p0 = 0.0;
    double gamma = 1.0;  // slot length
    double c_plus = 0.0, c_minus = 0.0;
    double inc_cost = 0.0, dec_cost = 0.0;
    double theta_l = 0.0, theta_u = 0.0;
};

struct SlotLpSolution {
    std::vector<double> capacity;  // P_1..P_T
    double objective = 0.0;
};

// Exact minimizer via backward recursion on convex piecewise-linear value
// functions; per stage the optimal move clamps toward a target interval.
SlotLpSolution solve_slot_lp(const SlotLpProblem& prob);

// Exact two-phase dense simplex (Bland's rule) on the auxiliary-variable
// reformulation; cross-check for solve_slot_lp, usable up to modest T.
SlotLpSolution solve_slot_lp_simplex(const SlotLpProblem& prob);

double slot_lp_objective(const SlotLpProblem& prob, const std::vector<double>& capacity);

}  // namespace riskhedge
