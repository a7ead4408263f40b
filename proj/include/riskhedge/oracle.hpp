#pragma once

#include <vector>

#include "riskhedge/demand.hpp"
#include "riskhedge/model.hpp"
#include "riskhedge/threshold.hpp"

namespace riskhedge {

// Finite-difference solution of the Bellman equation on a truncated domain,
// controls restricted to {theta_l, 0, theta_u}. Boundary rows clamp the
// one-sided derivative to the asymptotic slopes -C_-/alpha and +C_+/alpha.
struct HjbSolution {
    std::vector<double> x;
    std::vector<double> value;
    std::vector<double> control;  // chosen velocity per interior node
    double switch_lower = 0.0;    // extracted L; -inf if no push-up region
    double switch_upper = 0.0;    // extracted U; +inf if no push-down region
    int iterations = 0;
    double final_change = 0.0;  // sup-norm change of a final value-iteration sweep
};

HjbSolution hjb_value_iteration(const ModelParams& params, double xmin, double xmax, int grid_n,
                                double tol);

// Domain from the analytic thresholds padded by 5 sigma / sqrt(2 alpha) + 1.
HjbSolution hjb_solve_auto(const ModelParams& params, const ThresholdPolicy& hint, int grid_n,
                           double tol);

// Brute-force optimality check: simulates the discounted cost objective of
// every (L, U) pair on common random paths at the constant drift params.b.
struct GridPoint {
    double lower = 0.0;
    double upper = 0.0;
    double mean_cost = 0.0;
    double se_vs_best = 0.0;        // paired s.e. of (this - best)
    bool indistinguishable = false; // |mean diff vs best| <= 1.96 s.e.
};

struct GridSearchResult {
    std::vector<GridPoint> table;  // grid pairs first, reference pair last
    std::size_t best_index = 0;
    std::size_t reference_index = 0;
    bool reference_in_confidence_set = false;
    bool reference_unbeaten = false;  // no pair below it at 95% confidence
};

GridSearchResult policy_grid_search(const ModelParams& params, const SimConfig& cfg,
                                    const std::vector<double>& lower_grid,
                                    const std::vector<double>& upper_grid,
                                    const ThresholdPolicy& reference);

}  // namespace riskhedge
