#pragma once

#include <cstddef>
#include <vector>

#include "riskhedge/model.hpp"
#include "riskhedge/threshold.hpp"

namespace riskhedge {

// Per-resource economics for the multi-primary model; demand dynamics and
// the secondary option are shared.
struct MultiParams {
    std::vector<double> reward_primary;
    std::vector<double> cost_primary;
    std::vector<double> inc_cost;
    std::vector<double> dec_cost;
    std::vector<double> theta_l;
    std::vector<double> theta_u;
    double b = 0.0;
    double sigma = 0.0;
    double alpha = 0.0;
    double reward_secondary = 0.0;
    double cost_secondary = 0.0;

    std::size_t count() const { return reward_primary.size(); }
};

void validate(const MultiParams& mp);

// Fixed capacity proportions; nonnegative, summing to 1.
struct ContractVector {
    std::vector<double> w;
};

void validate(const ContractVector& cv, std::size_t n_resources);

// Weighted economics plus the aggregate velocity window
// [max_i theta_l_i / w_i, min_i theta_u_i / w_i]; zero-weight resources
// impose no rate constraint and are excluded from the window.
ModelParams aggregate_params(const MultiParams& mp, const ContractVector& cv);

ThresholdPolicy solve_thresholds_for_contract(const MultiParams& mp, const ContractVector& cv);

// E int_0^inf e^{-alpha t} D(t) dt for D(t) = D0 + b t + sigma W(t).
double expected_discounted_demand(double d0, double b, double alpha);

// J_w(x): aggregate net margin times the discounted demand mass minus the
// value function of the reduced cost problem at x.
double contract_net_benefit(const MultiParams& mp, const ContractVector& cv, double x,
                            double d0 = 0.0);

struct ContractOptimum {
    ContractVector contract;
    double net_benefit = 0.0;
};

// Exhaustive search over the simplex lattice with the given spacing;
// deterministic lexicographic tie-break.
ContractOptimum optimize_contract(const MultiParams& mp, double x, double grid_step,
                                  double d0 = 0.0);

}  // namespace riskhedge
