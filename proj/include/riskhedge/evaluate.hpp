#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "riskhedge/demand.hpp"
#include "riskhedge/model.hpp"
#include "riskhedge/policies.hpp"

namespace riskhedge {

// Discount factors shared by every path of a run: midpoint factors for the
// running integrals and left-endpoint factors for the adjustment charges.
struct DiscountGrid {
    double dt = 0.0;
    std::vector<double> mid;   // e^{-alpha (k + 1/2) dt}, size K
    std::vector<double> left;  // e^{-alpha k dt}, size K

    static DiscountGrid build(double alpha, double dt, std::size_t steps);
};

struct BenefitDecomposition {
    double reward = 0.0;      // N_p * discounted cumulative demand
    double overage = 0.0;     // C_+ running term
    double shortage = 0.0;    // C_- running term
    double adjustment = 0.0;  // I_p / D_p charges

    double net() const { return reward - overage - shortage - adjustment; }
};

// Midpoint-rule quadrature of e^{-alpha t} [N_p(t) + N_s(t)] minus the
// discounted adjustment charges.
double discounted_net_benefit(const SamplePath& path, const ControlTrajectory& traj,
                              const ModelParams& params, double alpha,
                              BenefitDecomposition* decomposition = nullptr);

// Quadrature of e^{-alpha t} [C_+ X^+ + C_- X^-] plus adjustment charges;
// satisfies net_benefit + cost = N_p * discounted demand path-wise.
double discounted_cost_objective(const SamplePath& path, const ControlTrajectory& traj,
                                 const ModelParams& params, double alpha);

double discounted_demand_quadrature(const SamplePath& path, double alpha);

enum class PolicyKind { Optimal, OfflineLp, CfResolve };
const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

struct ReportRow {
    std::string sweep_var;
    double value = 0.0;
    std::string policy;
    double mean_nb = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double rel_improvement = 0.0;  // (NB_opt - NB_this) / NB_this
};

struct EvaluationReport {
    std::vector<ReportRow> rows;
    // Mean decomposition per row; carried alongside but not serialized.
    std::vector<BenefitDecomposition> decomposition;
};

bool rows_equal(const EvaluationReport& a, const EvaluationReport& b);

// One swept variable over explicit values; an empty name means a single run
// at the configured parameters.
struct SweepSpec {
    std::string var;  // "sigma", "C_plus" or "C_minus"
    std::vector<double> values;
};

// Runs every policy on common random paths for each sweep value. Results are
// identical for any worker count: per-path values land in preassigned slots
// and are reduced pairwise in path order.
EvaluationReport monte_carlo_compare(const DemandPattern& pattern, const SimConfig& cfg,
                                     const ModelParams& params,
                                     const std::vector<PolicyKind>& policies,
                                     const SweepSpec& sweep = {}, int n_threads = 1);

void emit_report(const EvaluationReport& report, std::ostream& out);
EvaluationReport parse_report(std::istream& in);

// Order-independent pairwise sum used by all reductions.
double pairwise_sum(const std::vector<double>& v);

}  // namespace riskhedge
