#pragma once

#include <vector>

#include "riskhedge/demand.hpp"
#include "riskhedge/model.hpp"
#include "riskhedge/threshold.hpp"

namespace riskhedge {

// Capacity trajectory on the same grid as a sample path; the update is
// exact: P_{k+1} = P_k + velocity_k * dt with velocity_k in [theta_l, theta_u].
struct ControlTrajectory {
    double dt = 0.0;  // hours
    std::vector<double> capacity;  // P_0..P_K
    std::vector<double> velocity;  // theta_0..theta_{K-1}
};

// Bang-bang rule of the solved policy: push up below L, idle inside [L, U],
// push down above U.
double threshold_policy_step(double x, const ThresholdPolicy& policy, double theta_l,
                             double theta_u);

// Thresholds re-solved for each drift segment of the pattern (params.b is
// replaced by the segment slope; everything else is shared).
std::vector<ThresholdPolicy> solve_segment_policies(const DemandPattern& pattern,
                                                    const ModelParams& params);

ControlTrajectory simulate_optimal(const SamplePath& path, const DemandPattern& pattern,
                                   const ModelParams& params, double p0);
ControlTrajectory simulate_optimal(const SamplePath& path, const SegmentSchedule& sched,
                                   const ModelParams& params, double p0,
                                   const std::vector<ThresholdPolicy>& per_segment);

// Clairvoyant slot-average baseline: solves the discrete-slot program on the
// realized path's slot averages, then ramps between slot capacities at
// constant velocity. The slot-model objective is reported separately.
ControlTrajectory offline_lp_solve(const SamplePath& path, const SimConfig& cfg,
                                   const ModelParams& params, double p0,
                                   double* slot_objective = nullptr);

// Slot averages of the realized path (midpoint values within each slot).
std::vector<double> slot_averages(const SamplePath& path, const SimConfig& cfg);

// One re-solve interval of the online forecast-tracking baseline: from the
// state at step `start`, forecasts demand at slope b_hat and drives capacity
// toward the forecast at saturated velocity, tracking it once reached.
void cf_resolve_step(const SamplePath& path, const SimConfig& cfg, const ModelParams& params,
                     int start_step, double b_hat, ControlTrajectory& traj);

// Full-horizon run of the re-solve baseline; b_hat per slot is the clamped
// least-squares slope of the trailing slot window.
ControlTrajectory cf_resolve(const SamplePath& path, const SimConfig& cfg,
                             const ModelParams& params, double p0);

}  // namespace riskhedge
