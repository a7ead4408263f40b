#include "riskhedge/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskhedge/slot_lp.hpp"

namespace riskhedge {

double threshold_policy_step(double x, const ThresholdPolicy& policy, double theta_l,
                             double theta_u) {
    if (x < policy.lower) return theta_u;
    if (x > policy.upper) return theta_l;
    return 0.0;
}

std::vector<ThresholdPolicy> solve_segment_policies(const DemandPattern& pattern,
                                                    const ModelParams& params) {
    std::vector<ThresholdPolicy> out;
    out.reserve(pattern.segment_count());
    for (std::size_t s = 0; s < pattern.segment_count(); ++s) {
        ModelParams seg = params;
        seg.b = pattern.segment_drift(s);
        out.push_back(solve_thresholds(DerivedModel(seg)));
    }
    return out;
}

ControlTrajectory simulate_optimal(const SamplePath& path, const SegmentSchedule& sched,
                                   const ModelParams& params, double p0,
                                   const std::vector<ThresholdPolicy>& per_segment) {
    const std::size_t k = path.values.size() - 1;
    if (sched.segment.size() != k) throw std::invalid_argument("schedule/path length mismatch");
    ControlTrajectory traj;
    traj.dt = path.dt;
    traj.capacity.resize(k + 1);
    traj.velocity.resize(k);
    double p = p0;
    traj.capacity[0] = p;
    for (std::size_t i = 0; i < k; ++i) {
        const ThresholdPolicy& pol = per_segment[sched.segment[i]];
        const double th = threshold_policy_step(p - path.values[i], pol, params.theta_l,
                                                params.theta_u);
        traj.velocity[i] = th;
        p += th * path.dt;
        traj.capacity[i + 1] = p;
    }
    return traj;
}

ControlTrajectory simulate_optimal(const SamplePath& path, const DemandPattern& pattern,
                                   const ModelParams& params, double p0) {
    SimConfig cfg;
    cfg.dt_seconds = path.dt * 3600.0;
    cfg.horizon_hours = path.dt * (path.values.size() - 1);
    cfg.sigma = params.sigma;
    const SegmentSchedule sched = SegmentSchedule::build(pattern, cfg);
    return simulate_optimal(path, sched, params, p0, solve_segment_policies(pattern, params));
}

std::vector<double> slot_averages(const SamplePath& path, const SimConfig& cfg) {
    const int per_slot = cfg.steps_per_slot();
    const int n_slots = cfg.slots();
    if (static_cast<std::size_t>(per_slot) * n_slots + 1 != path.values.size())
        throw std::invalid_argument("slot layout does not match path length");
    std::vector<double> g(n_slots);
    for (int s = 0; s < n_slots; ++s) {
        double acc = 0.0;
        const int base = s * per_slot;
        for (int j = 0; j < per_slot; ++j)
            acc += 0.5 * (path.values[base + j] + path.values[base + j + 1]);
        g[s] = acc / per_slot;
    }
    return g;
}

ControlTrajectory offline_lp_solve(const SamplePath& path, const SimConfig& cfg,
                                   const ModelParams& params, double p0, double* slot_objective) {
    SlotLpProblem prob;
    prob.slot_demand = slot_averages(path, cfg);
    prob.p0 = p0;
    prob.gamma = cfg.gamma_hours();
    prob.c_plus = params.overage_cost();
    prob.c_minus = params.shortage_cost();
    prob.inc_cost = params.inc_cost;
    prob.dec_cost = params.dec_cost;
    prob.theta_l = params.theta_l;
    prob.theta_u = params.theta_u;
    const SlotLpSolution sol = solve_slot_lp(prob);
    if (slot_objective) *slot_objective = sol.objective;

    const int per_slot = cfg.steps_per_slot();
    const std::size_t k = path.values.size() - 1;
    ControlTrajectory traj;
    traj.dt = path.dt;
    traj.capacity.resize(k + 1);
    traj.velocity.resize(k);
    double p = p0;
    traj.capacity[0] = p;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t slot = i / per_slot;
        const double target = sol.capacity[slot];
        const double prev = slot == 0 ? p0 : sol.capacity[slot - 1];
        const double vel = (target - prev) / cfg.gamma_hours();
        traj.velocity[i] = vel;
        p += vel * path.dt;
        traj.capacity[i + 1] = p;
    }
    return traj;
}

void cf_resolve_step(const SamplePath& path, const SimConfig& cfg, const ModelParams& params,
                     int start_step, double b_hat, ControlTrajectory& traj) {
    const int per_slot = cfg.steps_per_slot();
    const int k = static_cast<int>(path.values.size()) - 1;
    const double dt = path.dt;
    const double d_obs = path.values[start_step];
    const int end = std::min(start_step + per_slot, k);
    double p = traj.capacity[start_step];
    for (int i = start_step; i < end; ++i) {
        // Aim at the forecast one step ahead; saturation gives the
        // drive-then-track behaviour of the deterministic-scenario rule.
        const double target = d_obs + b_hat * ((i + 1 - start_step) * dt);
        const double vel = std::clamp((target - p) / dt, params.theta_l, params.theta_u);
        traj.velocity[i] = vel;
        p += vel * dt;
        traj.capacity[i + 1] = p;
    }
}

ControlTrajectory cf_resolve(const SamplePath& path, const SimConfig& cfg,
                             const ModelParams& params, double p0) {
    const int per_slot = cfg.steps_per_slot();
    const int k = static_cast<int>(path.values.size()) - 1;
    ControlTrajectory traj;
    traj.dt = path.dt;
    traj.capacity.assign(k + 1, 0.0);
    traj.velocity.assign(k, 0.0);
    traj.capacity[0] = p0;

    for (int start = 0; start < k; start += per_slot) {
        double b_hat = 0.0;  // no history before the first re-solve instant
        if (start > 0) {
            // Least-squares slope over the trailing slot window, clamped to
            // the feasible tracking velocities.
            const int w0 = start - per_slot;
            const int n = per_slot + 1;
            double sum_t = 0.0, sum_d = 0.0, sum_tt = 0.0, sum_td = 0.0;
            for (int j = 0; j < n; ++j) {
                const double t = j * path.dt;
                const double d = path.values[w0 + j];
                sum_t += t;
                sum_d += d;
                sum_tt += t * t;
                sum_td += t * d;
            }
            const double denom = n * sum_tt - sum_t * sum_t;
            b_hat = std::clamp((n * sum_td - sum_t * sum_d) / denom, params.theta_l,
                               params.theta_u);
        }
        cf_resolve_step(path, cfg, params, start, b_hat, traj);
    }
    return traj;
}

}  // namespace riskhedge
