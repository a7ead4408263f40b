#include "riskhedge/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace riskhedge {

DiscountGrid DiscountGrid::build(double alpha, double dt, std::size_t steps) {
    DiscountGrid g;
    g.dt = dt;
    g.mid.resize(steps);
    g.left.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        g.mid[k] = std::exp(-alpha * (static_cast<double>(k) + 0.5) * dt);
        g.left[k] = std::exp(-alpha * static_cast<double>(k) * dt);
    }
    return g;
}

double pairwise_sum(const std::vector<double>& v) {
    // Recursion keeps the result independent of chunking by callers.
    struct Rec {
        static double sum(const double* p, std::size_t n) {
            if (n <= 8) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += p[i];
                return acc;
            }
            const std::size_t half = n / 2;
            return sum(p, half) + sum(p + half, n - half);
        }
    };
    return Rec::sum(v.data(), v.size());
}

namespace {

struct PathAccounting {
    double net_benefit;
    double cost_objective;
    BenefitDecomposition decomposition;
};

PathAccounting account(const SamplePath& path, const ControlTrajectory& traj,
                       const ModelParams& params, const DiscountGrid& grid) {
    const std::size_t k = path.values.size() - 1;
    if (traj.capacity.size() != path.values.size())
        throw std::invalid_argument("trajectory/path length mismatch");
    if (grid.mid.size() < k) throw std::invalid_argument("discount grid too short");
    const double dt = path.dt;
    const double rp = params.reward_primary;
    const double cp_unit = params.cost_primary;
    const double ns = params.net_secondary();
    const double np = params.net_primary();
    const double c_plus = params.overage_cost();
    const double c_minus = params.shortage_cost();

    PathAccounting acc{};
    double nb_run = 0.0, cost_run = 0.0, reward = 0.0, over = 0.0, shortg = 0.0, adj = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double pm = 0.5 * (traj.capacity[i] + traj.capacity[i + 1]);
        const double dm = 0.5 * (path.values[i] + path.values[i + 1]);
        const double served = std::min(pm, dm);
        const double spill = std::max(dm - pm, 0.0);
        const double w = dt * grid.mid[i];
        nb_run += w * (rp * served - cp_unit * pm + ns * spill);

        const double x = pm - dm;
        const double over_i = w * c_plus * std::max(x, 0.0);
        const double short_i = w * c_minus * std::max(-x, 0.0);
        cost_run += over_i + short_i;
        over += over_i;
        shortg += short_i;
        reward += w * np * dm;

        const double dp = traj.capacity[i + 1] - traj.capacity[i];
        adj += grid.left[i] *
               (params.inc_cost * std::max(dp, 0.0) + params.dec_cost * std::max(-dp, 0.0));
    }
    acc.net_benefit = nb_run - adj;
    acc.cost_objective = cost_run + adj;
    acc.decomposition = {reward, over, shortg, adj};
    return acc;
}

}  // namespace

double discounted_net_benefit(const SamplePath& path, const ControlTrajectory& traj,
                              const ModelParams& params, double alpha,
                              BenefitDecomposition* decomposition) {
    const DiscountGrid grid = DiscountGrid::build(alpha, path.dt, path.values.size() - 1);
    const PathAccounting acc = account(path, traj, params, grid);
    if (decomposition) *decomposition = acc.decomposition;
    return acc.net_benefit;
}

double discounted_cost_objective(const SamplePath& path, const ControlTrajectory& traj,
                                 const ModelParams& params, double alpha) {
    const DiscountGrid grid = DiscountGrid::build(alpha, path.dt, path.values.size() - 1);
    return account(path, traj, params, grid).cost_objective;
}

double discounted_demand_quadrature(const SamplePath& path, double alpha) {
    const std::size_t k = path.values.size() - 1;
    const double dt = path.dt;
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dm = 0.5 * (path.values[i] + path.values[i + 1]);
        acc += dt * std::exp(-alpha * (static_cast<double>(i) + 0.5) * dt) * dm;
    }
    return acc;
}

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Optimal: return "optimal";
        case PolicyKind::OfflineLp: return "offline-lp";
        case PolicyKind::CfResolve: return "cf";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "optimal") return PolicyKind::Optimal;
    if (name == "offline-lp") return PolicyKind::OfflineLp;
    if (name == "cf") return PolicyKind::CfResolve;
    throw std::invalid_argument("unknown policy: " + name);
}

namespace {

ModelParams apply_sweep(const ModelParams& base, const std::string& var, double value) {
    ModelParams p = base;
    if (var == "sigma") {
        p.sigma = value;
    } else if (var == "C_plus") {
        // Shift R_p with C_p so that N_p (and hence C_-) is unchanged.
        const double np = base.net_primary();
        p.cost_primary = value;
        p.reward_primary = value + np;
    } else if (var == "C_minus") {
        // Raise N_p via R_p, leaving C_+ = C_p untouched.
        const double target_np = base.net_secondary() + value;
        p.reward_primary = base.cost_primary + target_np;
    } else {
        throw std::invalid_argument("unknown sweep variable: " + var);
    }
    return p;
}

}  // namespace

EvaluationReport monte_carlo_compare(const DemandPattern& pattern, const SimConfig& base_cfg,
                                     const ModelParams& base_params,
                                     const std::vector<PolicyKind>& policies,
                                     const SweepSpec& sweep, int n_threads) {
    if (policies.empty()) throw std::invalid_argument("no policies requested");
    if (n_threads < 1) n_threads = 1;

    std::vector<std::pair<std::string, double>> points;
    if (sweep.var.empty()) {
        points.emplace_back("none", 0.0);
    } else {
        for (double v : sweep.values) points.emplace_back(sweep.var, v);
    }

    EvaluationReport report;
    for (const auto& [var, value] : points) {
        ModelParams params = var == "none" ? base_params : apply_sweep(base_params, var, value);
        SimConfig cfg = base_cfg;
        cfg.sigma = params.sigma;
        cfg.validate();
        validate(params);

        const SegmentSchedule sched = SegmentSchedule::build(pattern, cfg);
        const std::vector<ThresholdPolicy> segment_policies =
            solve_segment_policies(pattern, params);
        const DiscountGrid grid = DiscountGrid::build(params.alpha, cfg.dt_hours(), cfg.steps());
        const double d0 = pattern.levels.front();
        const double p0 = d0 + cfg.x0;
        const int n = cfg.n_paths;
        const std::size_t n_pol = policies.size();

        std::vector<std::vector<double>> nb(n_pol, std::vector<double>(n));
        std::vector<std::vector<BenefitDecomposition>> dec(
            n_pol, std::vector<BenefitDecomposition>(n));

        auto worker = [&](int lo, int hi) {
            SamplePath path;
            path.dt = cfg.dt_hours();
            for (int j = lo; j < hi; ++j) {
                generate_path_values(sched, cfg, d0, static_cast<std::uint64_t>(j), path.values);
                path.path_index = static_cast<std::uint64_t>(j);
                for (std::size_t pi = 0; pi < n_pol; ++pi) {
                    ControlTrajectory traj;
                    switch (policies[pi]) {
                        case PolicyKind::Optimal:
                            traj = simulate_optimal(path, sched, params, p0, segment_policies);
                            break;
                        case PolicyKind::OfflineLp:
                            traj = offline_lp_solve(path, cfg, params, p0);
                            break;
                        case PolicyKind::CfResolve:
                            traj = cf_resolve(path, cfg, params, p0);
                            break;
                    }
                    const PathAccounting acc = account(path, traj, params, grid);
                    nb[pi][j] = acc.net_benefit;
                    dec[pi][j] = acc.decomposition;
                }
            }
        };

        if (n_threads == 1) {
            worker(0, n);
        } else {
            std::vector<std::thread> pool;
            const int chunk = (n + n_threads - 1) / n_threads;
            std::exception_ptr err;
            std::mutex err_mu;
            for (int t = 0; t < n_threads; ++t) {
                const int lo = t * chunk;
                const int hi = std::min(n, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&, lo, hi] {
                    try {
                        worker(lo, hi);
                    } catch (...) {
                        std::lock_guard<std::mutex> g(err_mu);
                        if (!err) err = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            if (err) std::rethrow_exception(err);
        }

        std::vector<double> means(n_pol);
        std::vector<double> half(n_pol);
        std::vector<BenefitDecomposition> dec_mean(n_pol);
        std::vector<double> scratch(n);
        for (std::size_t pi = 0; pi < n_pol; ++pi) {
            const double mean = pairwise_sum(nb[pi]) / n;
            for (int j = 0; j < n; ++j) scratch[j] = (nb[pi][j] - mean) * (nb[pi][j] - mean);
            const double var_hat = n > 1 ? pairwise_sum(scratch) / (n - 1) : 0.0;
            means[pi] = mean;
            half[pi] = 1.96 * std::sqrt(var_hat / n);
            auto comp = [&](double BenefitDecomposition::*f) {
                for (int j = 0; j < n; ++j) scratch[j] = dec[pi][j].*f;
                return pairwise_sum(scratch) / n;
            };
            dec_mean[pi] = {comp(&BenefitDecomposition::reward),
                            comp(&BenefitDecomposition::overage),
                            comp(&BenefitDecomposition::shortage),
                            comp(&BenefitDecomposition::adjustment)};
        }

        std::size_t ref = 0;
        for (std::size_t pi = 0; pi < n_pol; ++pi)
            if (policies[pi] == PolicyKind::Optimal) ref = pi;
        for (std::size_t pi = 0; pi < n_pol; ++pi) {
            ReportRow row;
            row.sweep_var = var;
            row.value = value;
            row.policy = to_string(policies[pi]);
            row.mean_nb = means[pi];
            row.ci_lo = means[pi] - half[pi];
            row.ci_hi = means[pi] + half[pi];
            row.rel_improvement = pi == ref ? 0.0 : (means[ref] - means[pi]) / means[pi];
            report.rows.push_back(std::move(row));
            report.decomposition.push_back(dec_mean[pi]);
        }
    }
    return report;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void emit_report(const EvaluationReport& report, std::ostream& out) {
    out << "sweep_var,value,policy,mean_nb,ci_lo,ci_hi,rel_improvement\n";
    for (const auto& r : report.rows) {
        out << r.sweep_var << ',' << fmt_double(r.value) << ',' << r.policy << ','
            << fmt_double(r.mean_nb) << ',' << fmt_double(r.ci_lo) << ',' << fmt_double(r.ci_hi)
            << ',' << fmt_double(r.rel_improvement) << '\n';
    }
}

EvaluationReport parse_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty report");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "sweep_var,value,policy,mean_nb,ci_lo,ci_hi,rel_improvement")
        throw std::invalid_argument("bad report header");
    EvaluationReport out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7) throw std::invalid_argument("bad report row: " + line);
        ReportRow r;
        r.sweep_var = fields[0];
        r.value = std::stod(fields[1]);
        r.policy = fields[2];
        r.mean_nb = std::stod(fields[3]);
        r.ci_lo = std::stod(fields[4]);
        r.ci_hi = std::stod(fields[5]);
        r.rel_improvement = std::stod(fields[6]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

bool rows_equal(const EvaluationReport& a, const EvaluationReport& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (x.sweep_var != y.sweep_var || x.policy != y.policy) return false;
        if (x.value != y.value || x.mean_nb != y.mean_nb || x.ci_lo != y.ci_lo ||
            x.ci_hi != y.ci_hi || x.rel_improvement != y.rel_improvement)
            return false;
    }
    return true;
}

}  // namespace riskhedge
