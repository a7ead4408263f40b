#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskhedge/config.hpp"
#include "riskhedge/contract.hpp"
#include "riskhedge/demand.hpp"
#include "riskhedge/evaluate.hpp"
#include "riskhedge/model.hpp"
#include "riskhedge/oracle.hpp"
#include "riskhedge/policies.hpp"
#include "riskhedge/threshold.hpp"
#include "riskhedge/value_function.hpp"

namespace {

using namespace riskhedge;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

KeyValueConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    return KeyValueConfig::parse(in);
}

DemandPattern load_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open pattern: " + path);
    return load_pattern(in);
}

std::ostream& open_sink(const std::string& out_path, std::ofstream& file) {
    if (out_path.empty()) return std::cout;
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot open output file: " + out_path);
    return file;
}

SweepSpec parse_sweep(const std::string& spec) {
    SweepSpec out;
    if (spec.empty()) return out;
    std::stringstream ss(spec);
    std::string var, lo_s, hi_s, n_s;
    if (!std::getline(ss, var, ':') || !std::getline(ss, lo_s, ':') ||
        !std::getline(ss, hi_s, ':') || !std::getline(ss, n_s))
        throw std::invalid_argument("sweep must be var:lo:hi:steps");
    const double lo = std::stod(lo_s);
    const double hi = std::stod(hi_s);
    const int n = std::stoi(n_s);
    if (n < 1) throw std::invalid_argument("sweep needs at least one step");
    out.var = var;
    for (int i = 0; i < n; ++i)
        out.values.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
}

struct CommonFlags {
    std::string config_path;
    std::string pattern_path;
    std::string out_path;
    double dt = -1.0, gamma = -1.0, x0_flag = std::nan("");
    long paths = -1, seed = -1;

    void apply(SimConfig& cfg) const {
        if (dt > 0.0) cfg.dt_seconds = dt;
        if (gamma > 0.0) cfg.gamma_seconds = gamma;
        if (paths > 0) cfg.n_paths = static_cast<int>(paths);
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!std::isnan(x0_flag)) cfg.x0 = x0_flag;
        cfg.validate();
    }
};

void add_sim_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--paths", flags.paths, "number of sample paths");
    cmd->add_option("--seed", flags.seed, "base RNG seed");
    cmd->add_option("--dt", flags.dt, "time step in seconds");
    cmd->add_option("--gamma", flags.gamma, "slot length in seconds");
    cmd->add_option("--x0", flags.x0_flag, "initial imbalance X(0)");
}

int run_thresholds(const CommonFlags& flags) {
    const KeyValueConfig cfg = load_config(flags.config_path);
    check_single_resource_keys(cfg);
    const DerivedModel model(model_from_config(cfg));
    ThresholdDiagnostics diag;
    const ThresholdPolicy policy = solve_thresholds(model, &diag);

    std::ofstream file;
    std::ostream& out = open_sink(flags.out_path, file);
    out << "case=" << to_string(policy.tag) << "\n";
    out << "L=" << fmt(policy.lower) << "\n";
    out << "U=" << fmt(policy.upper) << "\n";
    if (model.params.inc_cost == 0.0 && model.params.dec_cost == 0.0 &&
        (policy.tag == CaseTag::Case1_I || policy.tag == CaseTag::Case1_II ||
         policy.tag == CaseTag::Case1_III))
        out << "delta=" << fmt(solve_zero_adjustment_delta(model)) << "\n";
    out << "residual1=" << fmt(diag.residual1) << "\n";
    out << "residual2=" << fmt(diag.residual2) << "\n";
    return 0;
}

int run_value(const CommonFlags& flags, double xmin, double xmax, int points) {
    const KeyValueConfig cfg = load_config(flags.config_path);
    check_single_resource_keys(cfg);
    const DerivedModel model(model_from_config(cfg));
    const ThresholdPolicy policy = solve_thresholds(model);
    const PiecewiseValueFunction y = construct_value_function(model, policy);

    if (xmin >= xmax) {
        const double pad = 5.0 * model.params.sigma / std::sqrt(2.0 * model.params.alpha) + 1.0;
        xmin = (std::isfinite(policy.lower) ? std::min(policy.lower, 0.0) : 0.0) - pad;
        xmax = (std::isfinite(policy.upper) ? std::max(policy.upper, 0.0) : 0.0) + pad;
    }
    std::ofstream file;
    std::ostream& out = open_sink(flags.out_path, file);
    out << "x,Y,Y',Y''\n";
    for (int i = 0; i <= points; ++i) {
        const double x = xmin + (xmax - xmin) * i / points;
        out << fmt(x) << ',' << fmt(y.value(x)) << ',' << fmt(y.deriv(x)) << ','
            << fmt(y.deriv2(x)) << "\n";
    }
    return 0;
}

int run_simulate(const CommonFlags& flags, const std::string& policy_name,
                 const std::string& traj_path) {
    const KeyValueConfig cfg = load_config(flags.config_path);
    check_single_resource_keys(cfg);
    const ModelParams params = model_from_config(cfg);
    SimConfig sim = sim_from_config(cfg);
    sim.sigma = params.sigma;
    flags.apply(sim);
    const DemandPattern pattern = load_pattern_file(flags.pattern_path);
    sim.horizon_hours = pattern.horizon();
    sim.validate();
    const PolicyKind kind = policy_kind_from_string(policy_name);

    const SegmentSchedule sched = SegmentSchedule::build(pattern, sim);
    const std::vector<ThresholdPolicy> segment_policies =
        kind == PolicyKind::Optimal ? solve_segment_policies(pattern, params)
                                    : std::vector<ThresholdPolicy>{};
    const double d0 = pattern.levels.front();
    const double p0 = d0 + sim.x0;

    std::ofstream file;
    std::ostream& out = open_sink(flags.out_path, file);
    out << "path_id,policy,objective,net_benefit\n";
    std::ofstream traj_file;
    if (!traj_path.empty()) {
        traj_file.open(traj_path);
        if (!traj_file) throw std::runtime_error("cannot open output file: " + traj_path);
        traj_file << "path_id,t,D,P\n";
    }

    SamplePath path;
    path.dt = sim.dt_hours();
    for (int j = 0; j < sim.n_paths; ++j) {
        generate_path_values(sched, sim, d0, static_cast<std::uint64_t>(j), path.values);
        path.path_index = static_cast<std::uint64_t>(j);
        ControlTrajectory traj;
        switch (kind) {
            case PolicyKind::Optimal:
                traj = simulate_optimal(path, sched, params, p0, segment_policies);
                break;
            case PolicyKind::OfflineLp: traj = offline_lp_solve(path, sim, params, p0); break;
            case PolicyKind::CfResolve: traj = cf_resolve(path, sim, params, p0); break;
        }
        const double nb = discounted_net_benefit(path, traj, params, params.alpha);
        const double obj = discounted_cost_objective(path, traj, params, params.alpha);
        out << j << ',' << to_string(kind) << ',' << fmt(obj) << ',' << fmt(nb) << "\n";
        if (traj_file.is_open()) {
            for (std::size_t i = 0; i < path.values.size(); ++i)
                traj_file << j << ',' << fmt(i * path.dt) << ',' << fmt(path.values[i]) << ','
                          << fmt(traj.capacity[i]) << "\n";
        }
    }
    return 0;
}

int run_compare(const CommonFlags& flags, const std::string& sweep_spec, int threads) {
    const KeyValueConfig cfg = load_config(flags.config_path);
    check_single_resource_keys(cfg);
    const ModelParams params = model_from_config(cfg);
    SimConfig sim = sim_from_config(cfg);
    sim.sigma = params.sigma;
    flags.apply(sim);
    const DemandPattern pattern = load_pattern_file(flags.pattern_path);
    sim.horizon_hours = pattern.horizon();
    sim.validate();

    const SweepSpec sweep = parse_sweep(sweep_spec);
    const std::vector<PolicyKind> policies = {PolicyKind::Optimal, PolicyKind::OfflineLp,
                                              PolicyKind::CfResolve};
    const EvaluationReport report =
        monte_carlo_compare(pattern, sim, params, policies, sweep, threads);
    std::ofstream file;
    std::ostream& out = open_sink(flags.out_path, file);
    emit_report(report, out);
    return 0;
}

int run_contract(const CommonFlags& flags, double grid_step, double d0) {
    const KeyValueConfig cfg = load_config(flags.config_path);
    const MultiParams mp = multi_from_config(cfg);
    const double x0 = std::isnan(flags.x0_flag) ? cfg.number_or("x0", 0.0) : flags.x0_flag;
    const double demand0 = std::isnan(d0) ? cfg.number_or("D0", 0.0) : d0;

    std::ofstream file;
    std::ostream& out = open_sink(flags.out_path, file);
    for (std::size_t i = 1; i <= mp.count(); ++i) out << "w_" << i << ',';
    out << "L,U,J_w\n";

    const long units = std::lround(1.0 / grid_step);
    std::vector<long> counts(mp.count(), 0);
    const std::function<void(std::size_t, long)> emit_lattice = [&](std::size_t i, long rem) {
        if (i + 1 == counts.size()) {
            counts[i] = rem;
            ContractVector cv;
            cv.w.resize(counts.size());
            for (std::size_t j = 0; j < counts.size(); ++j)
                cv.w[j] = static_cast<double>(counts[j]) / static_cast<double>(units);
            try {
                const ThresholdPolicy pol = solve_thresholds_for_contract(mp, cv);
                const double jw = contract_net_benefit(mp, cv, x0, demand0);
                for (double wv : cv.w) out << fmt(wv) << ',';
                out << fmt(pol.lower) << ',' << fmt(pol.upper) << ',' << fmt(jw) << "\n";
            } catch (const std::exception&) {
                // infeasible lattice point; omitted from the table
            }
            return;
        }
        for (long c = 0; c <= rem; ++c) {
            counts[i] = c;
            emit_lattice(i + 1, rem - c);
        }
    };
    emit_lattice(0, units);

    const ContractOptimum best = optimize_contract(mp, x0, grid_step, demand0);
    out << "# optimum";
    for (double wv : best.contract.w) out << ' ' << fmt(wv);
    out << " J=" << fmt(best.net_benefit) << "\n";
    return 0;
}

int run_verify(const CommonFlags& flags);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"threshold-policy solver and simulator for bounded-velocity capacity control"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string policy_name = "optimal";
    std::string sweep_spec;
    std::string traj_path;
    double xmin = 0.0, xmax = 0.0, grid_step = 0.05, d0 = std::nan("");
    int points = 200, threads = 1;

    auto* thresholds = app.add_subcommand("thresholds", "solve (L, U) and print the case");
    thresholds->add_option("--config", flags.config_path)->required();
    thresholds->add_option("--out", flags.out_path);

    auto* value = app.add_subcommand("value", "emit the value function on a grid as CSV");
    value->add_option("--config", flags.config_path)->required();
    value->add_option("--out", flags.out_path);
    value->add_option("--xmin", xmin);
    value->add_option("--xmax", xmax);
    value->add_option("--points", points);

    auto* simulate = app.add_subcommand("simulate", "run one policy over sample paths");
    simulate->add_option("--config", flags.config_path)->required();
    simulate->add_option("--pattern", flags.pattern_path)->required();
    simulate->add_option("--policy", policy_name)
        ->check(CLI::IsMember({"optimal", "offline-lp", "cf"}));
    simulate->add_option("--out", flags.out_path);
    simulate->add_option("--traj-out", traj_path, "full trajectory CSV");
    add_sim_flags(simulate, flags);

    auto* compare = app.add_subcommand("compare", "common-random-number policy comparison");
    compare->add_option("--config", flags.config_path)->required();
    compare->add_option("--pattern", flags.pattern_path)->required();
    compare->add_option("--sweep", sweep_spec, "var:lo:hi:steps (sigma, C_plus, C_minus)");
    compare->add_option("--out", flags.out_path);
    compare->add_option("--threads", threads);
    add_sim_flags(compare, flags);

    auto* contract = app.add_subcommand("contract", "sweep and optimize the contract vector");
    contract->add_option("--config", flags.config_path)->required();
    contract->add_option("--out", flags.out_path);
    contract->add_option("--grid-step", grid_step);
    contract->add_option("--x0", flags.x0_flag);
    contract->add_option("--d0", d0, "initial demand level for the reward term");

    auto* verify = app.add_subcommand("verify", "run the invariant and oracle suite");
    verify->add_option("--config", flags.config_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (thresholds->parsed()) return run_thresholds(flags);
        if (value->parsed()) return run_value(flags, xmin, xmax, points);
        if (simulate->parsed()) return run_simulate(flags, policy_name, traj_path);
        if (compare->parsed()) return run_compare(flags, sweep_spec, threads);
        if (contract->parsed()) return run_contract(flags, grid_step, d0);
        if (verify->parsed()) return run_verify(flags);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

namespace {

int run_verify(const CommonFlags& flags) {
    const KeyValueConfig cfg = load_config(flags.config_path);
    check_single_resource_keys(cfg);
    const ModelParams params = model_from_config(cfg);
    SimConfig sim = sim_from_config(cfg);
    sim.sigma = params.sigma;

    int failures = 0;
    const auto check = [&](const char* name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS " : "FAIL ") << name;
        if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    };

    const DerivedModel model(params);

    // quadratic-root residuals
    {
        const auto& r = model.roots;
        const double s2 = params.sigma * params.sigma;
        auto resid = [&](double y, double theta) {
            return std::abs(0.5 * s2 * y * y + (theta - params.b) * y - params.alpha);
        };
        const double worst =
            std::max({resid(r.r1, 0.0), resid(r.r2, 0.0), resid(r.s1, params.theta_u),
                      resid(r.s2, params.theta_u), resid(r.t1, params.theta_l),
                      resid(r.t2, params.theta_l)});
        check("root-residuals", worst <= 1e-12 * params.alpha * 100.0, fmt(worst));
    }

    // first-order identity of the sub-case I gap function at y = 1
    {
        const auto& c = model.coeffs;
        const double lhs = c.b1 + c.j1 + c.a;
        const double rhs =
            params.alpha * (model.roots.r1 - model.roots.r2) * (-params.inc_cost - params.dec_cost);
        check("gap-fn-identity",
              std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)), fmt(lhs - rhs));
    }

    ThresholdDiagnostics diag;
    const ThresholdPolicy policy = solve_thresholds(model, &diag);
    check("threshold-residuals", std::max(diag.residual1, diag.residual2) <= 1e-8,
          fmt(std::max(diag.residual1, diag.residual2)));

    const PiecewiseValueFunction y = construct_value_function(model, policy);
    const ValueFunctionReport rep = verify_value_function(model, policy, y);
    check("smooth-fit-value", rep.max_value_mismatch <= 1e-8, fmt(rep.max_value_mismatch));
    check("smooth-fit-deriv", rep.max_deriv_mismatch <= 1e-8, fmt(rep.max_deriv_mismatch));
    check("convexity", rep.min_scaled_convexity >= -1e-8, fmt(rep.min_scaled_convexity));
    check("derivative-band", rep.max_band_violation <= 1e-8, fmt(rep.max_band_violation));
    check("hjb-residual", rep.max_scaled_hjb <= 1e-8, fmt(rep.max_scaled_hjb));
    check("linear-growth", std::isfinite(rep.growth_ratio), fmt(rep.growth_ratio));

    // finite-difference oracle agreement
    {
        const HjbSolution fd = hjb_solve_auto(params, policy, 2000, 1e-9);
        const double dx = fd.x[1] - fd.x[0];
        const bool l_ok = std::isfinite(policy.lower) == std::isfinite(fd.switch_lower) &&
                          (!std::isfinite(policy.lower) ||
                           std::abs(policy.lower - fd.switch_lower) <= 2.0 * dx);
        const bool u_ok = std::isfinite(policy.upper) == std::isfinite(fd.switch_upper) &&
                          (!std::isfinite(policy.upper) ||
                           std::abs(policy.upper - fd.switch_upper) <= 2.0 * dx);
        check("hjb-oracle-L", l_ok,
              fmt(policy.lower) + " vs " + fmt(fd.switch_lower));
        check("hjb-oracle-U", u_ok,
              fmt(policy.upper) + " vs " + fmt(fd.switch_upper));
    }

    // determinism of a small comparison run
    {
        SimConfig small = sim;
        small.n_paths = 16;
        const DemandPattern pattern = flat_pattern(4.5, small.horizon_hours);
        const std::vector<PolicyKind> pols = {PolicyKind::Optimal, PolicyKind::OfflineLp,
                                              PolicyKind::CfResolve};
        const EvaluationReport a = monte_carlo_compare(pattern, small, params, pols, {}, 1);
        const EvaluationReport b = monte_carlo_compare(pattern, small, params, pols, {}, 4);
        check("determinism", rows_equal(a, b));
    }

    std::cout << (failures == 0 ? "OVERALL PASS" : "OVERALL FAIL") << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace
