#include "riskhedge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskhedge/evaluate.hpp"
#include "riskhedge/rng.hpp"

namespace riskhedge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tridiag {
    std::vector<double> sub, diag, sup, rhs;

    std::vector<double> solve() const {
        const std::size_t n = diag.size();
        std::vector<double> c(n), d(n), x(n);
        c[0] = sup[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = diag[i] - sub[i] * c[i - 1];
            c[i] = sup[i] / m;
            d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
        }
        x[n - 1] = d[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
        return x;
    }
};

}  // namespace

HjbSolution hjb_value_iteration(const ModelParams& params, double xmin, double xmax, int grid_n,
                                double tol) {
    if (grid_n < 10) throw std::invalid_argument("grid_n too small");
    const double dx = (xmax - xmin) / grid_n;
    const int n = grid_n + 1;
    const double cp = params.overage_cost();
    const double cm = params.shortage_cost();
    const double diff = 0.5 * params.sigma * params.sigma / (dx * dx);

    const double thetas[3] = {params.theta_l, 0.0, params.theta_u};
    const double adj[3] = {-params.dec_cost * params.theta_l, 0.0,
                           params.inc_cost * params.theta_u};

    HjbSolution out;
    out.x.resize(n);
    std::vector<double> cost(n);
    for (int i = 0; i < n; ++i) {
        out.x[i] = xmin + i * dx;
        cost[i] = cp * std::max(out.x[i], 0.0) + cm * std::max(-out.x[i], 0.0);
    }

    // index into thetas per interior node; start from no action
    std::vector<int> policy(n, 1);
    std::vector<double> value(n, 0.0);

    auto evaluate_policy = [&]() {
        Tridiag sys;
        sys.sub.assign(n, 0.0);
        sys.diag.assign(n, 0.0);
        sys.sup.assign(n, 0.0);
        sys.rhs.assign(n, 0.0);
        // derivative clamps at the boundaries
        sys.diag[0] = 1.0;
        sys.sup[0] = -1.0;
        sys.rhs[0] = dx * cm / params.alpha;
        sys.diag[n - 1] = 1.0;
        sys.sub[n - 1] = -1.0;
        sys.rhs[n - 1] = dx * cp / params.alpha;
        for (int i = 1; i + 1 < n; ++i) {
            const double mu = thetas[policy[i]] - params.b;
            const double up = std::max(mu, 0.0) / dx;
            const double dn = std::max(-mu, 0.0) / dx;
            sys.sub[i] = -(diff + dn);
            sys.sup[i] = -(diff + up);
            sys.diag[i] = params.alpha + 2.0 * diff + up + dn;
            sys.rhs[i] = cost[i] + adj[policy[i]];
        }
        return sys.solve();
    };

    auto local_update = [&](const std::vector<double>& v, int i, int c) {
        const double mu = thetas[c] - params.b;
        const double up = std::max(mu, 0.0) / dx;
        const double dn = std::max(-mu, 0.0) / dx;
        return ((diff + up) * v[i + 1] + (diff + dn) * v[i - 1] + cost[i] + adj[c]) /
               (params.alpha + 2.0 * diff + up + dn);
    };

    // Preference order on near-ties: no action, then push up, then push down.
    auto improved = [&](const std::vector<double>& v, std::vector<int>& pol) {
        bool changed = false;
        for (int i = 1; i + 1 < n; ++i) {
            int best = 1;
            double best_q = local_update(v, i, 1);
            for (int c : {2, 0}) {
                const double q = local_update(v, i, c);
                if (q < best_q - 1e-12 * (1.0 + std::abs(best_q))) {
                    best_q = q;
                    best = c;
                }
            }
            if (best != pol[i]) {
                pol[i] = best;
                changed = true;
            }
        }
        return changed;
    };

    double change = kInf;
    int it = 0;
    for (; it < 300; ++it) {
        const std::vector<double> v = evaluate_policy();
        change = 0.0;
        for (int i = 0; i < n; ++i) change = std::max(change, std::abs(v[i] - value[i]));
        value = v;
        const bool moved = improved(value, policy);
        if (!moved && change <= tol) break;
    }
    if (change > tol) throw std::runtime_error("HJB iteration cap without convergence");

    // One explicit Bellman sweep measures the fixed-point residual.
    double final_change = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        double best_q = kInf;
        for (int c = 0; c < 3; ++c) best_q = std::min(best_q, local_update(value, i, c));
        final_change = std::max(final_change, std::abs(best_q - value[i]));
    }

    out.value = value;
    out.control.resize(n);
    for (int i = 0; i < n; ++i) out.control[i] = thetas[policy[i]];
    out.control[0] = out.control[1];
    out.control[n - 1] = out.control[n - 2];
    out.iterations = it + 1;
    out.final_change = final_change;

    // Switching points: policy block boundaries, refined by interpolating
    // the smooth-fit crossings Y' = -I_p and Y' = D_p within the cell.
    auto deriv_at = [&](int i) { return (value[i + 1] - value[i - 1]) / (2.0 * dx); };
    out.switch_lower = -kInf;
    out.switch_upper = kInf;
    int last_up = -1, first_down = -1;
    for (int i = 1; i + 1 < n; ++i) {
        if (policy[i] == 2) last_up = i;
        if (policy[i] == 0 && first_down < 0) first_down = i;
    }
    if (last_up >= 0) {
        out.switch_lower = out.x[last_up];
        if (last_up >= 1 && last_up + 2 < n) {
            const double g0 = deriv_at(last_up) + params.inc_cost;
            const double g1 = deriv_at(last_up + 1) + params.inc_cost;
            const double frac = (g1 - g0) != 0.0 ? std::clamp(-g0 / (g1 - g0), 0.0, 1.0) : 0.5;
            out.switch_lower = out.x[last_up] + frac * dx;
        }
    }
    if (first_down >= 0) {
        out.switch_upper = out.x[first_down];
        if (first_down >= 2 && first_down + 1 < n) {
            const double g0 = deriv_at(first_down - 1) - params.dec_cost;
            const double g1 = deriv_at(first_down) - params.dec_cost;
            const double frac = (g1 - g0) != 0.0 ? std::clamp(-g0 / (g1 - g0), 0.0, 1.0) : 0.5;
            out.switch_upper = out.x[first_down - 1] + frac * dx;
        }
    }
    return out;
}

HjbSolution hjb_solve_auto(const ModelParams& params, const ThresholdPolicy& hint, int grid_n,
                           double tol) {
    const double pad = 5.0 * params.sigma / std::sqrt(2.0 * params.alpha) + 1.0;
    const double lo = (std::isfinite(hint.lower) ? std::min(hint.lower, 0.0) : 0.0) - pad;
    const double hi = (std::isfinite(hint.upper) ? std::max(hint.upper, 0.0) : 0.0) + pad;
    return hjb_value_iteration(params, lo, hi, grid_n, tol);
}

GridSearchResult policy_grid_search(const ModelParams& params, const SimConfig& cfg,
                                    const std::vector<double>& lower_grid,
                                    const std::vector<double>& upper_grid,
                                    const ThresholdPolicy& reference) {
    cfg.validate();
    const int k = cfg.steps();
    const double dt = cfg.dt_hours();
    const int n_paths = cfg.n_paths;

    std::vector<std::pair<double, double>> pairs;
    for (double l : lower_grid)
        for (double u : upper_grid)
            if (l <= u) pairs.emplace_back(l, u);
    pairs.emplace_back(reference.lower, reference.upper);
    const std::size_t n_pairs = pairs.size();
    const std::size_t ref = n_pairs - 1;

    std::vector<double> df_mid(k), df_left(k);
    for (int i = 0; i < k; ++i) {
        df_mid[i] = std::exp(-params.alpha * (i + 0.5) * dt);
        df_left[i] = std::exp(-params.alpha * i * dt);
    }

    // cost[pair][path]
    std::vector<std::vector<double>> cost(n_pairs, std::vector<double>(n_paths));
    std::vector<double> shock(k);
    const double sq = params.sigma * std::sqrt(dt);
    for (int j = 0; j < n_paths; ++j) {
        for (int i = 0; i < k; ++i)
            shock[i] = -params.b * dt - sq * normal_draw(cfg.seed, static_cast<std::uint64_t>(j),
                                                         static_cast<std::uint64_t>(i));
        for (std::size_t pi = 0; pi < n_pairs; ++pi) {
            const double lo = pairs[pi].first;
            const double hi = pairs[pi].second;
            double x = cfg.x0;
            double acc = 0.0;
            for (int i = 0; i < k; ++i) {
                double th = 0.0;
                if (x < lo)
                    th = params.theta_u;
                else if (x > hi)
                    th = params.theta_l;
                const double xn = x + th * dt + shock[i];
                const double xm = 0.5 * (x + xn);
                acc += dt * df_mid[i] * (params.overage_cost() * std::max(xm, 0.0) +
                                         params.shortage_cost() * std::max(-xm, 0.0));
                acc += df_left[i] * dt *
                       (params.inc_cost * std::max(th, 0.0) + params.dec_cost * std::max(-th, 0.0));
                x = xn;
            }
            cost[pi][j] = acc;
        }
    }

    GridSearchResult out;
    out.reference_index = ref;
    std::vector<double> means(n_pairs);
    std::vector<double> scratch(n_paths);
    for (std::size_t pi = 0; pi < n_pairs; ++pi) {
        for (int j = 0; j < n_paths; ++j) scratch[j] = cost[pi][j];
        means[pi] = pairwise_sum(scratch) / n_paths;
    }
    std::size_t best = 0;
    for (std::size_t pi = 1; pi < n_pairs; ++pi)
        if (means[pi] < means[best]) best = pi;
    out.best_index = best;

    auto paired_stats = [&](std::size_t a, std::size_t b, double& mean_d, double& se_d) {
        for (int j = 0; j < n_paths; ++j) scratch[j] = cost[a][j] - cost[b][j];
        mean_d = pairwise_sum(scratch) / n_paths;
        double ss = 0.0;
        for (int j = 0; j < n_paths; ++j) ss += (scratch[j] - mean_d) * (scratch[j] - mean_d);
        se_d = n_paths > 1 ? std::sqrt(ss / (n_paths - 1) / n_paths) : 0.0;
    };

    out.table.resize(n_pairs);
    out.reference_unbeaten = true;
    for (std::size_t pi = 0; pi < n_pairs; ++pi) {
        GridPoint gp;
        gp.lower = pairs[pi].first;
        gp.upper = pairs[pi].second;
        gp.mean_cost = means[pi];
        double mean_d = 0.0, se_d = 0.0;
        if (pi != best) paired_stats(pi, best, mean_d, se_d);
        gp.se_vs_best = se_d;
        gp.indistinguishable = pi == best || std::abs(mean_d) <= 1.96 * se_d;
        out.table[pi] = gp;
        if (pi != ref) {
            double md = 0.0, se = 0.0;
            paired_stats(pi, ref, md, se);
            if (md < 0.0 && std::abs(md) > 1.96 * se) out.reference_unbeaten = false;
        }
    }
    out.reference_in_confidence_set = out.table[ref].indistinguishable;
    return out;
}

}  // namespace riskhedge
