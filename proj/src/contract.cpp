#include "riskhedge/contract.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "riskhedge/value_function.hpp"

namespace riskhedge {

void validate(const MultiParams& mp) {
    const std::size_t n = mp.count();
    if (n < 1) throw std::invalid_argument("need at least one primary resource");
    if (mp.cost_primary.size() != n || mp.inc_cost.size() != n || mp.dec_cost.size() != n ||
        mp.theta_l.size() != n || mp.theta_u.size() != n)
        throw std::invalid_argument("per-resource lists must have equal length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mp.reward_primary[i] > mp.cost_primary[i]))
            throw std::invalid_argument("R_p must exceed C_p for every resource");
        if (!(mp.cost_primary[i] >= 0.0) || !(mp.inc_cost[i] >= 0.0) || !(mp.dec_cost[i] >= 0.0))
            throw std::invalid_argument("per-resource costs must be nonnegative");
        if (!(mp.theta_l[i] < 0.0) || !(mp.theta_u[i] > 0.0))
            throw std::invalid_argument("per-resource velocity bounds must straddle zero");
    }
    if (!(mp.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(mp.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(mp.reward_secondary > mp.cost_secondary))
        throw std::invalid_argument("R_s must exceed C_s");
}

void validate(const ContractVector& cv, std::size_t n_resources) {
    if (cv.w.size() != n_resources) throw std::invalid_argument("contract length mismatch");
    double sum = 0.0;
    for (double wi : cv.w) {
        if (!(wi >= 0.0)) throw std::invalid_argument("contract weights must be nonnegative");
        sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("contract weights must sum to 1");
}

ModelParams aggregate_params(const MultiParams& mp, const ContractVector& cv) {
    validate(mp);
    validate(cv, mp.count());

    ModelParams p{};
    p.b = mp.b;
    p.sigma = mp.sigma;
    p.alpha = mp.alpha;
    p.reward_secondary = mp.reward_secondary;
    p.cost_secondary = mp.cost_secondary;

    double tl = -std::numeric_limits<double>::infinity();
    double tu = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mp.count(); ++i) {
        const double wi = cv.w[i];
        p.reward_primary += wi * mp.reward_primary[i];
        p.cost_primary += wi * mp.cost_primary[i];
        p.inc_cost += wi * mp.inc_cost[i];
        p.dec_cost += wi * mp.dec_cost[i];
        if (wi > 0.0) {
            tl = std::max(tl, mp.theta_l[i] / wi);
            tu = std::min(tu, mp.theta_u[i] / wi);
        }
    }
    if (!(tl < 0.0 && tu > 0.0)) throw std::invalid_argument("degenerate velocity window");
    p.theta_l = tl;
    p.theta_u = tu;
    if (!(p.net_primary() > p.net_secondary()))
        throw std::invalid_argument("invalid aggregate economics");
    return p;
}

ThresholdPolicy solve_thresholds_for_contract(const MultiParams& mp, const ContractVector& cv) {
    return solve_thresholds(DerivedModel(aggregate_params(mp, cv)));
}

double expected_discounted_demand(double d0, double b, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    return d0 / alpha + b / (alpha * alpha);
}

double contract_net_benefit(const MultiParams& mp, const ContractVector& cv, double x,
                            double d0) {
    const ModelParams agg = aggregate_params(mp, cv);
    const DerivedModel model(agg);
    const ThresholdPolicy policy = solve_thresholds(model);
    const PiecewiseValueFunction vf = construct_value_function(model, policy);
    return agg.net_primary() * expected_discounted_demand(d0, agg.b, agg.alpha) - vf.value(x);
}

ContractOptimum optimize_contract(const MultiParams& mp, double x, double grid_step, double d0) {
    validate(mp);
    if (!(grid_step > 0.0 && grid_step <= 0.25))
        throw std::invalid_argument("grid_step must be in (0, 1/4]");
    const std::size_t n = mp.count();
    const long units = std::lround(1.0 / grid_step);

    ContractOptimum best;
    bool found = false;

    // Lexicographic enumeration of lattice compositions of `units`; strict
    // improvement keeps the lexicographically smallest argmax on ties.
    std::vector<long> counts(n, 0);
    ContractVector cv;
    cv.w.resize(n);
    const std::function<void(std::size_t, long)> enumerate = [&](std::size_t i, long rem) {
        if (i + 1 == n) {
            counts[i] = rem;
            for (std::size_t j = 0; j < n; ++j)
                cv.w[j] = static_cast<double>(counts[j]) / static_cast<double>(units);
            try {
                const double jw = contract_net_benefit(mp, cv, x, d0);
                if (!found || jw > best.net_benefit) {
                    best.contract = cv;
                    best.net_benefit = jw;
                    found = true;
                }
            } catch (const std::exception&) {
                // infeasible lattice point (degenerate window or economics)
            }
            return;
        }
        for (long c = 0; c <= rem; ++c) {
            counts[i] = c;
            enumerate(i + 1, rem - c);
        }
    };
    enumerate(0, units);
    if (!found) throw std::runtime_error("no feasible contract");
    return best;
}

}  // namespace riskhedge
