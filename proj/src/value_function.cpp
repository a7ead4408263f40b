#include "riskhedge/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace riskhedge {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ValueRegion::value(double x) const {
    double v = slope * x + intercept;
    for (const auto& t : terms) v += t.coef * std::exp(t.rate * (x - t.anchor));
    return v;
}

double ValueRegion::deriv(double x) const {
    double v = slope;
    for (const auto& t : terms) v += t.coef * t.rate * std::exp(t.rate * (x - t.anchor));
    return v;
}

double ValueRegion::deriv2(double x) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.coef * t.rate * t.rate * std::exp(t.rate * (x - t.anchor));
    return v;
}

PiecewiseValueFunction::PiecewiseValueFunction(std::vector<double> breakpoints,
                                               std::vector<ValueRegion> regions)
    : breakpoints_(std::move(breakpoints)), regions_(std::move(regions)) {
    if (regions_.size() != breakpoints_.size() + 1)
        throw std::invalid_argument("regions must be breakpoints + 1");
}

std::size_t PiecewiseValueFunction::region_index(double x) const {
    std::size_t i = 0;
    while (i < breakpoints_.size() && x >= breakpoints_[i]) ++i;
    return i;
}

double PiecewiseValueFunction::value(double x) const { return regions_[region_index(x)].value(x); }
double PiecewiseValueFunction::deriv(double x) const { return regions_[region_index(x)].deriv(x); }
double PiecewiseValueFunction::deriv2(double x) const {
    return regions_[region_index(x)].deriv2(x);
}

namespace {

// Gaussian elimination with partial pivoting; the systems here are <= 6x6.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("singular smooth-fit system");
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= f * a[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = rhs[ri];
        for (std::size_t cc = ri + 1; cc < n; ++cc) acc -= a[ri][cc] * x[cc];
        x[ri] = acc / a[ri][ri];
    }
    return x;
}

struct RegionPlan {
    double lo, hi;
    double control;
    double slope, intercept;
    std::vector<double> rates;    // 1 or 2
    std::vector<double> anchors;  // parallel to rates
};

}  // namespace

double residual_scale(const ModelParams& p, double x) {
    return std::max(1.0, p.overage_cost() + p.shortage_cost()) * std::max(1.0, std::abs(x));
}

PiecewiseValueFunction construct_value_function(const DerivedModel& m,
                                                const ThresholdPolicy& policy) {
    const auto& p = m.params;
    const auto& r = m.roots;
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();
    const double lower = policy.lower;
    const double upper = policy.upper;

    // Breakpoints: the finite members of {L, 0, U}, merged when coincident.
    std::vector<double> bps;
    for (double v : {lower, 0.0, upper})
        if (std::isfinite(v)) bps.push_back(v);
    std::sort(bps.begin(), bps.end());
    const double span = 1.0 + std::max(std::abs(bps.front()), std::abs(bps.back()));
    std::vector<double> merged;
    for (double v : bps) {
        if (std::abs(v) <= 1e-9 * span) v = 0.0;
        if (merged.empty() || v - merged.back() > 1e-9 * span) merged.push_back(v);
    }
    bps = std::move(merged);

    const std::size_t n_regions = bps.size() + 1;
    std::vector<RegionPlan> plan(n_regions);
    for (std::size_t i = 0; i < n_regions; ++i) {
        auto& reg = plan[i];
        reg.lo = (i == 0) ? -kInf : bps[i - 1];
        reg.hi = (i == n_regions - 1) ? kInf : bps[i];

        if (reg.hi <= lower)
            reg.control = p.theta_u;
        else if (reg.lo >= upper)
            reg.control = p.theta_l;
        else
            reg.control = 0.0;

        const double cost_slope = (reg.hi <= 0.0) ? -cm : cp;
        double adj = 0.0;
        if (reg.control > 0.0) adj = p.inc_cost * p.theta_u;
        if (reg.control < 0.0) adj = -p.dec_cost * p.theta_l;
        reg.slope = cost_slope / p.alpha;
        reg.intercept = ((reg.control - p.b) * reg.slope + adj) / p.alpha;

        double pos, neg;
        if (reg.control > 0.0) {
            pos = r.s1;
            neg = r.s2;
        } else if (reg.control < 0.0) {
            pos = r.t1;
            neg = r.t2;
        } else {
            pos = r.r1;
            neg = r.r2;
        }
        // Growing mode anchored at the right edge, decaying mode at the left
        // edge, so every basis value inside the region lies in (0, 1].
        if (i > 0) {
            reg.rates.push_back(neg);
            reg.anchors.push_back(reg.lo);
        }
        if (i < n_regions - 1) {
            reg.rates.push_back(pos);
            reg.anchors.push_back(reg.hi);
        }
    }

    // Unknowns: one coefficient per exponential term; conditions: value and
    // derivative continuity at every breakpoint.
    std::vector<std::size_t> offset(n_regions, 0);
    std::size_t n_unknowns = 0;
    for (std::size_t i = 0; i < n_regions; ++i) {
        offset[i] = n_unknowns;
        n_unknowns += plan[i].rates.size();
    }
    std::vector<std::vector<double>> mat(n_unknowns, std::vector<double>(n_unknowns, 0.0));
    std::vector<double> rhs(n_unknowns, 0.0);

    for (std::size_t j = 0; j < bps.size(); ++j) {
        const double x = bps[j];
        const auto& left = plan[j];
        const auto& right = plan[j + 1];
        const std::size_t row_v = 2 * j;
        const std::size_t row_d = 2 * j + 1;
        for (std::size_t t = 0; t < left.rates.size(); ++t) {
            const double e = std::exp(left.rates[t] * (x - left.anchors[t]));
            mat[row_v][offset[j] + t] += e;
            mat[row_d][offset[j] + t] += left.rates[t] * e;
        }
        for (std::size_t t = 0; t < right.rates.size(); ++t) {
            const double e = std::exp(right.rates[t] * (x - right.anchors[t]));
            mat[row_v][offset[j + 1] + t] -= e;
            mat[row_d][offset[j + 1] + t] -= right.rates[t] * e;
        }
        rhs[row_v] = (right.slope - left.slope) * x + (right.intercept - left.intercept);
        rhs[row_d] = right.slope - left.slope;
    }

    const std::vector<double> coef = solve_dense(std::move(mat), std::move(rhs));

    std::vector<ValueRegion> regions(n_regions);
    for (std::size_t i = 0; i < n_regions; ++i) {
        auto& reg = regions[i];
        reg.lo = plan[i].lo;
        reg.hi = plan[i].hi;
        reg.slope = plan[i].slope;
        reg.intercept = plan[i].intercept;
        reg.control = plan[i].control;
        for (std::size_t t = 0; t < plan[i].rates.size(); ++t)
            reg.terms.push_back({coef[offset[i] + t], plan[i].rates[t], plan[i].anchors[t]});
    }
    PiecewiseValueFunction y(bps, std::move(regions));

    // The derivative conditions at the finite thresholds were not imposed;
    // they hold exactly when (L, U) solve the threshold equations.
    const double dscale = std::max(1.0, (cp + cm) / p.alpha);
    if (std::isfinite(lower) && std::abs(y.deriv(lower) + p.inc_cost) > 1e-8 * dscale)
        throw std::runtime_error("smooth-fit violation at L=" + std::to_string(lower));
    if (std::isfinite(upper) && std::abs(y.deriv(upper) - p.dec_cost) > 1e-8 * dscale)
        throw std::runtime_error("smooth-fit violation at U=" + std::to_string(upper));
    return y;
}

namespace {

double control_term(const ModelParams& p, double d, double theta) {
    return theta >= 0.0 ? (d + p.inc_cost) * theta : (d - p.dec_cost) * theta;
}

}  // namespace

double hjb_residual_with_control(const PiecewiseValueFunction& y, const ModelParams& p, double x,
                                 double theta) {
    const double v = y.value(x);
    const double d = y.deriv(x);
    const double dd = y.deriv2(x);
    const double run = p.overage_cost() * std::max(x, 0.0) + p.shortage_cost() * std::max(-x, 0.0);
    return -p.alpha * v + 0.5 * p.sigma * p.sigma * dd - p.b * d + run + control_term(p, d, theta);
}

double hjb_residual(const PiecewiseValueFunction& y, const ModelParams& p, double x) {
    const double d = y.deriv(x);
    const double best = std::min({0.0, control_term(p, d, p.theta_u), control_term(p, d, p.theta_l)});
    const double v = y.value(x);
    const double dd = y.deriv2(x);
    const double run = p.overage_cost() * std::max(x, 0.0) + p.shortage_cost() * std::max(-x, 0.0);
    return -p.alpha * v + 0.5 * p.sigma * p.sigma * dd - p.b * d + run + best;
}

ValueFunctionReport verify_value_function(const DerivedModel& m, const ThresholdPolicy& policy,
                                          const PiecewiseValueFunction& y, int grid_n) {
    const auto& p = m.params;
    ValueFunctionReport rep{};
    rep.min_scaled_convexity = kInf;

    // One-sided limits come from evaluating the adjacent closed-form regions
    // exactly at the breakpoint.
    const auto& bps = y.breakpoints();
    for (std::size_t j = 0; j < bps.size(); ++j) {
        const double b = bps[j];
        const auto& left = y.regions()[j];
        const auto& right = y.regions()[j + 1];
        const double vjump = std::abs(left.value(b) - right.value(b));
        const double djump = std::abs(left.deriv(b) - right.deriv(b));
        rep.max_value_mismatch =
            std::max(rep.max_value_mismatch, vjump / std::max(1.0, std::abs(right.value(b))));
        rep.max_deriv_mismatch =
            std::max(rep.max_deriv_mismatch, djump / std::max(1.0, std::abs(right.deriv(b))));
    }

    const double pad = 5.0 * p.sigma / std::sqrt(2.0 * p.alpha) + 1.0;
    const double lo = (std::isfinite(policy.lower) ? std::min(policy.lower, 0.0) : 0.0) - pad;
    const double hi = (std::isfinite(policy.upper) ? std::max(policy.upper, 0.0) : 0.0) + pad;
    for (int i = 0; i <= grid_n; ++i) {
        double x = lo + (hi - lo) * i / grid_n;
        bool near_bp = false;
        for (double b : bps)
            if (std::abs(x - b) <= 1e-6 * (1.0 + std::abs(b))) near_bp = true;
        if (near_bp) continue;
        const double scale = residual_scale(p, x);

        rep.min_scaled_convexity = std::min(rep.min_scaled_convexity, y.deriv2(x) / scale);
        rep.max_scaled_hjb = std::max(rep.max_scaled_hjb, std::abs(hjb_residual(y, p, x)) / scale);

        const double d = y.deriv(x);
        double band = 0.0;
        if (x < policy.lower)
            band = std::max(0.0, d - (-p.inc_cost));
        else if (x > policy.upper)
            band = std::max(0.0, p.dec_cost - d);
        else
            band = std::max(0.0, std::max(d - p.dec_cost, -p.inc_cost - d));
        rep.max_band_violation = std::max(rep.max_band_violation, band / scale);
    }

    const double far = 10.0 * std::max({std::isfinite(policy.lower) ? std::abs(policy.lower) : 0.0,
                                        std::isfinite(policy.upper) ? std::abs(policy.upper) : 0.0,
                                        1.0});
    rep.growth_ratio = std::max(std::abs(y.value(-far)), std::abs(y.value(far))) / far;
    return rep;
}

}  // namespace riskhedge
