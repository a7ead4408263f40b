#include "riskhedge/threshold.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskhedge/rootfind.hpp"

namespace riskhedge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clamp an argument intended to lie in (0, 1]; roundoff may push it just
// above 1 when a threshold sits at 0.
double clamp_unit_exponential(double arg, const char* what) {
    if (arg > 1.0 && arg <= 1.0 + 1e-10) return 1.0;
    if (!(arg > 0.0) || arg > 1.0) {
        throw std::runtime_error(std::string("sub-case residual check failed: ") + what);
    }
    return arg;
}

double rel_residual(double value, double scale) {
    return std::abs(value) / std::max(1e-300, scale);
}

struct Case1Conditions {
    bool cond_1a, cond_1b, cond_1c;
    bool cond_2a, cond_2b;
};

Case1Conditions case1_conditions(const DerivedModel& m) {
    const auto& c = m.coeffs;
    const auto& r = m.roots;
    const double ip = m.params.inc_cost;
    const double dp = m.params.dec_cost;
    const bool zero_adj = (ip == 0.0 && dp == 0.0);
    const bool pos_adj = ip + dp > 0.0;
    const double pw = r.r2 / r.r1;

    Case1Conditions out{};
    out.cond_1a = pos_adj && (c.b3 - c.b2 > 0.0) && (c.b3 - c.b2 < c.b1) &&
                  std::pow((c.b3 - c.b2) / c.b1, pw) >= (c.j3 - c.j2) / c.j1;
    out.cond_1b = pos_adj && c.b3 <= c.b2;
    out.cond_1c = zero_adj && c.b3 - c.b2 - c.b1 <= 0.0;
    out.cond_2a = pos_adj && (c.b3 - c.b2 - c.b1 > 0.0) &&
                  std::pow((c.b3 - c.b1) / c.b2, pw) >= (c.j3 - c.j1) / c.j2;
    out.cond_2b = zero_adj && c.b3 - c.b2 - c.b1 >= 0.0;
    return out;
}

}  // namespace

const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::Case1_I: return "case1-I";
        case CaseTag::Case1_II: return "case1-II";
        case CaseTag::Case1_III: return "case1-III";
        case CaseTag::Case2: return "case2";
        case CaseTag::Case3: return "case3";
        case CaseTag::Case4: return "case4";
    }
    return "?";
}

CaseTag classify_case(const DerivedModel& m) {
    const auto& p = m.params;
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();
    const bool dec_large = p.dec_cost >= cp / p.alpha;
    const bool inc_large = p.inc_cost >= cm / p.alpha;
    if (dec_large && inc_large) return CaseTag::Case4;
    if (dec_large) return CaseTag::Case2;
    if (inc_large) return CaseTag::Case3;

    // Overlaps at equalities are possible; sub-case I takes precedence over
    // II, and III covers the remainder.
    const Case1Conditions c = case1_conditions(m);
    if (c.cond_1a || c.cond_1b || c.cond_1c) return CaseTag::Case1_I;
    if (c.cond_2a || c.cond_2b) return CaseTag::Case1_II;
    return CaseTag::Case1_III;
}

ThresholdPolicy solve_thresholds(const DerivedModel& m, ThresholdDiagnostics* diag) {
    switch (classify_case(m)) {
        case CaseTag::Case1_I:
        case CaseTag::Case1_II:
        case CaseTag::Case1_III: return solve_case1(m, diag);
        case CaseTag::Case2: return solve_case2(m, diag);
        case CaseTag::Case3: return solve_case3(m, diag);
        case CaseTag::Case4:
            if (diag) *diag = {};
            return solve_case4(m);
    }
    throw std::logic_error("unreachable");
}

namespace {

// Sub-case I: 0 <= L <= U. y = e^{r1 (L-U)} is the unique root of
// b1*y + j1*y^{r2/r1} + a in (0, 1]; then e^{s2 L} follows in closed form.
ThresholdPolicy solve_case1_sub1(const DerivedModel& m, ThresholdDiagnostics* diag) {
    const auto& p = m.params;
    const auto& r = m.roots;
    const auto& c = m.coeffs;
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();
    const double pw = r.r2 / r.r1;

    const auto gap_fn = [&](double y) { return c.b1 * y + c.j1 * std::pow(y, pw) + c.a; };

    double y = 1.0;
    if (p.inc_cost + p.dec_cost > 0.0) {
        double lo = 0.5;
        while (gap_fn(lo) <= 0.0) {
            lo *= 0.5;
            if (lo < 1e-300) throw std::runtime_error("sub-case residual check failed: case1-I bracket");
        }
        y = find_root_bracketed(gap_fn, lo, 1.0, 1e-12);
    }

    const double ypw = std::pow(y, pw);
    const double lhs = (c.b1 * r.r2 * y + c.j1 * r.r1 * ypw) / (r.r1 - r.r2);
    const double smooth_const = (r.r1 + r.r2 - r.s1) * (p.alpha * p.inc_cost + cp);
    const double exp_s2l =
        clamp_unit_exponential((lhs - smooth_const) / ((cp + cm) * r.s1), "case1-I L recovery");

    ThresholdPolicy out{};
    out.tag = CaseTag::Case1_I;
    out.lower = std::log(exp_s2l) / r.s2;
    out.upper = out.lower - std::log(y) / r.r1;
    if (out.lower < 0.0) out.lower = 0.0;  // roundoff from the clamp only
    if (out.upper < out.lower) out.upper = out.lower;

    if (diag) {
        diag->residual1 = rel_residual(gap_fn(y), std::abs(c.b1 * y) + std::abs(c.j1 * ypw) +
                                                      std::abs(c.a));
        const double rhs = smooth_const + (cp + cm) * r.s1 * std::exp(r.s2 * out.lower);
        diag->residual2 = rel_residual(lhs - rhs, std::abs(lhs) + std::abs(rhs));
    }
    return out;
}

// Sub-case II: L <= U <= 0, mirror of sub-case I with y = e^{r1 (U-L)} >= 1.
ThresholdPolicy solve_case1_sub2(const DerivedModel& m, ThresholdDiagnostics* diag) {
    const auto& p = m.params;
    const auto& r = m.roots;
    const auto& c = m.coeffs;
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();
    const double pw = r.r2 / r.r1;

    const auto gap_fn = [&](double y) { return c.b2 * y + c.j2 * std::pow(y, pw) + c.k; };

    double y = 1.0;
    if (p.inc_cost + p.dec_cost > 0.0) {
        double hi = std::max(1.0, (c.b3 - c.b1) / c.b2);
        int grow = 0;
        while (gap_fn(hi) < 0.0) {
            hi *= 2.0;
            if (++grow > 60) throw std::runtime_error("sub-case residual check failed: case1-II bracket");
        }
        y = find_root_bracketed(gap_fn, 1.0, hi, 1e-12);
    }

    const double ypw = std::pow(y, pw);
    const double lhs = (c.b2 * r.r2 * y + c.j2 * r.r1 * ypw) / (r.r1 - r.r2);
    const double smooth_const = (r.r1 + r.r2 - r.t2) * (p.alpha * p.dec_cost + cm);
    const double exp_t1u =
        clamp_unit_exponential((lhs - smooth_const) / ((cp + cm) * r.t2), "case1-II U recovery");

    ThresholdPolicy out{};
    out.tag = CaseTag::Case1_II;
    out.upper = std::log(exp_t1u) / r.t1;
    out.lower = out.upper - std::log(y) / r.r1;
    if (out.upper > 0.0) out.upper = 0.0;
    if (out.lower > out.upper) out.lower = out.upper;

    if (diag) {
        diag->residual1 = rel_residual(gap_fn(y), std::abs(c.b2 * y) + std::abs(c.j2 * ypw) +
                                                      std::abs(c.k));
        const double rhs = smooth_const + (cp + cm) * r.t2 * std::exp(r.t1 * out.upper);
        diag->residual2 = rel_residual(lhs - rhs, std::abs(lhs) + std::abs(rhs));
    }
    return out;
}

// Sub-case III: L <= 0 <= U. Substituting y = e^{-r1 L} into the first
// threshold equation reduces the 2x2 system to a single root find on
// [max(1, (b3-b1)/b2), b3/b2).
ThresholdPolicy solve_case1_sub3(const DerivedModel& m, ThresholdDiagnostics* diag) {
    const auto& r = m.roots;
    const auto& c = m.coeffs;
    const double pw = r.r2 / r.r1;

    const auto gap_fn = [&](double y) {
        return c.j1 * std::pow((c.b3 - c.b2 * y) / c.b1, pw) + c.j2 * std::pow(y, pw) - c.j3;
    };

    const double lo = std::max(1.0, (c.b3 - c.b1) / c.b2);
    const double cap = c.b3 / c.b2;
    double y;
    const double f_lo = gap_fn(lo);
    if (f_lo >= 0.0) {
        // Boundary solution up to roundoff; anything materially positive
        // signals misclassification.
        if (f_lo > 1e-12 * std::abs(c.j3))
            throw std::runtime_error("sub-case residual check failed: case1-III bracket");
        y = lo;
    } else {
        double hi = cap - (cap - lo) * 0.5;
        int shrink = 0;
        while (gap_fn(hi) <= 0.0) {
            hi = cap - (cap - hi) * 0.5;
            if (++shrink > 200)
                throw std::runtime_error("sub-case residual check failed: case1-III bracket");
        }
        y = find_root_bracketed(gap_fn, lo, hi, 1e-12);
    }

    ThresholdPolicy out{};
    out.tag = CaseTag::Case1_III;
    out.lower = -std::log(y) / r.r1;
    const double exp_m_r1u = (c.b3 - c.b2 * y) / c.b1;
    out.upper = -std::log(clamp_unit_exponential(exp_m_r1u, "case1-III U recovery")) / r.r1;
    if (out.lower > 0.0) out.lower = 0.0;
    if (out.upper < 0.0) out.upper = 0.0;

    if (diag) {
        const double e1 = c.b1 * std::exp(-r.r1 * out.upper) + c.b2 * std::exp(-r.r1 * out.lower) -
                          c.b3;
        const double e2 = c.j1 * std::exp(-r.r2 * out.upper) + c.j2 * std::exp(-r.r2 * out.lower) -
                          c.j3;
        diag->residual1 = rel_residual(e1, std::abs(c.b3));
        diag->residual2 = rel_residual(e2, std::abs(c.j3));
    }
    return out;
}

}  // namespace

ThresholdPolicy solve_case1(const DerivedModel& m, ThresholdDiagnostics* diag) {
    switch (classify_case(m)) {
        case CaseTag::Case1_I: return solve_case1_sub1(m, diag);
        case CaseTag::Case1_II: return solve_case1_sub2(m, diag);
        case CaseTag::Case1_III: return solve_case1_sub3(m, diag);
        default: throw std::invalid_argument("solve_case1 called outside case 1");
    }
}

double solve_zero_adjustment_delta(const DerivedModel& m) {
    const auto& p = m.params;
    if (!(p.inc_cost == 0.0 && p.dec_cost == 0.0))
        throw std::invalid_argument("delta requires I_p = D_p = 0");
    const CaseTag tag = classify_case(m);
    if (tag != CaseTag::Case1_I && tag != CaseTag::Case1_II && tag != CaseTag::Case1_III)
        throw std::invalid_argument("delta requires the case 1 inequalities");

    const auto& r = m.roots;
    const auto& c = m.coeffs;
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();
    const double key = c.b1 + c.b2 - c.b3;
    if (key > 0.0) return std::log(cp / (cp + cm) * (r.s1 - r.t2) / r.s1) / r.s2;
    if (key == 0.0) return 0.0;
    return std::log(cm / (cp + cm) * (r.s1 - r.t2) / (-r.t2)) / r.t1;
}

ThresholdPolicy solve_case2(const DerivedModel& m, ThresholdDiagnostics* diag) {
    if (classify_case(m) != CaseTag::Case2)
        throw std::invalid_argument("solve_case2 called outside case 2");
    const auto& p = m.params;
    const auto& r = m.roots;
    const auto& c = m.coeffs;
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();

    ThresholdPolicy out{};
    out.tag = CaseTag::Case2;
    out.upper = kInf;
    if (c.b3 <= c.b2) {
        out.lower = std::log((p.alpha * p.inc_cost + cp) * (r.s1 - r.r2) / ((cp + cm) * r.s1)) /
                    r.s2;
        if (out.lower < 0.0) out.lower = 0.0;
        if (diag) {
            const double lhs = (r.r2 - r.s1) * (p.alpha * p.inc_cost + cp) +
                               (cp + cm) * r.s1 * std::exp(r.s2 * out.lower);
            diag->residual1 = rel_residual(lhs, (cp + cm) * r.s1);
            diag->residual2 = 0.0;
        }
    } else {
        out.lower = -std::log(c.b3 / c.b2) / r.r1;
        if (diag) {
            diag->residual1 =
                rel_residual(c.b2 * std::exp(-r.r1 * out.lower) - c.b3, std::abs(c.b3));
            diag->residual2 = 0.0;
        }
    }
    return out;
}

ThresholdPolicy solve_case3(const DerivedModel& m, ThresholdDiagnostics* diag) {
    if (classify_case(m) != CaseTag::Case3)
        throw std::invalid_argument("solve_case3 called outside case 3");
    const auto& p = m.params;
    const auto& r = m.roots;
    const auto& c = m.coeffs;
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();

    ThresholdPolicy out{};
    out.tag = CaseTag::Case3;
    out.lower = -kInf;
    if (c.j1 <= c.j3) {
        out.upper = std::log(c.j3 / c.j1) / (-r.r2);
        if (out.upper < 0.0) out.upper = 0.0;
        if (diag) {
            diag->residual1 =
                rel_residual(c.j1 * std::exp(-r.r2 * out.upper) - c.j3, std::abs(c.j3));
            diag->residual2 = 0.0;
        }
    } else {
        out.upper =
            std::log((p.alpha * p.dec_cost + cm) * (r.r1 - r.t2) / ((cp + cm) * (-r.t2))) / r.t1;
        if (diag) {
            const double lhs = (r.r1 - r.t2) * (p.alpha * p.dec_cost + cm) +
                               (cp + cm) * r.t2 * std::exp(r.t1 * out.upper);
            diag->residual1 = rel_residual(lhs, (cp + cm) * (-r.t2));
            diag->residual2 = 0.0;
        }
    }
    return out;
}

ThresholdPolicy solve_case4(const DerivedModel& m) {
    if (classify_case(m) != CaseTag::Case4)
        throw std::invalid_argument("solve_case4 called outside case 4");
    ThresholdPolicy out{};
    out.tag = CaseTag::Case4;
    out.lower = -kInf;
    out.upper = kInf;
    return out;
}

}  // namespace riskhedge
