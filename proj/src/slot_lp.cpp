#include "riskhedge/slot_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace riskhedge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Convex piecewise-linear function: slopes[i] applies on (xs[i-1], xs[i]),
// slopes.front() left of xs.front(), slopes.back() right of xs.back();
// v0 is the value at xs.front(). Slopes are nondecreasing.
struct ConvexPw {
    std::vector<double> xs;
    std::vector<double> slopes;
    double v0 = 0.0;

    double eval(double x) const {
        double v = v0;
        if (x <= xs.front()) return v + slopes.front() * (x - xs.front());
        double prev = xs.front();
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (x <= xs[i]) return v + slopes[i] * (x - prev);
            v += slopes[i] * (xs[i] - prev);
            prev = xs[i];
        }
        return v + slopes.back() * (x - prev);
    }

    // Adds c_minus (g - x)^+ + c_plus (x - g)^+.
    void add_vee(double g, double c_plus, double c_minus) {
        if (xs.empty()) {
            xs = {g};
            slopes = {-c_minus, c_plus};
            v0 = 0.0;
            return;
        }
        const double old_front = xs.front();
        const double v_front =
            v0 + c_minus * std::max(g - old_front, 0.0) + c_plus * std::max(old_front - g, 0.0);
        auto it = std::lower_bound(xs.begin(), xs.end(), g);
        const std::size_t pos = static_cast<std::size_t>(it - xs.begin());
        if (it == xs.end() || *it != g) {
            xs.insert(it, g);
            slopes.insert(slopes.begin() + pos + 1, slopes[pos]);
        }
        for (std::size_t i = 0; i < slopes.size(); ++i) {
            if (i <= pos)
                slopes[i] -= c_minus;
            else
                slopes[i] += c_plus;
        }
        // The anchor moves when g becomes the new leftmost breakpoint.
        v0 = (xs.front() == old_front) ? v_front : v_front - slopes[1] * (old_front - xs.front());
    }
};

struct MoveTargets {
    double lo = -kInf;  // start moving up below this point
    double hi = kInf;   // start moving down above this point
};

// First point where the right slope reaches -inc_cost, and last point where
// it stays within dec_cost; between them staying put is optimal.
MoveTargets targets(const ConvexPw& g, double inc_cost, double dec_cost) {
    MoveTargets t;
    if (!(g.slopes.front() >= -inc_cost)) {
        std::size_t i = 0;
        while (i + 1 < g.slopes.size() - 1 && g.slopes[i + 1] < -inc_cost) ++i;
        t.lo = g.xs[i];  // slope right of xs[i] is the first one >= -inc_cost
    }
    if (!(g.slopes.back() <= dec_cost)) {
        std::size_t i = g.slopes.size() - 1;
        while (i > 0 && g.slopes[i] > dec_cost) --i;
        if (g.slopes[i] > dec_cost) throw std::logic_error("non-convex stage function");
        t.hi = g.xs[i];  // slope right of xs[i] is the first one > dec_cost
    }
    return t;
}

double clamp_move(double p, const MoveTargets& t, double up_max, double dn_max) {
    double q = p;
    if (p < t.lo) q = std::min(t.lo, p + up_max);
    if (p > t.hi) q = std::max(t.hi, p - dn_max);
    return q;
}

// Value of one stage-to-go after an optimal bounded move from p.
double eval_moved(const ConvexPw& g, const MoveTargets& t, double inc_cost, double dec_cost,
                  double up_max, double dn_max, double p) {
    const double q = clamp_move(p, t, up_max, dn_max);
    return g.eval(q) + inc_cost * std::max(q - p, 0.0) + dec_cost * std::max(p - q, 0.0);
}

// Inf-convolution of g with the move cost under velocity bounds.
ConvexPw apply_move(const ConvexPw& g, const MoveTargets& t, double inc_cost, double dec_cost,
                    double up_max, double dn_max) {
    ConvexPw out;
    auto push = [&out](double x, double slope_after) {
        if (!out.xs.empty() && out.xs.back() == x) {
            out.slopes.back() = slope_after;
            return;
        }
        out.xs.push_back(x);
        out.slopes.push_back(slope_after);
    };

    out.slopes.push_back(g.slopes.front());
    if (t.lo > -kInf) {
        std::size_t i = 0;
        for (; i < g.xs.size() && g.xs[i] < t.lo; ++i) push(g.xs[i] - up_max, g.slopes[i + 1]);
        push(t.lo - up_max, -inc_cost);
        // slope right of t.lo in g
        push(t.lo, g.slopes[i + 1]);
        for (std::size_t j = i + 1; j < g.xs.size(); ++j) {
            if (g.xs[j] >= t.hi) break;
            push(g.xs[j], g.slopes[j + 1]);
        }
    } else {
        for (std::size_t j = 0; j < g.xs.size(); ++j) {
            if (g.xs[j] >= t.hi) break;
            push(g.xs[j], g.slopes[j + 1]);
        }
    }
    if (t.hi < kInf) {
        std::size_t ib = 0;
        while (ib < g.xs.size() && g.xs[ib] != t.hi) ++ib;
        push(t.hi, dec_cost);
        push(t.hi + dn_max, g.slopes[ib + 1]);
        for (std::size_t j = ib + 1; j < g.xs.size(); ++j) push(g.xs[j] + dn_max, g.slopes[j + 1]);
    }

    if (out.xs.empty()) {
        // No move is ever worthwhile; g passes through unchanged.
        return g;
    }
    out.v0 = eval_moved(g, t, inc_cost, dec_cost, up_max, dn_max, out.xs.front());
    return out;
}

}  // namespace

double slot_lp_objective(const SlotLpProblem& prob, const std::vector<double>& capacity) {
    double total = 0.0;
    double prev = prob.p0;
    for (std::size_t i = 0; i < capacity.size(); ++i) {
        const double p = capacity[i];
        const double g = prob.slot_demand[i];
        total += prob.c_plus * std::max(p - g, 0.0) + prob.c_minus * std::max(g - p, 0.0);
        total += prob.inc_cost * std::max(p - prev, 0.0) + prob.dec_cost * std::max(prev - p, 0.0);
        prev = p;
    }
    return total;
}

SlotLpSolution solve_slot_lp(const SlotLpProblem& prob) {
    const std::size_t n = prob.slot_demand.size();
    if (n == 0) return {{}, 0.0};
    if (!(prob.theta_u > 0.0) || !(prob.theta_l < 0.0))
        throw std::invalid_argument("velocity bounds must straddle zero");
    const double up_max = prob.theta_u * prob.gamma;
    const double dn_max = -prob.theta_l * prob.gamma;

    std::vector<MoveTargets> stage(n);
    ConvexPw cont;  // stage cost plus cost-to-go, before the stage's move
    for (std::size_t i = n; i-- > 0;) {
        cont.add_vee(prob.slot_demand[i], prob.c_plus, prob.c_minus);
        stage[i] = targets(cont, prob.inc_cost, prob.dec_cost);
        if (i > 0) cont = apply_move(cont, stage[i], prob.inc_cost, prob.dec_cost, up_max, dn_max);
    }

    SlotLpSolution out;
    out.capacity.resize(n);
    double prev = prob.p0;
    for (std::size_t i = 0; i < n; ++i) {
        prev = clamp_move(prev, stage[i], up_max, dn_max);
        out.capacity[i] = prev;
    }
    out.objective = slot_lp_objective(prob, out.capacity);
    return out;
}

namespace {

// Two-phase dense tableau simplex with Bland's rule.
// Minimizes c.x subject to A x <= b, x >= 0.
struct DenseLp {
    std::size_t n_var = 0;
    std::vector<std::vector<double>> rows;  // each of size n_var
    std::vector<double> rhs;
    std::vector<double> cost;

    // Returns optimal x; throws on iteration cap.
    std::vector<double> solve() const {
        const std::size_t m = rows.size();
        const std::size_t n = n_var;
        // Columns: n structural, m slack, m artificial (only where needed), 1 rhs.
        std::size_t n_art = 0;
        for (double v : rhs)
            if (v < 0.0) ++n_art;
        const std::size_t total = n + m + n_art;
        std::vector<std::vector<double>> t(m + 1, std::vector<double>(total + 1, 0.0));
        std::vector<std::size_t> basis(m);

        std::size_t art = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double sgn = rhs[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n; ++j) t[i][j] = sgn * rows[i][j];
            t[i][n + i] = sgn;  // slack
            t[i][total] = sgn * rhs[i];
            if (rhs[i] < 0.0) {
                t[i][n + m + art] = 1.0;
                basis[i] = n + m + art;
                ++art;
            } else {
                basis[i] = n + i;
            }
        }

        auto pivot = [&](std::size_t pr, std::size_t pc) {
            const double pv = t[pr][pc];
            for (double& v : t[pr]) v /= pv;
            for (std::size_t i = 0; i <= m; ++i) {
                if (i == pr) continue;
                const double f = t[i][pc];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j <= total; ++j) t[i][j] -= f * t[pr][j];
            }
            basis[pr] = pc;
        };

        auto run = [&](std::size_t ncols) {
            for (long iter = 0; iter < 200000; ++iter) {
                std::size_t pc = ncols;
                for (std::size_t j = 0; j < ncols; ++j) {
                    if (t[m][j] < -1e-9) {
                        pc = j;
                        break;  // Bland: smallest index
                    }
                }
                if (pc == ncols) return;
                std::size_t pr = m;
                double best = kInf;
                for (std::size_t i = 0; i < m; ++i) {
                    if (t[i][pc] > 1e-11) {
                        const double ratio = t[i][total] / t[i][pc];
                        if (ratio < best - 1e-12 ||
                            (std::abs(ratio - best) <= 1e-12 && (pr == m || basis[i] < basis[pr]))) {
                            best = ratio;
                            pr = i;
                        }
                    }
                }
                if (pr == m) throw std::runtime_error("LP unbounded");
                pivot(pr, pc);
            }
            throw std::runtime_error("LP iteration cap exceeded");
        };

        if (n_art > 0) {
            // Phase I objective: minimize the artificial sum.
            for (std::size_t j = 0; j <= total; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    if (basis[i] >= n + m) acc += t[i][j];
                t[m][j] = -acc;
            }
            for (std::size_t a = n + m; a < total; ++a) t[m][a] += 1.0;
            run(total);
            if (t[m][total] < -1e-7) throw std::runtime_error("LP infeasible");
            // Drive any artificial still in the basis out of it.
            for (std::size_t i = 0; i < m; ++i) {
                if (basis[i] >= n + m) {
                    std::size_t pc = n + m;
                    for (std::size_t j = 0; j < n + m; ++j)
                        if (std::abs(t[i][j]) > 1e-9) {
                            pc = j;
                            break;
                        }
                    if (pc < n + m) pivot(i, pc);
                }
            }
        }

        // Phase II objective.
        for (std::size_t j = 0; j <= total; ++j) t[m][j] = 0.0;
        for (std::size_t j = 0; j < n; ++j) t[m][j] = cost[j];
        for (std::size_t i = 0; i < m; ++i) {
            const double f = basis[i] < n ? cost[basis[i]] : 0.0;
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= total; ++j) t[m][j] -= f * t[i][j];
        }
        // Forbid artificial re-entry by restricting candidate columns.
        run(n + m);

        std::vector<double> x(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n) x[basis[i]] = t[i][total];
        return x;
    }
};

}  // namespace

SlotLpSolution solve_slot_lp_simplex(const SlotLpProblem& prob) {
    const std::size_t n = prob.slot_demand.size();
    const double up_max = prob.theta_u * prob.gamma;
    const double dn_max = -prob.theta_l * prob.gamma;

    // Variables per slot: u_i (overage), v_i (underage), a_i (up move),
    // d_i (down move); P_i = p0 + sum_{j<=i} (a_j - d_j).
    DenseLp lp;
    lp.n_var = 4 * n;
    const auto u = [&](std::size_t i) { return 4 * i; };
    const auto v = [&](std::size_t i) { return 4 * i + 1; };
    const auto a = [&](std::size_t i) { return 4 * i + 2; };
    const auto d = [&](std::size_t i) { return 4 * i + 3; };

    lp.cost.assign(lp.n_var, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        lp.cost[u(i)] = prob.c_plus;
        lp.cost[v(i)] = prob.c_minus;
        lp.cost[a(i)] = prob.inc_cost;
        lp.cost[d(i)] = prob.dec_cost;
    }
    for (std::size_t i = 0; i < n; ++i) {
        // P_i - g_i <= u_i  and  g_i - P_i <= v_i
        std::vector<double> r1(lp.n_var, 0.0), r2(lp.n_var, 0.0);
        for (std::size_t j = 0; j <= i; ++j) {
            r1[a(j)] = 1.0;
            r1[d(j)] = -1.0;
            r2[a(j)] = -1.0;
            r2[d(j)] = 1.0;
        }
        r1[u(i)] = -1.0;
        r2[v(i)] = -1.0;
        lp.rows.push_back(std::move(r1));
        lp.rhs.push_back(prob.slot_demand[i] - prob.p0);
        lp.rows.push_back(std::move(r2));
        lp.rhs.push_back(prob.p0 - prob.slot_demand[i]);
        // velocity bounds
        std::vector<double> r3(lp.n_var, 0.0), r4(lp.n_var, 0.0);
        r3[a(i)] = 1.0;
        r4[d(i)] = 1.0;
        lp.rows.push_back(std::move(r3));
        lp.rhs.push_back(up_max);
        lp.rows.push_back(std::move(r4));
        lp.rhs.push_back(dn_max);
    }

    const std::vector<double> x = lp.solve();
    SlotLpSolution out;
    out.capacity.resize(n);
    double p = prob.p0;
    for (std::size_t i = 0; i < n; ++i) {
        p += x[a(i)] - x[d(i)];
        out.capacity[i] = p;
    }
    out.objective = slot_lp_objective(prob, out.capacity);
    return out;
}

}  // namespace riskhedge
