#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "riskhedge/rootfind.hpp"
#include "riskhedge/threshold.hpp"

using namespace riskhedge;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams golden(double c_plus, double c_minus, double inc = 0.0, double dec = 0.0) {
    ModelParams p;
    p.b = 0.0;
    p.sigma = std::sqrt(2.0);
    p.alpha = 1.0;
    p.theta_l = -1.0;
    p.theta_u = 1.0;
    p.cost_primary = c_plus;
    p.reward_primary = c_plus + c_minus + 1.0;
    p.reward_secondary = 2.0;
    p.cost_secondary = 1.0;
    p.inc_cost = inc;
    p.dec_cost = dec;
    return p;
}

ModelParams base51() {
    ModelParams p;
    p.b = 0.0;
    p.sigma = 0.4;
    p.alpha = 0.02;
    p.theta_l = -10.0;
    p.theta_u = 10.0;
    p.cost_primary = 20.0;   // C_+ = 20
    p.reward_primary = 30.0; // N_p = 10
    p.reward_secondary = 9.0;
    p.cost_secondary = 1.0;  // N_s = 8, C_- = 2
    p.inc_cost = 0.5;
    p.dec_cost = 0.5;
    return p;
}

// Swap (C_+, D_p, theta_u, b) with (C_-, I_p, -theta_l, -b); thresholds map
// to (-U, -L) and the value function reflects about 0.
ModelParams mirrored(const ModelParams& p) {
    ModelParams q = p;
    q.b = -p.b;
    q.theta_u = -p.theta_l;
    q.theta_l = -p.theta_u;
    q.inc_cost = p.dec_cost;
    q.dec_cost = p.inc_cost;
    q.cost_primary = p.shortage_cost();
    q.reward_primary = q.cost_primary + p.overage_cost() + p.net_secondary();
    return q;
}

}  // namespace

TEST_CASE("bracketed root finder") {
    CHECK(find_root_bracketed([](double y) { return y - 0.5; }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK(find_root_bracketed([](double y) { return y * y - 2.0; }, 1.0, 2.0, 1e-12) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK_THROWS_WITH(find_root_bracketed([](double y) { return 1.0 + y * y; }, 0.0, 1.0, 1e-12),
                      "no sign change");
    // zero-adjustment identity: the sub-case I gap function vanishes at 1
    const DerivedModel m(golden(1.0, 1.0));
    const auto gap = [&](double y) {
        return m.coeffs.b1 * y + m.coeffs.j1 * std::pow(y, m.roots.r2 / m.roots.r1) + m.coeffs.a;
    };
    CHECK(gap(1.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("classification covers the four adjustment-cost regimes") {
    CHECK(classify_case(DerivedModel(base51())) == CaseTag::Case1_II);

    // boundary D_p = C_+/alpha belongs to case 2
    ModelParams p = base51();
    p.dec_cost = p.overage_cost() / p.alpha;
    CHECK(classify_case(DerivedModel(p)) == CaseTag::Case2);

    p = base51();
    p.inc_cost = p.shortage_cost() / p.alpha;
    CHECK(classify_case(DerivedModel(p)) == CaseTag::Case3);

    p.dec_cost = p.overage_cost() / p.alpha + 1.0;
    CHECK(classify_case(DerivedModel(p)) == CaseTag::Case4);

    // equalities in the sub-case conditions route to sub-case I by precedence
    CHECK(classify_case(DerivedModel(golden(1.0, 1.0))) == CaseTag::Case1_I);
}

TEST_CASE("zero-adjustment delta closed form on the golden instances") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

    CHECK(solve_zero_adjustment_delta(DerivedModel(golden(1.0, 1.0))) == 0.0);

    const double delta_neg = solve_zero_adjustment_delta(DerivedModel(golden(3.0, 1.0)));
    CHECK(delta_neg == doctest::Approx(std::log(0.5) / phi).epsilon(1e-12));
    CHECK(delta_neg == doctest::Approx(-0.4283885168).epsilon(1e-9));

    const double delta_pos = solve_zero_adjustment_delta(DerivedModel(golden(1.0, 3.0)));
    CHECK(delta_pos == doctest::Approx(-std::log(0.5) / phi).epsilon(1e-12));

    // symmetric costs with symmetric bounds force delta = 0
    ModelParams sym = golden(2.0, 2.0);
    CHECK(solve_zero_adjustment_delta(DerivedModel(sym)) == 0.0);
}

TEST_CASE("solve_case1 collapses to delta when adjustments are free") {
    for (auto [cp, cm] : {std::pair{1.0, 1.0}, {3.0, 1.0}, {1.0, 3.0}}) {
        const DerivedModel m(golden(cp, cm));
        ThresholdDiagnostics diag;
        const ThresholdPolicy pol = solve_case1(m, &diag);
        const double delta = solve_zero_adjustment_delta(m);
        CHECK(pol.lower == doctest::Approx(delta).epsilon(1e-10));
        CHECK(pol.upper == doctest::Approx(delta).epsilon(1e-10));
        CHECK(std::max(diag.residual1, diag.residual2) <= 1e-8);
    }
}

TEST_CASE("solve_case1 on the base setting returns an interval around delta") {
    const DerivedModel m(base51());
    ThresholdDiagnostics diag;
    const ThresholdPolicy pol = solve_case1(m, &diag);
    CHECK(pol.tag == CaseTag::Case1_II);
    CHECK(pol.lower <= pol.upper);
    CHECK(pol.upper <= 0.0);
    CHECK(diag.residual1 <= 1e-8);
    CHECK(diag.residual2 <= 1e-8);

    // tiny adjustment costs shrink the interval toward delta
    ModelParams tiny = base51();
    tiny.inc_cost = 1e-6;
    tiny.dec_cost = 1e-6;
    ModelParams zero = base51();
    zero.inc_cost = 0.0;
    zero.dec_cost = 0.0;
    const ThresholdPolicy near = solve_case1(DerivedModel(tiny));
    const double delta = solve_zero_adjustment_delta(DerivedModel(zero));
    CHECK(near.upper - near.lower <= 1e-3);
    CHECK(std::abs(near.lower - delta) <= 1e-3);
    CHECK(std::abs(near.upper - delta) <= 1e-3);
}

TEST_CASE("case 2 closed form reproduces the worked value") {
    ModelParams p = golden(1.0, 10.0, /*inc=*/0.0, /*dec=*/2.0);
    const DerivedModel m(p);
    REQUIRE(classify_case(m) == CaseTag::Case2);
    ThresholdDiagnostics diag;
    const ThresholdPolicy pol = solve_case2(m, &diag);
    CHECK(pol.upper == kInf);
    CHECK(pol.lower == doctest::Approx(0.8871702527).epsilon(1e-8));
    CHECK(pol.lower >= 0.0);
    CHECK(diag.residual1 <= 1e-10);
}

TEST_CASE("case 2 negative branch agrees with the U = inf reading of sub-case III") {
    // force B3 > B2: small shortage cost, positive I_p
    ModelParams p = golden(10.0, 1.0, /*inc=*/0.4, /*dec=*/0.0);
    p.dec_cost = p.overage_cost() / p.alpha;  // push into case 2
    const DerivedModel m(p);
    REQUIRE(classify_case(m) == CaseTag::Case2);
    const ThresholdPolicy pol = solve_case2(m);
    CHECK(pol.lower < 0.0);
    CHECK(m.coeffs.b2 * std::exp(-m.roots.r1 * pol.lower) ==
          doctest::Approx(m.coeffs.b3).epsilon(1e-10));
}

TEST_CASE("case 3 closed form mirrors case 2") {
    ModelParams p = golden(10.0, 1.0, /*inc=*/2.0, /*dec=*/0.0);
    const DerivedModel m(p);
    REQUIRE(classify_case(m) == CaseTag::Case3);
    const ThresholdPolicy pol = solve_case3(m);
    CHECK(pol.lower == -kInf);
    CHECK(pol.upper == doctest::Approx(-0.8871702527).epsilon(1e-8));

    // J1 <= J3 branch: upper >= 0 and j1 e^{-r2 U} = j3
    ModelParams q = golden(1.0, 10.0);
    q.inc_cost = q.shortage_cost() / q.alpha;
    const DerivedModel mq(q);
    REQUIRE(classify_case(mq) == CaseTag::Case3);
    const ThresholdPolicy pq = solve_case3(mq);
    CHECK(pq.upper >= 0.0);
    CHECK(mq.coeffs.j1 * std::exp(-mq.roots.r2 * pq.upper) ==
          doctest::Approx(mq.coeffs.j3).epsilon(1e-10));
}

TEST_CASE("case 4 takes no action") {
    ModelParams p = base51();
    p.inc_cost = p.shortage_cost() / p.alpha;
    p.dec_cost = p.overage_cost() / p.alpha;
    const DerivedModel m(p);
    REQUIRE(classify_case(m) == CaseTag::Case4);
    const ThresholdPolicy pol = solve_case4(m);
    CHECK(pol.lower == -kInf);
    CHECK(pol.upper == kInf);
}

TEST_CASE("mirror symmetry maps (L, U) to (-U, -L) on random instances") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    int solved = 0;
    for (int it = 0; it < 60; ++it) {
        ModelParams p = golden(5.0 * unif(gen), unif(gen), 0.3 * unif(gen), 0.3 * unif(gen));
        p.b = unif(gen) - 1.0;
        p.sigma = 0.5 + unif(gen);
        p.alpha = 0.5 * unif(gen) + 0.05;
        p.theta_u = unif(gen);
        p.theta_l = -unif(gen);
        const DerivedModel m(p);
        const DerivedModel mm(mirrored(p));
        const ThresholdPolicy a = solve_thresholds(m);
        const ThresholdPolicy b = solve_thresholds(mm);
        CHECK(b.upper == doctest::Approx(-a.lower).epsilon(1e-8));
        CHECK(b.lower == doctest::Approx(-a.upper).epsilon(1e-8));
        ++solved;
    }
    CHECK(solved == 60);
}

TEST_CASE("risk-hedging interval widens with volatility on base parameters") {
    double last_width = -1.0;
    for (int i = 1; i <= 10; ++i) {
        ModelParams p = base51();
        p.sigma = 0.1 * i;
        const ThresholdPolicy pol = solve_thresholds(DerivedModel(p));
        const double width = pol.upper - pol.lower;
        CHECK(width >= last_width - 1e-12);
        last_width = width;
    }
}

TEST_CASE("sub-case sign constraints hold for the returned thresholds") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    int seen_i = 0, seen_ii = 0, seen_iii = 0;
    for (int it = 0; it < 200; ++it) {
        ModelParams p = golden(4.0 * unif(gen), 2.0 * unif(gen), 0.4 * unif(gen),
                               0.4 * unif(gen));
        p.b = unif(gen) - 1.0;
        p.sigma = 0.5 + unif(gen);
        p.alpha = 0.05 + 0.5 * unif(gen);
        p.theta_u = unif(gen);
        p.theta_l = -unif(gen);
        const DerivedModel m(p);
        const CaseTag tag = classify_case(m);
        if (tag != CaseTag::Case1_I && tag != CaseTag::Case1_II && tag != CaseTag::Case1_III)
            continue;
        const ThresholdPolicy pol = solve_case1(m);
        switch (tag) {
            case CaseTag::Case1_I:
                CHECK(pol.lower >= 0.0);
                CHECK(pol.upper >= pol.lower);
                ++seen_i;
                break;
            case CaseTag::Case1_II:
                CHECK(pol.upper <= 0.0);
                CHECK(pol.lower <= pol.upper);
                ++seen_ii;
                break;
            default:
                CHECK(pol.lower <= 1e-12);
                CHECK(pol.upper >= -1e-12);
                ++seen_iii;
                break;
        }
    }
    CHECK(seen_i > 0);
    CHECK(seen_ii > 0);
    CHECK(seen_iii > 0);
}
