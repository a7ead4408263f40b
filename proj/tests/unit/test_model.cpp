#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "riskhedge/model.hpp"

using namespace riskhedge;

namespace {

// b=0, sigma^2=2, alpha=1, theta = +-1: the roots come out as golden-ratio
// combinations, which makes hand checks exact.
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
    p.cost_secondary = 1.0;  // N_s = 1, so C_- = N_p - 1 = c_minus as built
    p.inc_cost = inc;
    p.dec_cost = dec;
    return p;
}

}  // namespace

TEST_CASE("golden params have the intended reduced costs") {
    const ModelParams p = golden(3.0, 1.0);
    CHECK(p.overage_cost() == 3.0);
    CHECK(p.shortage_cost() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("validate accepts the base setting and reports violations by name") {
    ModelParams p = golden(20.0, 2.0, 0.5, 0.5);
    p.sigma = 0.4;
    p.alpha = 0.02;
    p.theta_l = -10.0;
    p.theta_u = 10.0;
    CHECK_NOTHROW(validate(p));

    ModelParams bad = p;
    bad.sigma = 0.0;
    CHECK_THROWS_WITH_AS(validate(bad), "sigma must be positive", std::invalid_argument);

    bad = p;
    bad.reward_primary = bad.cost_primary + bad.net_secondary();  // N_p == N_s
    CHECK_THROWS_WITH_AS(validate(bad), "C_minus must be positive", std::invalid_argument);

    bad = p;
    bad.theta_u = -1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("derive_roots matches hand-computed values") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

    const DerivedModel m(golden(1.0, 1.0));
    CHECK(m.roots.r1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.roots.r2 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(m.roots.s1 == doctest::Approx(phi - 1.0).epsilon(1e-14));
    CHECK(m.roots.s2 == doctest::Approx(-phi).epsilon(1e-14));
    CHECK(m.roots.t1 == doctest::Approx(phi).epsilon(1e-14));
    CHECK(m.roots.t2 == doctest::Approx(1.0 - phi).epsilon(1e-14));

    ModelParams p = golden(20.0, 2.0);
    p.sigma = 0.4;
    p.alpha = 0.02;
    const QuadraticRoots r = derive_roots(p);
    CHECK(r.r1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.r2 == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("theta_u = theta_l -> 0 limit collapses all three quadratics") {
    ModelParams p = golden(1.0, 1.0);
    p.theta_u = 1e-14;
    p.theta_l = -1e-14;
    const QuadraticRoots r = derive_roots(p);
    CHECK(r.s1 == doctest::Approx(r.r1).epsilon(1e-12));
    CHECK(r.t1 == doctest::Approx(r.r1).epsilon(1e-12));
    CHECK(r.s2 == doctest::Approx(r.r2).epsilon(1e-12));
    CHECK(r.t2 == doctest::Approx(r.r2).epsilon(1e-12));
}

TEST_CASE("root residuals and scaling invariance on random instances") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unif(0.1, 3.0);
    for (int it = 0; it < 50; ++it) {
        ModelParams p = golden(unif(gen), unif(gen));
        p.b = unif(gen) - 1.5;
        p.sigma = unif(gen);
        p.alpha = unif(gen);
        p.theta_u = unif(gen);
        p.theta_l = -unif(gen);
        const QuadraticRoots r = derive_roots(p);

        const auto resid = [&](double y, double theta) {
            return std::abs(0.5 * p.sigma * p.sigma * y * y + (theta - p.b) * y - p.alpha);
        };
        CHECK(resid(r.r1, 0.0) <= 1e-12 * p.alpha * 10);
        CHECK(resid(r.r2, 0.0) <= 1e-12 * p.alpha * 10);
        CHECK(resid(r.s1, p.theta_u) <= 1e-12 * p.alpha * 10);
        CHECK(resid(r.t2, p.theta_l) <= 1e-12 * p.alpha * 10);
        CHECK(r.r1 > 0.0);
        CHECK(r.r2 < 0.0);
        CHECK(r.s1 > 0.0);
        CHECK(r.s2 < 0.0);
        CHECK(r.t1 > 0.0);
        CHECK(r.t2 < 0.0);

        // (b, theta, alpha) * c and sigma^2 * c leave every root unchanged
        const double c = unif(gen);
        ModelParams q = p;
        q.b *= c;
        q.theta_u *= c;
        q.theta_l *= c;
        q.alpha *= c;
        q.sigma *= std::sqrt(c);
        const QuadraticRoots rs = derive_roots(q);
        CHECK(rs.r1 == doctest::Approx(r.r1).epsilon(1e-12));
        CHECK(rs.s2 == doctest::Approx(r.s2).epsilon(1e-12));
        CHECK(rs.t1 == doctest::Approx(r.t1).epsilon(1e-12));
    }
}

TEST_CASE("coefficient constants match the worked examples") {
    SUBCASE("symmetric unit costs") {
        const DerivedModel m(golden(1.0, 1.0));
        CHECK(m.coeffs.b1 == doctest::Approx(0.381966011).epsilon(1e-9));
        CHECK(m.coeffs.b2 == doctest::Approx(1.618033989).epsilon(1e-9));
        CHECK(m.coeffs.b3 == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(m.coeffs.b1 + m.coeffs.b2 - m.coeffs.b3 == doctest::Approx(0.0));
    }
    SUBCASE("asymmetric costs") {
        const DerivedModel m(golden(3.0, 1.0));
        CHECK(m.coeffs.b1 == doctest::Approx(1.145898034).epsilon(1e-9));
        CHECK(m.coeffs.b2 == doctest::Approx(1.618033989).epsilon(1e-9));
        CHECK(m.coeffs.b3 == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("zero adjustment cost shortcut for a") {
        const DerivedModel m(golden(2.5, 1.5));
        CHECK(m.coeffs.a ==
              doctest::Approx(m.params.overage_cost() * (m.roots.r2 - m.roots.r1)).epsilon(1e-14));
        CHECK(m.coeffs.a < 0.0);
        CHECK(m.coeffs.k < 0.0);
        CHECK(m.coeffs.b3 > 0.0);
        CHECK(m.coeffs.j3 > 0.0);
    }
}

TEST_CASE("first-order identity: b1 + j1 + a = alpha (r1 - r2)(-I_p - D_p)") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    for (int it = 0; it < 30; ++it) {
        ModelParams p = golden(unif(gen) * 5, unif(gen), unif(gen), unif(gen));
        p.b = unif(gen) - 1.0;
        p.sigma = unif(gen);
        p.alpha = unif(gen);
        const DerivedModel m(p);
        const double lhs = m.coeffs.b1 + m.coeffs.j1 + m.coeffs.a;
        const double rhs = p.alpha * (m.roots.r1 - m.roots.r2) * (-p.inc_cost - p.dec_cost);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}
