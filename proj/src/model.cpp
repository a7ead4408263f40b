#include "riskhedge/model.hpp"

#include <cmath>
#include <stdexcept>

namespace riskhedge {

void validate(const ModelParams& p) {
    if (!(p.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(p.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(p.theta_l < 0.0)) throw std::invalid_argument("theta_l must be negative");
    if (!(p.theta_u > 0.0)) throw std::invalid_argument("theta_u must be positive");
    if (!(p.reward_primary > p.cost_primary))
        throw std::invalid_argument("R_p must exceed C_p");
    if (!(p.reward_secondary > p.cost_secondary))
        throw std::invalid_argument("R_s must exceed C_s");
    if (!(p.cost_primary >= 0.0)) throw std::invalid_argument("C_p must be nonnegative");
    if (!(p.cost_secondary >= 0.0)) throw std::invalid_argument("C_s must be nonnegative");
    if (!(p.inc_cost >= 0.0)) throw std::invalid_argument("I_p must be nonnegative");
    if (!(p.dec_cost >= 0.0)) throw std::invalid_argument("D_p must be nonnegative");
    if (!(p.shortage_cost() > 0.0)) throw std::invalid_argument("C_minus must be positive");
    if (!std::isfinite(p.b)) throw std::invalid_argument("b must be finite");
    if (!std::isfinite(p.sigma) || !std::isfinite(p.alpha) || !std::isfinite(p.theta_l) ||
        !std::isfinite(p.theta_u))
        throw std::invalid_argument("rate parameters must be finite");
}

namespace {

// Roots of (sigma^2/2) y^2 + (theta - b) y - alpha = 0; discriminant
// (b-theta)^2 + 2 alpha sigma^2 > 0 so both roots are real.
void quadratic_roots(double b, double sigma, double alpha, double theta, double& pos,
                     double& neg) {
    const double s2 = sigma * sigma;
    const double m = b - theta;
    const double d = std::sqrt(m * m + 2.0 * alpha * s2);
    pos = (m + d) / s2;
    neg = (m - d) / s2;
}

}  // namespace

QuadraticRoots derive_roots(const ModelParams& p) {
    QuadraticRoots r{};
    quadratic_roots(p.b, p.sigma, p.alpha, 0.0, r.r1, r.r2);
    quadratic_roots(p.b, p.sigma, p.alpha, p.theta_u, r.s1, r.s2);
    quadratic_roots(p.b, p.sigma, p.alpha, p.theta_l, r.t1, r.t2);
    return r;
}

CaseConstants derive_coefficients(const ModelParams& p, const QuadraticRoots& r) {
    const double cp = p.overage_cost();
    const double cm = p.shortage_cost();
    CaseConstants c{};
    c.b1 = (cp - p.alpha * p.dec_cost) * (r.t2 - r.r2);
    c.b2 = (cm - p.alpha * p.inc_cost) * (r.s1 - r.r2);
    c.b3 = (cp + cm) * (-r.r2);
    c.j1 = (cp - p.alpha * p.dec_cost) * (r.r1 - r.t2);
    c.j2 = (cm - p.alpha * p.inc_cost) * (r.r1 - r.s1);
    c.j3 = (cp + cm) * r.r1;
    c.a = (cp + p.alpha * p.inc_cost) * (r.r2 - r.r1);
    c.k = (cm + p.alpha * p.dec_cost) * (r.r2 - r.r1);
    return c;
}

DerivedModel::DerivedModel(const ModelParams& p) : params(p) {
    validate(p);
    roots = derive_roots(p);
    coeffs = derive_coefficients(p, roots);
}

}  // namespace riskhedge
