#pragma once

namespace riskhedge {

// Economic and dynamic parameters of the single-resource model. All rates
// (b, alpha, theta_l, theta_u) and sigma share one time unit; the toolkit
// uses hours throughout.
struct ModelParams {
    double b = 0.0;        // demand drift
    double sigma = 0.0;    // demand volatility, > 0
    double alpha = 0.0;    // discount rate, > 0
    double theta_l = 0.0;  // fastest capacity decrease, < 0
    double theta_u = 0.0;  // fastest capacity increase, > 0

    double reward_primary = 0.0;    // R_p, per unit of demand served
    double cost_primary = 0.0;      // C_p, per unit of capacity held
    double reward_secondary = 0.0;  // R_s
    double cost_secondary = 0.0;    // C_s
    double inc_cost = 0.0;          // I_p, per unit of capacity increase
    double dec_cost = 0.0;          // D_p, per unit of capacity decrease

    double net_primary() const { return reward_primary - cost_primary; }
    double net_secondary() const { return reward_secondary - cost_secondary; }
    // Effective running costs of the reduced minimization problem.
    double overage_cost() const { return cost_primary; }                       // C_+
    double shortage_cost() const { return net_primary() - net_secondary(); }   // C_-
};

// Throws std::invalid_argument naming the first violated invariant.
void validate(const ModelParams& p);

// Roots of (sigma^2/2) y^2 + (theta - b) y - alpha = 0 for the three control
// modes: theta = 0 gives (r1, r2), theta_u gives (s1, s2), theta_l gives
// (t1, t2). Positive root first in each pair.
struct QuadraticRoots {
    double r1, r2;
    double s1, s2;
    double t1, t2;
};

QuadraticRoots derive_roots(const ModelParams& p);

// Constant combinations entering the threshold equations. b3 > 0 and j3 > 0
// always; a < 0 and k < 0 whenever C_+ + alpha*I_p > 0 (C_- > 0 is a model
// invariant).
struct CaseConstants {
    double b1, b2, b3;
    double j1, j2, j3;
    double a, k;
};

CaseConstants derive_coefficients(const ModelParams& p, const QuadraticRoots& r);

// Validated parameters with all derived constants computed eagerly.
// Immutable after construction; safe to share across threads.
struct DerivedModel {
    ModelParams params;
    QuadraticRoots roots;
    CaseConstants coeffs;

    explicit DerivedModel(const ModelParams& p);
};

}  // namespace riskhedge
