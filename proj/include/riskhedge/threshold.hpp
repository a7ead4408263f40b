#pragma once

#include "riskhedge/model.hpp"

namespace riskhedge {

// Adjustment-cost regime. Case 1 splits by the location of the risk-hedging
// interval relative to 0; Cases 2/3 are one-sided; Case 4 never acts.
enum class CaseTag { Case1_I, Case1_II, Case1_III, Case2, Case3, Case4 };

const char* to_string(CaseTag tag);

struct ThresholdPolicy {
    double lower = 0.0;  // L; -inf for one-sided policies
    double upper = 0.0;  // U; +inf for one-sided policies
    CaseTag tag = CaseTag::Case4;

    double width() const { return upper - lower; }
};

// Relative residuals of the pair of equations that pin down (L, U).
struct ThresholdDiagnostics {
    double residual1 = 0.0;
    double residual2 = 0.0;
};

CaseTag classify_case(const DerivedModel& m);

// Dispatches on classify_case.
ThresholdPolicy solve_thresholds(const DerivedModel& m, ThresholdDiagnostics* diag = nullptr);

ThresholdPolicy solve_case1(const DerivedModel& m, ThresholdDiagnostics* diag = nullptr);
ThresholdPolicy solve_case2(const DerivedModel& m, ThresholdDiagnostics* diag = nullptr);
ThresholdPolicy solve_case3(const DerivedModel& m, ThresholdDiagnostics* diag = nullptr);
ThresholdPolicy solve_case4(const DerivedModel& m);

// Closed form for the collapsed interval L = U = delta when I_p = D_p = 0
// and the Case 1 inequalities hold.
double solve_zero_adjustment_delta(const DerivedModel& m);

}  // namespace riskhedge
