#pragma once

#include <cstddef>
#include <vector>

#include "riskhedge/model.hpp"
#include "riskhedge/threshold.hpp"

namespace riskhedge {

// One exponential mode of a region, anchored so the basis stays in (0, 1]
// inside the region: coef * exp(rate * (x - anchor)).
struct ExpTerm {
    double coef;
    double rate;
    double anchor;
};

// Solution of the Bellman ODE on one interval under a fixed control.
struct ValueRegion {
    double lo, hi;           // +-inf at the extremes
    double slope, intercept; // affine particular part
    double control;          // velocity applied in this region
    std::vector<ExpTerm> terms;

    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
};

class PiecewiseValueFunction {
  public:
    PiecewiseValueFunction() = default;
    PiecewiseValueFunction(std::vector<double> breakpoints, std::vector<ValueRegion> regions);

    double value(double x) const;
    double deriv(double x) const;
    // Right-continuous at breakpoints (the second derivative may jump there).
    double deriv2(double x) const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<ValueRegion>& regions() const { return regions_; }

  private:
    std::size_t region_index(double x) const;

    std::vector<double> breakpoints_;
    std::vector<ValueRegion> regions_;
};

// Assembles the piecewise solution for a solved policy and fits the region
// coefficients by value/derivative matching at every breakpoint. Throws
// "smooth-fit violation ..." if the fitted function misses the derivative
// conditions at a finite threshold.
PiecewiseValueFunction construct_value_function(const DerivedModel& m,
                                                const ThresholdPolicy& policy);

// Scale used by all residual tolerances: max(1, C_+ + C_-) * max(1, |x|).
double residual_scale(const ModelParams& p, double x);

// Bellman residual at x (x should be off the breakpoints); zero for a
// correctly constructed function.
double hjb_residual(const PiecewiseValueFunction& y, const ModelParams& p, double x);

// Residual with the control forced to theta instead of the minimizing one;
// nonnegative wherever the constructed function is correct.
double hjb_residual_with_control(const PiecewiseValueFunction& y, const ModelParams& p, double x,
                                 double theta);

// Worst-case violations over a dense grid; every field should be within its
// stated tolerance for a correct construction.
struct ValueFunctionReport {
    double max_value_mismatch = 0.0;   // relative, at breakpoints
    double max_deriv_mismatch = 0.0;   // relative, at breakpoints
    double min_scaled_convexity = 0.0; // min Y'' / scale over the grid
    double max_band_violation = 0.0;   // scaled violation of the Y' band
    double max_scaled_hjb = 0.0;       // max |residual| / scale off breakpoints
    double growth_ratio = 0.0;         // |Y(x)|/|x| at the far ends
};

ValueFunctionReport verify_value_function(const DerivedModel& m, const ThresholdPolicy& policy,
                                          const PiecewiseValueFunction& y, int grid_n = 1000);

}  // namespace riskhedge
