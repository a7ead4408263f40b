#include "riskhedge/rootfind.hpp"

#include <cmath>
#include <stdexcept>

namespace riskhedge {

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol) {
    if (!(lo <= hi)) throw std::invalid_argument("empty bracket");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw std::invalid_argument("no sign change");

    double mid = lo;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= tol || (hi - lo) <= tol * std::max(1.0, std::abs(mid))) return mid;
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return mid;
}

}  // namespace riskhedge
