#include "echelon/iteration.hpp"

namespace echelon {

ResidualBound residual_bound(double C, double tau, double s, double N) {
    ResidualBound r;
    if (!(tau > s) || s <= 0) return r;
    const double gap = tau - s;
    r.applicable = 3.0 * N / gap <= 0.5;
    r.quadratic = 36.0 * C * N * N / (gap * gap);
    r.alpha_factor = 6.0 * N / gap;
    return r;
}

}  // namespace echelon
