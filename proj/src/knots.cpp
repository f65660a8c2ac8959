#include "ivr/knots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ivr {

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 0 || degree_ > kMaxDegree)
        throw std::invalid_argument("knot vector: degree out of range");
    if (knots_.size() < 2u * (degree_ + 1))
        throw std::invalid_argument("knot vector: needs at least 2(p+1) knots");
    for (size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i] <= knots_[i + 1]) || !std::isfinite(knots_[i]))
            throw std::invalid_argument("knot vector: not non-decreasing at index " +
                                        std::to_string(i));
    }
    if (!(domain_min() < domain_max()))
        throw std::invalid_argument("knot vector: empty active domain");
    last_span_ = static_cast<int>(knots_.size()) - degree_ - 2;
    while (last_span_ > degree_ && !(knots_[last_span_] < knots_[last_span_ + 1]))
        --last_span_;
}

int KnotVector::find_span(double t) const {
    const double lo = domain_min();
    const double hi = domain_max();
    // Snap round-off from upstream arithmetic back into the closed domain.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * (std::abs(hi) + 1.0);
    if (t < lo - slack || t > hi + slack)
        throw std::domain_error("knot vector: parameter outside domain");
    if (t >= hi) return last_span_;
    if (t <= lo) t = lo;
    // knots_[i] <= t < knots_[i+1] on the active range [p, n].
    auto it = std::upper_bound(knots_.begin() + degree_,
                               knots_.end() - degree_ - 1, t);
    return static_cast<int>(it - knots_.begin()) - 1;
}

void KnotVector::basis_with_derivatives(int span, double t, int nders, BasisDers& out) const {
    const int p = degree_;
    out.count = p + 1;
    double ndu[kMaxDegree + 1][kMaxDegree + 1];
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - knots_[span + 1 - j];
        right[j] = knots_[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int d = 0; d <= nders && d < 3; ++d)
        for (int j = 0; j <= p; ++j) out.ders[d][j] = 0.0;
    for (int j = 0; j <= p; ++j) out.ders[0][j] = ndu[j][p];
    if (nders == 0) return;

    // Derivative weights (The NURBS Book, A2.3) from the same ndu table.
    const int nd = std::min(nders, std::min(p, 2));
    for (int r = 0; r <= p; ++r) {
        double a[2][kMaxDegree + 1];
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            out.ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= nd; ++k) {
        for (int j = 0; j <= p; ++j) out.ders[k][j] *= factor;
        factor *= p - k;
    }
}

void KnotVector::normalize() {
    const double lo = domain_min();
    const double span = domain_max() - lo;
    for (double& k : knots_) k = (k - lo) / span;
    // Pin the active endpoints so the domain is exactly [0,1].
    knots_[degree_] = 0.0;
    knots_[knots_.size() - degree_ - 1] = 1.0;
}

} // namespace ivr
