#include "ivr/spline.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ivr {

namespace {

#ifndef NDEBUG
void check_partition_of_unity(const BasisDers& b, int nders) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < b.count; ++j) {
        s0 += b.ders[0][j];
        if (nders >= 1) s1 += b.ders[1][j];
        if (nders >= 2) s2 += b.ders[2][j];
    }
    assert(std::abs(s0 - 1.0) < 1e-10);
    assert(std::abs(s1) < 1e-8);
    assert(std::abs(s2) < 1e-6);
}
#endif

} // namespace

BSplineSurface::BSplineSurface(KnotVector ks, KnotVector kt, std::vector<Vector3d> control_points)
    : ks_(std::move(ks)), kt_(std::move(kt)), control_(std::move(control_points)) {
    if (static_cast<int>(control_.size()) != ks_.num_basis() * kt_.num_basis())
        throw std::invalid_argument("surface: control net size mismatch");
    ks_.normalize();
    kt_.normalize();
}

void BSplineSurface::eval(double s, double t, int order,
                          Vector3d& value, Vector3d* d_s, Vector3d* d_t,
                          Vector3d* d_ss, Vector3d* d_st, Vector3d* d_tt) const {
    const int span_s = ks_.find_span(s);
    const int span_t = kt_.find_span(t);
    BasisDers bs, bt;
    ks_.basis_with_derivatives(span_s, s, order, bs);
    kt_.basis_with_derivatives(span_t, t, order, bt);
#ifndef NDEBUG
    check_partition_of_unity(bs, std::min(order, ks_.degree()));
    check_partition_of_unity(bt, std::min(order, kt_.degree()));
#endif
    const int ps = ks_.degree(), pt = kt_.degree();
    const int i0 = span_s - ps, j0 = span_t - pt;

    value.setZero();
    if (d_s) d_s->setZero();
    if (d_t) d_t->setZero();
    if (d_ss) d_ss->setZero();
    if (d_st) d_st->setZero();
    if (d_tt) d_tt->setZero();
    for (int a = 0; a <= ps; ++a) {
        for (int b = 0; b <= pt; ++b) {
            const Vector3d& c = control(i0 + a, j0 + b);
            value += bs.ders[0][a] * bt.ders[0][b] * c;
            if (order >= 1) {
                if (d_s) *d_s += bs.ders[1][a] * bt.ders[0][b] * c;
                if (d_t) *d_t += bs.ders[0][a] * bt.ders[1][b] * c;
            }
            if (order >= 2) {
                if (d_ss) *d_ss += bs.ders[2][a] * bt.ders[0][b] * c;
                if (d_st) *d_st += bs.ders[1][a] * bt.ders[1][b] * c;
                if (d_tt) *d_tt += bs.ders[0][a] * bt.ders[2][b] * c;
            }
        }
    }
}

DerivativeBounds second_derivative_bound(const BSplineSurface& patch) {
    const auto& us = patch.knots_s().knots();
    const auto& ut = patch.knots_t().knots();
    const int ps = patch.knots_s().degree(), pt = patch.knots_t().degree();
    const int ns = patch.count_s(), nt = patch.count_t();

    // First-difference nets along each direction; a zero knot span (fully
    // repeated interior knot) contributes a zero row rather than dividing.
    auto diff_s = [&](const std::vector<Vector3d>& c, int cs, int ct, int deg,
                      int knot_off) {
        std::vector<Vector3d> d(static_cast<size_t>(cs - 1) * ct, Vector3d::Zero());
        for (int i = 0; i + 1 < cs; ++i) {
            const double span = us[i + deg + knot_off] - us[i + knot_off];
            for (int j = 0; j < ct; ++j)
                d[i * ct + j] = span > 0.0
                                    ? Vector3d(deg * (c[(i + 1) * ct + j] - c[i * ct + j]) / span)
                                    : Vector3d::Zero();
        }
        return d;
    };
    auto diff_t = [&](const std::vector<Vector3d>& c, int cs, int ct, int deg,
                      int knot_off) {
        std::vector<Vector3d> d(static_cast<size_t>(cs) * (ct - 1), Vector3d::Zero());
        for (int i = 0; i < cs; ++i) {
            for (int j = 0; j + 1 < ct; ++j) {
                const double span = ut[j + deg + knot_off] - ut[j + knot_off];
                d[i * (ct - 1) + j] = span > 0.0
                                          ? Vector3d(deg * (c[i * ct + j + 1] - c[i * ct + j]) / span)
                                          : Vector3d::Zero();
            }
        }
        return d;
    };
    auto max_norm = [](const std::vector<Vector3d>& c) {
        double m = 0.0;
        for (const auto& v : c) m = std::max(m, v.norm());
        return m;
    };

    std::vector<Vector3d> base(static_cast<size_t>(ns) * nt);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) base[i * nt + j] = patch.control(i, j);

    DerivativeBounds out;
    if (ps >= 2) {
        auto d1 = diff_s(base, ns, nt, ps, 1);
        auto d2 = diff_s(d1, ns - 1, nt, ps - 1, 2);
        out.b_ss = max_norm(d2);
    }
    if (pt >= 2) {
        auto d1 = diff_t(base, ns, nt, pt, 1);
        auto d2 = diff_t(d1, ns, nt - 1, pt - 1, 2);
        out.b_tt = max_norm(d2);
    }
    if (ps >= 1 && pt >= 1) {
        auto d1 = diff_s(base, ns, nt, ps, 1);
        auto d2 = diff_t(d1, ns - 1, nt, pt, 1);
        out.b_st = max_norm(d2);
    }
    return out;
}

BSplineVolume::BSplineVolume(KnotVector u, KnotVector v, KnotVector w, int dim,
                             std::vector<double> control_points)
    : ku_(std::move(u)), kv_(std::move(v)), kw_(std::move(w)), dim_(dim),
      control_(std::move(control_points)) {
    if (dim_ < 1 || dim_ > 16) throw std::invalid_argument("volume: dim out of range");
    l_ = ku_.num_basis();
    m_ = kv_.num_basis();
    n_ = kw_.num_basis();
    if (control_.size() != static_cast<size_t>(l_) * m_ * n_ * dim_)
        throw std::invalid_argument("volume: control point array size mismatch");
    ku_.normalize();
    kv_.normalize();
    kw_.normalize();
}

void BSplineVolume::eval_raw(const Vector3d& p, int order, double* value, double* jac,
                             double* hess) const {
    const int su = ku_.find_span(p[0]);
    const int sv = kv_.find_span(p[1]);
    const int sw = kw_.find_span(p[2]);
    BasisDers bu, bv, bw;
    ku_.basis_with_derivatives(su, p[0], order, bu);
    kv_.basis_with_derivatives(sv, p[1], order, bv);
    kw_.basis_with_derivatives(sw, p[2], order, bw);
#ifndef NDEBUG
    check_partition_of_unity(bu, std::min(order, ku_.degree()));
    check_partition_of_unity(bv, std::min(order, kv_.degree()));
    check_partition_of_unity(bw, std::min(order, kw_.degree()));
#endif
    const int pu = ku_.degree(), pv = kv_.degree(), pw = kw_.degree();
    const int i0 = su - pu, j0 = sv - pv, k0 = sw - pw;
    const int d = dim_;

    for (int c = 0; c < d; ++c) value[c] = 0.0;
    if (order >= 1)
        for (int c = 0; c < 3 * d; ++c) jac[c] = 0.0;
    if (order >= 2)
        for (int c = 0; c < 9 * d; ++c) hess[c] = 0.0;

    for (int kc = 0; kc <= pw; ++kc) {
        for (int jc = 0; jc <= pv; ++jc) {
            const double* row = control(i0, j0 + jc, k0 + kc);
            for (int ic = 0; ic <= pu; ++ic, row += d) {
                const double u0 = bu.ders[0][ic], v0 = bv.ders[0][jc], w0 = bw.ders[0][kc];
                const double b000 = u0 * v0 * w0;
                if (order == 0) {
                    for (int c = 0; c < d; ++c) value[c] += b000 * row[c];
                    continue;
                }
                const double u1 = bu.ders[1][ic], v1 = bv.ders[1][jc], w1 = bw.ders[1][kc];
                const double b100 = u1 * v0 * w0;
                const double b010 = u0 * v1 * w0;
                const double b001 = u0 * v0 * w1;
                if (order == 1) {
                    for (int c = 0; c < d; ++c) {
                        const double cp = row[c];
                        value[c] += b000 * cp;
                        jac[c * 3 + 0] += b100 * cp;
                        jac[c * 3 + 1] += b010 * cp;
                        jac[c * 3 + 2] += b001 * cp;
                    }
                    continue;
                }
                const double u2 = bu.ders[2][ic], v2 = bv.ders[2][jc], w2 = bw.ders[2][kc];
                const double b200 = u2 * v0 * w0;
                const double b020 = u0 * v2 * w0;
                const double b002 = u0 * v0 * w2;
                const double b110 = u1 * v1 * w0;
                const double b101 = u1 * v0 * w1;
                const double b011 = u0 * v1 * w1;
                for (int c = 0; c < d; ++c) {
                    const double cp = row[c];
                    value[c] += b000 * cp;
                    jac[c * 3 + 0] += b100 * cp;
                    jac[c * 3 + 1] += b010 * cp;
                    jac[c * 3 + 2] += b001 * cp;
                    double* h = hess + c * 9;
                    h[0] += b200 * cp;
                    h[4] += b020 * cp;
                    h[8] += b002 * cp;
                    h[1] += b110 * cp;
                    h[2] += b101 * cp;
                    h[5] += b011 * cp;
                }
            }
        }
    }
    if (order >= 2) {
        for (int c = 0; c < d; ++c) {
            double* h = hess + c * 9;
            h[3] = h[1];
            h[6] = h[2];
            h[7] = h[5];
        }
    }
}

void BSplineVolume::eval(const Vector3d& p, int order, SplineJet& out) const {
    out.value.resize(dim_);
    double jac[16 * 3], hess[16 * 9];
    eval_raw(p, order, out.value.data(), jac, hess);
    if (order >= 1) {
        out.jacobian.resize(dim_, 3);
        for (int c = 0; c < dim_; ++c)
            for (int a = 0; a < 3; ++a) out.jacobian(c, a) = jac[c * 3 + a];
    }
    if (order >= 2) {
        out.hessian.resize(dim_);
        for (int c = 0; c < dim_; ++c)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) out.hessian[c](a, b) = hess[c * 9 + a * 3 + b];
    }
}

void BSplineVolume::eval3(const Vector3d& p, int order, MapJet& out) const {
    assert(dim_ == 3);
    double value[3], jac[9], hess[27];
    eval_raw(p, order, value, jac, hess);
    out.value = Vector3d(value[0], value[1], value[2]);
    if (order >= 1)
        for (int c = 0; c < 3; ++c)
            for (int a = 0; a < 3; ++a) out.jacobian(c, a) = jac[c * 3 + a];
    if (order >= 2)
        for (int c = 0; c < 3; ++c)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) out.hessian[c](a, b) = hess[c * 9 + a * 3 + b];
}

void BSplineVolume::eval1(const Vector3d& p, int order, ScalarJet& out) const {
    assert(dim_ == 1);
    double value, jac[3], hess[9];
    eval_raw(p, order, &value, jac, hess);
    out.value = value;
    if (order >= 1) out.gradient = Vector3d(jac[0], jac[1], jac[2]);
    if (order >= 2)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) out.hessian(a, b) = hess[a * 3 + b];
}

std::array<BoundaryPatch, 6> BSplineVolume::boundary_patches() const {
    if (dim_ != 3) throw std::logic_error("boundary_patches: needs a 3-valued volume");
    std::array<BoundaryPatch, 6> out;
    const KnotVector* kv[3] = {&ku_, &kv_, &kw_};
    const int counts[3] = {l_, m_, n_};
    auto point = [&](int i, int j, int k) {
        const double* c = control(i, j, k);
        return Vector3d(c[0], c[1], c[2]);
    };
    int idx = 0;
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side < 2; ++side) {
            BoundaryPatch patch;
            patch.axis = axis;
            patch.side = side;
            const int as = patch.axis_s(), at = patch.axis_t();
            const int ns = counts[as], nt = counts[at];
            std::vector<Vector3d> net(static_cast<size_t>(ns) * nt);
            const int fixed = side == 0 ? 0 : counts[axis] - 1;
            for (int i = 0; i < ns; ++i) {
                for (int j = 0; j < nt; ++j) {
                    int ijk[3];
                    ijk[axis] = fixed;
                    ijk[as] = i;
                    ijk[at] = j;
                    net[i * nt + j] = point(ijk[0], ijk[1], ijk[2]);
                }
            }
            patch.surface = BSplineSurface(*kv[as], *kv[at], std::move(net));
            out[idx++] = patch;
        }
    }
    return out;
}

} // namespace ivr
