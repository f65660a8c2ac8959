#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ivr/knots.hpp"

namespace ivr {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

/// Value and derivatives of a d-valued spline at one parameter point.
/// jacobian(c, a) = dS_c/dp_a, hessian[c](a, b) = d2S_c/dp_a dp_b.
struct SplineJet {
    Eigen::VectorXd value;
    Eigen::Matrix<double, Eigen::Dynamic, 3> jacobian;
    std::vector<Matrix3d> hessian;
};

/// Fixed-size jet for maps R^3 -> R^3 (geometry and displacement splines,
/// analytic test maps). Same index convention as SplineJet.
struct MapJet {
    Vector3d value = Vector3d::Zero();
    Matrix3d jacobian = Matrix3d::Zero();
    std::array<Matrix3d, 3> hessian = {Matrix3d::Zero(), Matrix3d::Zero(), Matrix3d::Zero()};
};

/// Jet of a scalar spline.
struct ScalarJet {
    double value = 0.0;
    Vector3d gradient = Vector3d::Zero();
    Matrix3d hessian = Matrix3d::Zero();
};

/// Differentiable map from the unit parameter cube into R^3. Ray inversion
/// runs against this interface; spline volumes and analytic test maps both
/// implement it.
class DiffMap3 {
public:
    virtual ~DiffMap3() = default;
    /// order 0: value only; 1: + jacobian; 2: + hessian.
    virtual void eval(const Vector3d& p, int order, MapJet& out) const = 0;

    Vector3d value(const Vector3d& p) const {
        MapJet jet;
        eval(p, 0, jet);
        return jet.value;
    }
};

/// Bivariate tensor-product B-spline with 3D control points (a boundary
/// face of a volume, already normalized to the unit square).
class BSplineSurface {
public:
    BSplineSurface() = default;
    BSplineSurface(KnotVector ks, KnotVector kt, std::vector<Vector3d> control_points);

    int count_s() const { return ks_.num_basis(); }
    int count_t() const { return kt_.num_basis(); }
    const KnotVector& knots_s() const { return ks_; }
    const KnotVector& knots_t() const { return kt_; }
    const Vector3d& control(int i, int j) const { return control_[i * count_t() + j]; }

    /// order 0: value; 1: + d/ds, d/dt; 2: + second partials.
    void eval(double s, double t, int order,
              Vector3d& value, Vector3d* d_s = nullptr, Vector3d* d_t = nullptr,
              Vector3d* d_ss = nullptr, Vector3d* d_st = nullptr, Vector3d* d_tt = nullptr) const;

private:
    KnotVector ks_, kt_;
    std::vector<Vector3d> control_;
};

/// Sup-norm bounds on the second partials of a surface patch, from the
/// convex hull of its twice-differenced control net.
struct DerivativeBounds {
    double b_ss = 0.0;
    double b_tt = 0.0;
    double b_st = 0.0;
};

DerivativeBounds second_derivative_bound(const BSplineSurface& patch);

/// One face of the parameter cube together with the embedding of patch
/// coordinates (s,t) into the cube. The (s,t) axes are ordered so that
/// s x t points out of the cube.
struct BoundaryPatch {
    BSplineSurface surface;
    int axis = 0; // fixed parameter axis
    int side = 0; // 0 or 1, value of the fixed coordinate

    int axis_s() const { return side == 1 ? (axis + 1) % 3 : (axis + 2) % 3; }
    int axis_t() const { return side == 1 ? (axis + 2) % 3 : (axis + 1) % 3; }
    Vector3d embed(double s, double t) const {
        Vector3d p;
        p[axis] = side;
        p[axis_s()] = s;
        p[axis_t()] = t;
        return p;
    }
};

/// Trivariate tensor-product B-spline with d-dimensional control points.
/// Control point (i,j,k) lives at flat index (k*m + j)*l + i, i along u.
/// Knot vectors are normalized to [0,1] per direction at construction.
class BSplineVolume {
public:
    BSplineVolume() = default;
    BSplineVolume(KnotVector u, KnotVector v, KnotVector w, int dim,
                  std::vector<double> control_points);

    int dim() const { return dim_; }
    int count_u() const { return l_; }
    int count_v() const { return m_; }
    int count_w() const { return n_; }
    const KnotVector& knots_u() const { return ku_; }
    const KnotVector& knots_v() const { return kv_; }
    const KnotVector& knots_w() const { return kw_; }
    const std::vector<double>& control_points() const { return control_; }
    const double* control(int i, int j, int k) const {
        return control_.data() + (static_cast<size_t>(k) * m_ + j) * l_ * dim_ +
               static_cast<size_t>(i) * dim_;
    }

    /// Tensor-product evaluation; one basis computation per direction is
    /// shared across the value and all requested derivatives.
    void eval(const Vector3d& p, int order, SplineJet& out) const;
    void eval3(const Vector3d& p, int order, MapJet& out) const; // requires dim == 3
    void eval1(const Vector3d& p, int order, ScalarJet& out) const; // requires dim == 1

    /// The six boundary faces as bivariate patches with their embeddings.
    std::array<BoundaryPatch, 6> boundary_patches() const;

private:
    void eval_raw(const Vector3d& p, int order, double* value, double* jac, double* hess) const;

    KnotVector ku_, kv_, kw_;
    int dim_ = 0;
    int l_ = 0, m_ = 0, n_ = 0;
    std::vector<double> control_;
};

/// DiffMap3 adapter for a 3-valued spline volume.
class SplineMap3 final : public DiffMap3 {
public:
    explicit SplineMap3(const BSplineVolume* volume) : volume_(volume) {}
    void eval(const Vector3d& p, int order, MapJet& out) const override {
        volume_->eval3(p, order, out);
    }

private:
    const BSplineVolume* volume_;
};

} // namespace ivr
