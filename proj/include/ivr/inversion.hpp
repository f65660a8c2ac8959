#pragma once

#include <string>

#include "ivr/camera.hpp"
#include "ivr/spline.hpp"

namespace ivr {

/// Reciprocal-condition threshold below which a geometry Jacobian is
/// treated as singular (degenerate parametrization handling kicks in).
constexpr double kSingularRcond = 1e-12;

enum class Method { RF, RK1, IRK1, RK2, RK3, RK4, RK4_38, RKF5 };

const char* method_name(Method m);
Method method_from_name(const std::string& name);
bool method_is_explicit_rk(Method m);

struct IntegratorSpec {
    Method method = Method::RK4;
    double c = 1.0;        // weight of the perpendicular pull-back velocity
    double ds = 0.0;       // sample distance (0: pick scene default)
    double tolerance = 0;  // RF stopping tolerance (0: pixel-frustum based)
};

/// Guiding vector field of a ray segment: a unit velocity along the ray
/// plus c times the perpendicular offset back towards it.
struct SegmentField {
    RaySegment segment;
    double c = 1.0;

    SegmentField() = default;
    SegmentField(const RaySegment& seg, double weight) : segment(seg), c(weight) {}

    Vector3d velocity(const Vector3d& g) const {
        const Vector3d d = segment.g_front - g;
        return segment.v_par + c * (d - d.dot(segment.v_par) * segment.v_par);
    }

    /// Constant Jacobian c(C - I) with column i of C equal to v_par_i * v_par.
    Matrix3d jacobian() const {
        Matrix3d cc;
        for (int i = 0; i < 3; ++i) cc.col(i) = segment.v_par[i] * segment.v_par;
        return c * (cc - Matrix3d::Identity());
    }
};

/// Jet and QR factorization of the geometry map at one parameter point,
/// shared between the pull-back solve and the implicit-Euler Jacobian solve.
class MapFrame {
public:
    void compute(const DiffMap3& map, const Vector3d& p, int order);

    const MapJet& jet() const { return jet_; }
    double rcond() const { return rcond_; }
    bool singular() const { return rcond_ < kSingularRcond; }

    Vector3d solve(const Vector3d& rhs) const { return qr_.solve(rhs); }
    Matrix3d solve(const Matrix3d& rhs) const { return qr_.solve(rhs); }

private:
    MapJet jet_;
    Eigen::ColPivHouseholderQR<Matrix3d> qr_;
    double rcond_ = 0.0;
};

/// Pull-back velocity W with J_phi(p) W = V(phi(p)), solved through the
/// frame's QR factors. Returns false when the Jacobian is singular.
bool pullback_velocity(const MapFrame& frame, const SegmentField& field, Vector3d& w);

enum class InvertStatus {
    Converged,
    ExitedFace,   // iterates kept leaving the cube through one face
    Singular,     // Jacobian singular at an iterate
    Stalled,      // line search could not reduce the residual further
    IterationCap, // best iterate carried in the result
};

struct InvertResult {
    Vector3d p = Vector3d::Zero();
    double residual = 0.0;
    int iterations = 0;
    InvertStatus status = InvertStatus::Converged;
    int exit_face = -1; // axis*2 + side when status == ExitedFace
};

struct NewtonOptions {
    double tolerance = 1e-12;
    int max_iterations = 50;
    int max_halvings = 20;
};

/// Newton-Raphson solve of phi(p) = g_target with QR-factored steps,
/// clamping to the unit cube and a backtracking line search on ||F||.
InvertResult newton_invert(const DiffMap3& map, const Vector3d& g_target, const Vector3d& x0,
                           const NewtonOptions& opt);

/// Face-restricted fallback when full Newton keeps exiting through one
/// face: Gauss-Newton on the two free coordinates, minimizing ||F||.
InvertResult boundary_walk(const DiffMap3& map, const Vector3d& g_target, const Vector3d& p_start,
                           int face, const NewtonOptions& opt);

struct StepResult {
    Vector3d p = Vector3d::Zero();
    bool ok = false;
    bool singular = false;
    int inner_iterations = 0;
};

/// One explicit Runge-Kutta step of size h on p' = W(p); stage points are
/// clamped to the cube.
StepResult explicit_rk_step(const DiffMap3& map, const Vector3d& p, double h,
                            const SegmentField& field, Method method);

/// One implicit Euler step: solves z = h W(z + p) by an inner Newton
/// iteration with the exact Jacobian (Hessian-contracted linear system),
/// reusing the QR factors of J_phi for both solves.
StepResult implicit_euler_step(const DiffMap3& map, const Vector3d& p, double h,
                               const SegmentField& field, double tolerance = 1e-13,
                               int max_inner = 30);

struct EntryFix {
    bool needed = false; // entry Jacobian was singular
    bool ok = true;
    Vector3d g_front = Vector3d::Zero();
    Vector3d p_front = Vector3d::Zero();
    double delta = 0.0; // final shrink distance used
    int attempts = 0;
};

/// Degenerate-entry handling: when J_phi is singular at the entry point,
/// advances the entry along the ray by delta and re-inverts from a start
/// point nudged towards the exit, doubling delta and the nudge on failure.
EntryFix handle_degenerate_entry(const DiffMap3& map, const RaySegment& segment,
                                 const Vector3d& p_front, const Vector3d& p_back,
                                 double tolerance);

Vector3d clamp_to_cube(const Vector3d& p);

} // namespace ivr
