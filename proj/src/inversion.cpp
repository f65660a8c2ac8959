#include "ivr/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ivr {

const char* method_name(Method m) {
    switch (m) {
        case Method::RF: return "rf";
        case Method::RK1: return "rk1";
        case Method::IRK1: return "irk1";
        case Method::RK2: return "rk2";
        case Method::RK3: return "rk3";
        case Method::RK4: return "rk4";
        case Method::RK4_38: return "rk4-38";
        case Method::RKF5: return "rkf5";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "rf") return Method::RF;
    if (name == "rk1") return Method::RK1;
    if (name == "irk1") return Method::IRK1;
    if (name == "rk2") return Method::RK2;
    if (name == "rk3") return Method::RK3;
    if (name == "rk4") return Method::RK4;
    if (name == "rk4-38" || name == "rk438") return Method::RK4_38;
    if (name == "rkf5" || name == "rkf") return Method::RKF5;
    throw std::invalid_argument("unknown method: " + name);
}

bool method_is_explicit_rk(Method m) {
    return m == Method::RK1 || m == Method::RK2 || m == Method::RK3 || m == Method::RK4 ||
           m == Method::RK4_38 || m == Method::RKF5;
}

Vector3d clamp_to_cube(const Vector3d& p) {
    return p.cwiseMax(Vector3d::Zero()).cwiseMin(Vector3d::Ones());
}

void MapFrame::compute(const DiffMap3& map, const Vector3d& p, int order) {
    map.eval(p, std::max(order, 1), jet_);
    qr_.compute(jet_.jacobian);
    // Column pivoting sorts |R| diagonals; their ratio estimates 1/cond.
    const auto& r = qr_.matrixR();
    const double r_max = std::abs(r(0, 0));
    const double r_min = std::abs(r(2, 2));
    rcond_ = r_max > 0.0 ? r_min / r_max : 0.0;
}

bool pullback_velocity(const MapFrame& frame, const SegmentField& field, Vector3d& w) {
    if (frame.singular()) return false;
    w = frame.solve(field.velocity(frame.jet().value));
    return true;
}

namespace {

int face_of_clamp(const Vector3d& raw) {
    // The face an out-of-cube point violates most, as axis*2 + side.
    int face = -1;
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) {
        if (-raw[a] > worst) {
            worst = -raw[a];
            face = 2 * a;
        }
        if (raw[a] - 1.0 > worst) {
            worst = raw[a] - 1.0;
            face = 2 * a + 1;
        }
    }
    return face;
}

} // namespace

InvertResult newton_invert(const DiffMap3& map, const Vector3d& g_target, const Vector3d& x0,
                           const NewtonOptions& opt) {
    InvertResult res;
    Vector3d x = clamp_to_cube(x0);
    MapFrame frame;
    MapJet probe;
    map.eval(x, 0, probe);
    double f_norm = (probe.value - g_target).norm();
    res.p = x;
    res.residual = f_norm;

    int same_face_clamps = 0;
    int last_face = -1;
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (f_norm <= opt.tolerance) {
            res.status = InvertStatus::Converged;
            return res;
        }
        frame.compute(map, x, 1);
        if (frame.singular()) {
            res.status = InvertStatus::Singular;
            return res;
        }
        const Vector3d f = frame.jet().value - g_target;
        const Vector3d step = frame.solve(Vector3d(-f));

        // Backtracking line search on ||F||, iterates clamped to the cube.
        double lambda = 1.0;
        Vector3d x_next = x;
        double f_next = f_norm;
        bool improved = false;
        int clamped_face = -1;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            const Vector3d raw = x + lambda * step;
            const Vector3d cand = clamp_to_cube(raw);
            map.eval(cand, 0, probe);
            const double cand_norm = (probe.value - g_target).norm();
            if (cand_norm < f_norm) {
                x_next = cand;
                f_next = cand_norm;
                improved = true;
                clamped_face = (cand - raw).norm() > 0.0 ? face_of_clamp(raw) : -1;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) {
            res.status = f_norm <= opt.tolerance ? InvertStatus::Converged : InvertStatus::Stalled;
            return res;
        }
        x = x_next;
        f_norm = f_next;
        res.p = x;
        res.residual = f_norm;
        res.iterations = it + 1;

        if (clamped_face >= 0 && clamped_face == last_face) {
            if (++same_face_clamps >= 3) {
                res.status = InvertStatus::ExitedFace;
                res.exit_face = clamped_face;
                return res;
            }
        } else {
            same_face_clamps = clamped_face >= 0 ? 1 : 0;
        }
        last_face = clamped_face;
    }
    if (f_norm <= opt.tolerance) {
        res.status = InvertStatus::Converged;
        return res;
    }
    res.status = InvertStatus::IterationCap;
    return res;
}

InvertResult boundary_walk(const DiffMap3& map, const Vector3d& g_target, const Vector3d& p_start,
                           int face, const NewtonOptions& opt) {
    InvertResult res;
    res.exit_face = face;
    const int axis = face / 2;
    const int f0 = (axis + 1) % 3, f1 = (axis + 2) % 3;
    Vector3d x = clamp_to_cube(p_start);
    x[axis] = face % 2;

    MapJet jet;
    map.eval(x, 0, jet);
    double f_norm = (jet.value - g_target).norm();
    res.p = x;
    res.residual = f_norm;

    for (int it = 0; it < opt.max_iterations; ++it) {
        if (f_norm <= opt.tolerance) break;
        map.eval(x, 1, jet);
        Eigen::Matrix<double, 3, 2> j_sub;
        j_sub.col(0) = jet.jacobian.col(f0);
        j_sub.col(1) = jet.jacobian.col(f1);
        const Vector3d f = jet.value - g_target;
        // Least-squares Newton step in the two free coordinates.
        const Vector2d step = j_sub.colPivHouseholderQr().solve(-f);
        double lambda = 1.0;
        bool improved = false;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            Vector3d cand = x;
            cand[f0] += lambda * step[0];
            cand[f1] += lambda * step[1];
            cand = clamp_to_cube(cand);
            cand[axis] = face % 2;
            map.eval(cand, 0, jet);
            const double cand_norm = (jet.value - g_target).norm();
            if (cand_norm < f_norm) {
                x = cand;
                f_norm = cand_norm;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        res.iterations = it + 1;
        if (!improved) break;
        res.p = x;
        res.residual = f_norm;
    }
    res.status = InvertStatus::Converged;
    return res;
}

namespace {

struct Tableau {
    int stages;
    double a[6][5];
    double b[6];
};

// Fehlberg 4(5) pair; the 5th-order weights propagate the solution.
constexpr Tableau kRkf5 = {
    6,
    {{0, 0, 0, 0, 0},
     {1.0 / 4, 0, 0, 0, 0},
     {3.0 / 32, 9.0 / 32, 0, 0, 0},
     {1932.0 / 2197, -7200.0 / 2197, 7296.0 / 2197, 0, 0},
     {439.0 / 216, -8.0, 3680.0 / 513, -845.0 / 4104, 0},
     {-8.0 / 27, 2.0, -3544.0 / 2565, 1859.0 / 4104, -11.0 / 40}},
    {16.0 / 135, 0.0, 6656.0 / 12825, 28561.0 / 56430, -9.0 / 50, 2.0 / 55}};

const Tableau& tableau_for(Method m) {
    static const Tableau rk1 = {1, {{0, 0, 0, 0, 0}}, {1.0}};
    static const Tableau rk2 = {2, {{0, 0, 0, 0, 0}, {0.5, 0, 0, 0, 0}}, {0.0, 1.0}};
    static const Tableau rk3 = {
        3, {{0, 0, 0, 0, 0}, {0.5, 0, 0, 0, 0}, {-1.0, 2.0, 0, 0, 0}}, {1.0 / 6, 2.0 / 3, 1.0 / 6}};
    static const Tableau rk4 = {4,
                                {{0, 0, 0, 0, 0},
                                 {0.5, 0, 0, 0, 0},
                                 {0.0, 0.5, 0, 0, 0},
                                 {0.0, 0.0, 1.0, 0, 0}},
                                {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}};
    static const Tableau rk438 = {4,
                                  {{0, 0, 0, 0, 0},
                                   {1.0 / 3, 0, 0, 0, 0},
                                   {-1.0 / 3, 1.0, 0, 0, 0},
                                   {1.0, -1.0, 1.0, 0, 0}},
                                  {1.0 / 8, 3.0 / 8, 3.0 / 8, 1.0 / 8}};
    switch (m) {
        case Method::RK1: return rk1;
        case Method::RK2: return rk2;
        case Method::RK3: return rk3;
        case Method::RK4: return rk4;
        case Method::RK4_38: return rk438;
        case Method::RKF5: return kRkf5;
        default: throw std::logic_error("not an explicit RK method");
    }
}

} // namespace

StepResult explicit_rk_step(const DiffMap3& map, const Vector3d& p, double h,
                            const SegmentField& field, Method method) {
    const Tableau& tab = tableau_for(method);
    StepResult res;
    Vector3d k[6];
    MapFrame frame;
    for (int s = 0; s < tab.stages; ++s) {
        Vector3d q = p;
        for (int j = 0; j < s; ++j) q += h * tab.a[s][j] * k[j];
        q = clamp_to_cube(q);
        frame.compute(map, q, 1);
        if (!pullback_velocity(frame, field, k[s])) {
            res.singular = true;
            return res;
        }
    }
    Vector3d next = p;
    for (int s = 0; s < tab.stages; ++s) next += h * tab.b[s] * k[s];
    res.p = clamp_to_cube(next);
    res.ok = true;
    return res;
}

StepResult implicit_euler_step(const DiffMap3& map, const Vector3d& p, double h,
                               const SegmentField& field, double tolerance, int max_inner) {
    StepResult res;
    const Matrix3d jv = field.jacobian();
    Vector3d z = Vector3d::Zero();
    MapFrame frame;
    for (int it = 0; it < max_inner; ++it) {
        const Vector3d q = clamp_to_cube(z + p);
        frame.compute(map, q, 2);
        Vector3d w;
        if (!pullback_velocity(frame, field, w)) {
            res.singular = true;
            res.inner_iterations = it;
            return res;
        }
        const Vector3d g = z - h * w;
        if (g.norm() <= tolerance) {
            res.p = clamp_to_cube(p + z);
            res.ok = true;
            res.inner_iterations = it;
            return res;
        }
        // J_phi J_G = H_phi (z - G) + (I - h J_V) J_phi, with z - G = h W.
        const Vector3d hw = z - g;
        Matrix3d contracted;
        for (int c = 0; c < 3; ++c)
            contracted.row(c) = (frame.jet().hessian[c] * hw).transpose();
        const Matrix3d rhs = contracted + (Matrix3d::Identity() - h * jv) * frame.jet().jacobian;
        const Matrix3d j_g = frame.solve(rhs);
        const Vector3d dz = j_g.partialPivLu().solve(-g);
        if (!dz.allFinite()) {
            res.inner_iterations = it;
            return res;
        }
        z += dz;
    }
    res.inner_iterations = max_inner;
    return res; // inner Newton did not converge; step rejected
}

EntryFix handle_degenerate_entry(const DiffMap3& map, const RaySegment& segment,
                                 const Vector3d& p_front, const Vector3d& p_back,
                                 double tolerance) {
    EntryFix fix;
    fix.g_front = segment.g_front;
    fix.p_front = p_front;

    MapFrame frame;
    frame.compute(map, clamp_to_cube(p_front), 1);
    if (!frame.singular()) return fix;

    fix.needed = true;
    fix.ok = false;
    Vector3d p_dir = p_back - p_front;
    const double p_len = p_dir.norm();
    p_dir = p_len > 0.0 ? Vector3d(p_dir / p_len) : Vector3d::UnitX();

    NewtonOptions opt;
    opt.tolerance = tolerance;
    double delta = 1e-3 * segment.length;
    double eps = 1e-3 * segment.length;
    const double cap = 1e-1 * segment.length;
    while (delta <= cap) {
        ++fix.attempts;
        const Vector3d g_new = segment.g_front + delta * segment.v_par;
        const Vector3d x0 = clamp_to_cube(p_front + eps * p_dir);
        const InvertResult inv = newton_invert(map, g_new, x0, opt);
        if (inv.status == InvertStatus::Converged) {
            frame.compute(map, inv.p, 1);
            if (!frame.singular()) {
                fix.ok = true;
                fix.g_front = g_new;
                fix.p_front = inv.p;
                fix.delta = delta;
                return fix;
            }
        }
        delta *= 2.0;
        eps *= 2.0;
    }
    return fix;
}

} // namespace ivr
