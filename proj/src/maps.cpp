#include "ivr/maps.hpp"

#include <cmath>
#include <stdexcept>

namespace ivr {

AnalyticMap::AnalyticMap(std::string name, EvalFn fn)
    : name_(std::move(name)), fn_(std::move(fn)) {
    self_test();
}

void AnalyticMap::self_test() const {
    const Vector3d probes[] = {{0.31, 0.47, 0.52}, {0.73, 0.21, 0.36}, {0.12, 0.88, 0.69}};
    const double h = 1e-6;
    MapJet jet, plus, minus;
    for (const Vector3d& p : probes) {
        eval(p, 2, jet);
        for (int a = 0; a < 3; ++a) {
            Vector3d pp = p, pm = p;
            pp[a] += h;
            pm[a] -= h;
            eval(pp, 1, plus);
            eval(pm, 1, minus);
            const Vector3d fd_col = (plus.value - minus.value) / (2 * h);
            if ((jet.jacobian.col(a) - fd_col).norm() > 1e-5 * (1.0 + fd_col.norm()))
                throw std::logic_error("analytic map '" + name_ + "': jacobian mismatch");
            const Matrix3d fd_hess_col = (plus.jacobian - minus.jacobian) / (2 * h);
            for (int c = 0; c < 3; ++c)
                for (int b = 0; b < 3; ++b)
                    if (std::abs(jet.hessian[c](b, a) - fd_hess_col(c, b)) >
                        1e-4 * (1.0 + std::abs(fd_hess_col(c, b))))
                        throw std::logic_error("analytic map '" + name_ + "': hessian mismatch");
        }
    }
}

namespace {

void eval_identity(const Vector3d& p, int order, MapJet& out) {
    out.value = p;
    if (order >= 1) out.jacobian = Matrix3d::Identity();
    if (order >= 2)
        for (auto& h : out.hessian) h.setZero();
}

void eval_sine_shear(const Vector3d& p, int order, MapJet& out) {
    const double x = p[0];
    out.value = Vector3d(x, 0.3 * std::sin(2 * M_PI * x) + p[1], p[2]);
    if (order >= 1) {
        out.jacobian = Matrix3d::Identity();
        out.jacobian(1, 0) = 0.6 * M_PI * std::cos(2 * M_PI * x);
    }
    if (order >= 2) {
        for (auto& h : out.hessian) h.setZero();
        out.hessian[1](0, 0) = -1.2 * M_PI * M_PI * std::sin(2 * M_PI * x);
    }
}

void eval_ripple(const Vector3d& p, int order, MapJet& out) {
    const double x = p[0];
    const double s = std::sin(10 * M_PI * x), c = std::cos(10 * M_PI * x);
    out.value = Vector3d(2 * x, p[1] + 0.3 * (1 - x) * s, p[2]);
    if (order >= 1) {
        out.jacobian = Matrix3d::Identity();
        out.jacobian(0, 0) = 2.0;
        out.jacobian(1, 0) = -0.3 * s + 3 * M_PI * (1 - x) * c;
    }
    if (order >= 2) {
        for (auto& h : out.hessian) h.setZero();
        out.hessian[1](0, 0) = -6 * M_PI * c - 30 * M_PI * M_PI * (1 - x) * s;
    }
}

} // namespace

std::shared_ptr<const AnalyticMap> find_analytic_map(const std::string& name) {
    static const auto identity = std::make_shared<AnalyticMap>("identity", eval_identity);
    static const auto sine_shear = std::make_shared<AnalyticMap>("sine-shear", eval_sine_shear);
    static const auto ripple = std::make_shared<AnalyticMap>("ripple", eval_ripple);
    if (name == "identity") return identity;
    if (name == "sine-shear") return sine_shear;
    if (name == "ripple") return ripple;
    throw std::invalid_argument("unknown analytic map: " + name);
}

std::vector<std::string> analytic_map_names() { return {"identity", "sine-shear", "ripple"}; }

} // namespace ivr
