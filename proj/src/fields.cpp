#include "ivr/fields.hpp"

#include <cmath>

namespace ivr {

double field_param_quality(const MapJet& phi_jet) {
    const double fro = phi_jet.jacobian.norm();
    if (fro == 0.0) return 0.0;
    return phi_jet.jacobian.determinant() / fro;
}

double von_mises_of_gradient(const Matrix3d& grad) {
    const Matrix3d s = 0.5 * (grad + grad.transpose());
    const double d01 = s(0, 0) - s(1, 1);
    const double d12 = s(1, 1) - s(2, 2);
    const double d20 = s(2, 2) - s(0, 0);
    const double shear = s(0, 1) * s(0, 1) + s(1, 2) * s(1, 2) + s(2, 0) * s(2, 0);
    return (d01 * d01 + d12 * d12 + d20 * d20 + 6.0 * shear) / 2.0;
}

std::optional<double> field_von_mises(const MapJet& phi_jet, const MapJet& u_jet) {
    Eigen::ColPivHouseholderQR<Matrix3d> qr(phi_jet.jacobian.transpose());
    const auto& r = qr.matrixR();
    if (std::abs(r(0, 0)) == 0.0 || std::abs(r(2, 2) / r(0, 0)) < 1e-12) return std::nullopt;
    const Matrix3d grad = qr.solve(u_jet.jacobian.transpose());
    return von_mises_of_gradient(grad);
}

} // namespace ivr
