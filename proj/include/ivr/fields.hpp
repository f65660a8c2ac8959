#pragma once

#include <optional>

#include "ivr/spline.hpp"

namespace ivr {

/// Parametrization quality det(J_phi)/||J_phi||_F; zero for a vanishing
/// Jacobian. Low values flag near-degenerate geometry.
double field_param_quality(const MapJet& phi_jet);

/// Von Mises stress from a displacement jet: solves
///   [J_phi]^T J_{u o phi^-1} = [J_u]^T,
/// symmetrizes to sigma and evaluates
///   ((s11-s22)^2 + (s22-s33)^2 + (s33-s11)^2 + 6(s12^2+s23^2+s31^2)) / 2.
/// Empty when J_phi is singular.
std::optional<double> field_von_mises(const MapJet& phi_jet, const MapJet& u_jet);

/// Same evaluation on an explicitly given displacement gradient
/// J_{u o phi^-1} (test hook and shared core).
double von_mises_of_gradient(const Matrix3d& grad);

enum class FieldKind { Rho, Quality, VonMises };

} // namespace ivr
