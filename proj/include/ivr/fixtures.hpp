#pragma once

#include "ivr/scene.hpp"

namespace ivr {
namespace fixtures {

/// Quadratic one-block bar along z, cross-section rotating by 90 degrees
/// over its length (5x5x9 control net).
BSplineVolume twisted_bar();

/// Quadratic block on a unit box with one face edge contracted to a point;
/// J_phi is singular along that edge.
BSplineVolume collapsed_edge_block();

/// Two straight quadratic blocks sharing the face x = 1 exactly.
std::vector<BSplineVolume> channel_blocks();

/// Quadratic block with its top face dipped inward, so segment chords can
/// leave the domain.
BSplineVolume concave_face_block();

/// Identity map on the unit cube, degree p per direction.
BSplineVolume identity_cube(int degree = 1);

/// Scalar spline reproducing rho(p) = p[axis] on the given volume's layout.
BSplineVolume linear_scalar(const BSplineVolume& geometry, int axis);

/// Displacement spline: a quadratic-in-z shear of magnitude `gamma`.
BSplineVolume shear_displacement(const BSplineVolume& geometry, double gamma);

/// Camera framing the control hull of the given blocks from a diagonal
/// viewpoint.
Camera frame_blocks(const std::vector<Block>& blocks, int width, int height,
                    double fov_y_deg = 42.0);

Scene twisted_bar_scene(Method method, int width, int height);
Scene collapsed_edge_scene(Method method, int width, int height);
Scene channel_scene(Method method, int width, int height);
Scene concave_face_scene(Method method, int width, int height);

/// Writes every fixture volume and scene below the directory.
void write_all(const std::string& directory);

} // namespace fixtures
} // namespace ivr
