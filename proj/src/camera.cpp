#include "ivr/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace ivr {

RaySegment RaySegment::between(const Vector3d& front, const Vector3d& back) {
    RaySegment seg;
    seg.g_front = front;
    seg.g_back = back;
    seg.length = (back - front).norm();
    if (!(seg.length > 0.0)) throw std::invalid_argument("ray segment: zero length");
    seg.v_par = (back - front) / seg.length;
    return seg;
}

Camera::Camera(const Vector3d& eye, const Vector3d& look_at, const Vector3d& up,
               double fov_y_radians, int width, int height, double near_distance)
    : eye_(eye), width_(width), height_(height), near_(near_distance) {
    if (width < 1 || height < 1) throw std::invalid_argument("camera: empty image");
    if (!(fov_y_radians > 0.0) || fov_y_radians >= M_PI)
        throw std::invalid_argument("camera: bad field of view");
    if (!(near_ > 0.0)) throw std::invalid_argument("camera: near distance must be positive");
    forward_ = (look_at - eye).normalized();
    right_ = forward_.cross(up).normalized();
    if (!right_.allFinite() || right_.norm() < 0.5)
        throw std::invalid_argument("camera: up parallel to view direction");
    up_ = right_.cross(forward_); // orthonormal by construction
    fov_y_ = fov_y_radians;
    tan_half_fov_ = std::tan(0.5 * fov_y_radians);
}

Ray Camera::primary_ray(int px, int py) const {
    // Screen y grows downward, camera up_ grows upward.
    const double sx = (px + 0.5) / width_ * 2.0 - 1.0;
    const double sy = 1.0 - (py + 0.5) / height_ * 2.0;
    const double aspect = static_cast<double>(width_) / height_;
    Ray ray;
    ray.origin = eye_;
    ray.direction =
        (forward_ + sx * aspect * tan_half_fov_ * right_ + sy * tan_half_fov_ * up_).normalized();
    ray.px = px;
    ray.py = py;
    return ray;
}

Vector2d Camera::project_to_screen(const Vector3d& g) const {
    const Vector3d rel = g - eye_;
    const double depth = rel.dot(forward_);
    if (!(depth > 0.0)) throw std::domain_error("project_to_screen: point not in front of eye");
    const double aspect = static_cast<double>(width_) / height_;
    const double sx = rel.dot(right_) / (depth * tan_half_fov_ * aspect);
    const double sy = rel.dot(up_) / (depth * tan_half_fov_);
    return {(sx + 1.0) * 0.5 * width_, (1.0 - sy) * 0.5 * height_};
}

double Camera::delta_p(int px, int py, const Vector3d& g) const {
    const Vector2d s = project_to_screen(g);
    const Vector2d center(px + 0.5, py + 0.5);
    return 2.0 * (s - center).lpNorm<Eigen::Infinity>();
}

double Camera::pixel_footprint(double depth) const {
    return 2.0 * std::max(depth, near_) * tan_half_fov_ / height_;
}

} // namespace ivr
