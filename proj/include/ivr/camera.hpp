#pragma once

#include <Eigen/Dense>

namespace ivr {

using Eigen::Vector2d;
using Eigen::Vector3d;

struct Ray {
    Vector3d origin = Vector3d::Zero();
    Vector3d direction = Vector3d::UnitZ(); // unit length
    int px = 0, py = 0;
};

/// Straight piece of a view-ray between an entry and an exit point.
struct RaySegment {
    Vector3d g_front = Vector3d::Zero();
    Vector3d g_back = Vector3d::Zero();
    Vector3d v_par = Vector3d::UnitZ(); // (g_back - g_front) normalized
    double length = 0.0;

    static RaySegment between(const Vector3d& front, const Vector3d& back);
};

/// Pinhole perspective camera. Pixel (i,j) covers the unit square centered
/// at continuous screen coordinates (i+0.5, j+0.5), row-major from top-left.
class Camera {
public:
    Camera() = default;
    Camera(const Vector3d& eye, const Vector3d& look_at, const Vector3d& up,
           double fov_y_radians, int width, int height, double near_distance);

    const Vector3d& eye() const { return eye_; }
    const Vector3d& forward() const { return forward_; }
    int width() const { return width_; }
    int height() const { return height_; }
    double near_distance() const { return near_; }
    double fov_y() const { return fov_y_; }

    /// Ray through the center of pixel (px, py).
    Ray primary_ray(int px, int py) const;

    /// Continuous screen coordinates of a world point strictly in front of
    /// the eye. Throws std::domain_error otherwise.
    Vector2d project_to_screen(const Vector3d& g) const;

    /// Pixel-accuracy measure: 2 * || project(g) - pixel center ||_inf.
    /// At most 1 exactly when g projects inside the pixel square.
    double delta_p(int px, int py, const Vector3d& g) const;

    /// Signed distance of the orthogonal projection of g onto the ray from
    /// the ray origin.
    static double ray_depth(const Ray& ray, const Vector3d& g) {
        return (g - ray.origin).dot(ray.direction);
    }

    /// World-space side length of a pixel at the given depth along the
    /// viewing axis.
    double pixel_footprint(double depth) const;

    /// Conservative lower bound on the distance from a point at the given
    /// depth to its pixel frustum boundary: half the pixel footprint there.
    double frustum_half_width(double depth) const { return 0.5 * pixel_footprint(depth); }

private:
    Vector3d eye_ = Vector3d::Zero();
    Vector3d forward_ = Vector3d::UnitZ();
    Vector3d right_ = Vector3d::UnitX();
    Vector3d up_ = Vector3d::UnitY();
    double tan_half_fov_ = 1.0;
    double fov_y_ = 1.5707963267948966;
    int width_ = 1, height_ = 1;
    double near_ = 1e-3;
};

} // namespace ivr
