#pragma once

#include <vector>

#include "ivr/camera.hpp"
#include "ivr/tessellation.hpp"

namespace ivr {

/// One ray/boundary-surface hit.
struct IntersectionRecord {
    double depth = 0.0;                 // distance along the unit ray direction
    Vector3d param_point = Vector3d::Zero(); // on a face of the parameter cube
    int block = 0;
    bool front_facing = false;          // outward normal opposes the ray
    bool used = false;
};

using PixelIntersectionList = std::vector<IntersectionRecord>;

/// Bounding-volume hierarchy over surface triangles (median split on the
/// longest centroid axis). Immutable after build.
class TriangleBVH {
public:
    TriangleBVH() = default;
    explicit TriangleBVH(std::vector<SurfaceTriangle> triangles);

    size_t triangle_count() const { return triangles_.size(); }
    const std::vector<SurfaceTriangle>& triangles() const { return triangles_; }

    /// Appends every hit with depth > t_min. Hits exactly on shared cell
    /// edges are counted once via the grid ownership rule. Deterministic:
    /// output sorted by (depth, block, front) before returning.
    void intersect(const Ray& ray, double t_min, PixelIntersectionList& out) const;

private:
    struct Node {
        Vector3d lo, hi;
        int left = -1;   // internal: child index; leaf: first triangle
        int count = 0;   // leaf triangle count, 0 for internal nodes
        int right = -1;
    };

    int build(std::vector<int>& order, int begin, int end);

    std::vector<SurfaceTriangle> triangles_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace ivr
