#include "ivr/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ivr {

namespace {

constexpr int kLeafSize = 4;

struct TriBounds {
    Vector3d lo, hi, centroid;
};

bool intersect_aabb(const Vector3d& lo, const Vector3d& hi, const Ray& ray,
                    const Vector3d& inv_dir) {
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (ray.direction[a] == 0.0) {
            if (ray.origin[a] < lo[a] || ray.origin[a] > hi[a]) return false;
            continue;
        }
        double near = (lo[a] - ray.origin[a]) * inv_dir[a];
        double far = (hi[a] - ray.origin[a]) * inv_dir[a];
        if (inv_dir[a] < 0.0) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace

TriangleBVH::TriangleBVH(std::vector<SurfaceTriangle> triangles)
    : triangles_(std::move(triangles)) {
    if (triangles_.empty()) return;
    std::vector<int> order(triangles_.size());
    std::iota(order.begin(), order.end(), 0);
    nodes_.reserve(triangles_.size() * 2);
    root_ = build(order, 0, static_cast<int>(order.size()));
    // Rearrange triangles into leaf order so leaves are contiguous.
    std::vector<SurfaceTriangle> sorted;
    sorted.reserve(triangles_.size());
    for (int idx : order) sorted.push_back(triangles_[idx]);
    triangles_ = std::move(sorted);
}

int TriangleBVH::build(std::vector<int>& order, int begin, int end) {
    Node node;
    node.lo = Vector3d::Constant(std::numeric_limits<double>::infinity());
    node.hi = -node.lo;
    Vector3d c_lo = node.lo, c_hi = node.hi;
    for (int i = begin; i < end; ++i) {
        const SurfaceTriangle& tri = triangles_[order[i]];
        Vector3d lo = tri.g[0].cwiseMin(tri.g[1]).cwiseMin(tri.g[2]);
        Vector3d hi = tri.g[0].cwiseMax(tri.g[1]).cwiseMax(tri.g[2]);
        node.lo = node.lo.cwiseMin(lo);
        node.hi = node.hi.cwiseMax(hi);
        const Vector3d c = (lo + hi) * 0.5;
        c_lo = c_lo.cwiseMin(c);
        c_hi = c_hi.cwiseMax(c);
    }
    if (end - begin <= kLeafSize) {
        node.left = begin;
        node.count = end - begin;
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int axis;
    (c_hi - c_lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](int a, int b) {
                         auto center = [&](int t) {
                             return triangles_[t].g[0][axis] + triangles_[t].g[1][axis] +
                                    triangles_[t].g[2][axis];
                         };
                         const double ca = center(a), cb = center(b);
                         return ca < cb || (ca == cb && a < b);
                     });
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(order, begin, mid);
    const int right = build(order, mid, end);
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    nodes_[node_index].count = 0;
    return node_index;
}

void TriangleBVH::intersect(const Ray& ray, double t_min, PixelIntersectionList& out) const {
    if (root_ < 0) return;
    const Vector3d inv_dir = ray.direction.cwiseInverse();
    int stack[64];
    int top = 0;
    stack[top++] = root_;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!intersect_aabb(node.lo, node.hi, ray, inv_dir)) continue;
        if (node.count == 0) {
            stack[top++] = node.left;
            stack[top++] = node.right;
            continue;
        }
        for (int i = node.left; i < node.left + node.count; ++i) {
            const SurfaceTriangle& tri = triangles_[i];
            // Moller-Trumbore, inclusive on all edges; ownership dedups.
            const Vector3d e1 = tri.g[1] - tri.g[0];
            const Vector3d e2 = tri.g[2] - tri.g[0];
            const Vector3d pv = ray.direction.cross(e2);
            const double det = e1.dot(pv);
            if (det == 0.0) continue;
            const double inv_det = 1.0 / det;
            const Vector3d tv = ray.origin - tri.g[0];
            const double u = tv.dot(pv) * inv_det;
            if (u < 0.0 || u > 1.0) continue;
            const Vector3d qv = tv.cross(e1);
            const double v = ray.direction.dot(qv) * inv_det;
            if (v < 0.0 || u + v > 1.0) continue;
            const double t = e2.dot(qv) * inv_det;
            if (!(t > t_min)) continue;

            // Edge-ownership: the hit belongs to the triangle whose grid
            // cell/half the patch coordinates map back to.
            const Vector2d st = (1.0 - u - v) * tri.st[0] + u * tri.st[1] + v * tri.st[2];
            const int ci = std::min(static_cast<int>(st[0] * tri.grid_ns), tri.grid_ns - 1);
            const int cj = std::min(static_cast<int>(st[1] * tri.grid_nt), tri.grid_nt - 1);
            if (ci != tri.cell_i || cj != tri.cell_j) continue;
            const double xi = st[0] * tri.grid_ns - ci;
            const double eta = st[1] * tri.grid_nt - cj;
            if ((xi + eta > 1.0) != tri.upper) continue;

            IntersectionRecord rec;
            rec.depth = t;
            rec.param_point =
                (1.0 - u - v) * tri.p[0] + u * tri.p[1] + v * tri.p[2];
            rec.block = tri.block;
            const Vector3d normal = e1.cross(e2);
            rec.front_facing = normal.dot(ray.direction) < 0.0;
            out.push_back(rec);
        }
    }
    std::sort(out.begin(), out.end(), [](const IntersectionRecord& a, const IntersectionRecord& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        if (a.block != b.block) return a.block < b.block;
        return a.front_facing && !b.front_facing;
    });
}

} // namespace ivr
