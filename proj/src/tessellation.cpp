#include "ivr/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ivr {

TessLevel tessellation_level(const BoundaryPatch& patch, const Camera& cam,
                             const DerivativeBounds& bounds, int max_level) {
    // Nearest possible depth of the patch, from the control-net hull.
    double depth = std::numeric_limits<double>::infinity();
    const auto& surf = patch.surface;
    for (int i = 0; i < surf.count_s(); ++i)
        for (int j = 0; j < surf.count_t(); ++j)
            depth = std::min(depth, (surf.control(i, j) - cam.eye()).dot(cam.forward()));
    depth = std::max(depth, cam.near_distance());

    const double tol = 0.5 * cam.pixel_footprint(depth);
    // Split the mixed-term budget between the two directions:
    // h_s^2 (b_ss + b_st)/8 <= tol/2 and likewise for t bounds the total
    // bilinear interpolation error by tol.
    auto count = [&](double b) {
        if (!(b > 0.0)) return 1;
        const int n = static_cast<int>(std::ceil(std::sqrt(b / (4.0 * tol))));
        return std::clamp(n, 1, max_level);
    };
    return {count(bounds.b_ss + bounds.b_st), count(bounds.b_tt + bounds.b_st)};
}

std::vector<SurfaceTriangle> tessellate(const BoundaryPatch& patch, TessLevel level,
                                        int block_id) {
    const int ns = std::max(1, level.ns), nt = std::max(1, level.nt);
    std::vector<Vector3d> grid_g(static_cast<size_t>(ns + 1) * (nt + 1));
    std::vector<Vector3d> grid_p(grid_g.size());
    std::vector<Vector2d> grid_st(grid_g.size());
    for (int i = 0; i <= ns; ++i) {
        const double s = static_cast<double>(i) / ns;
        for (int j = 0; j <= nt; ++j) {
            const double t = static_cast<double>(j) / nt;
            const size_t idx = static_cast<size_t>(i) * (nt + 1) + j;
            patch.surface.eval(s, t, 0, grid_g[idx]);
            grid_p[idx] = patch.embed(s, t);
            grid_st[idx] = Vector2d(s, t);
        }
    }
    std::vector<SurfaceTriangle> tris;
    tris.reserve(static_cast<size_t>(ns) * nt * 2);
    auto vertex = [&](SurfaceTriangle& tri, int slot, int i, int j) {
        const size_t idx = static_cast<size_t>(i) * (nt + 1) + j;
        tri.g[slot] = grid_g[idx];
        tri.p[slot] = grid_p[idx];
        tri.st[slot] = grid_st[idx];
    };
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            SurfaceTriangle lower;
            vertex(lower, 0, i, j);
            vertex(lower, 1, i + 1, j);
            vertex(lower, 2, i, j + 1);
            lower.block = block_id;
            lower.cell_i = i;
            lower.cell_j = j;
            lower.upper = false;
            lower.grid_ns = ns;
            lower.grid_nt = nt;
            tris.push_back(lower);

            SurfaceTriangle upper;
            vertex(upper, 0, i + 1, j + 1);
            vertex(upper, 1, i, j + 1);
            vertex(upper, 2, i + 1, j);
            upper.block = block_id;
            upper.cell_i = i;
            upper.cell_j = j;
            upper.upper = true;
            upper.grid_ns = ns;
            upper.grid_nt = nt;
            tris.push_back(upper);
        }
    }
    return tris;
}

} // namespace ivr
