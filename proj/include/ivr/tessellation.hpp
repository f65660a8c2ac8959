#pragma once

#include <vector>

#include "ivr/camera.hpp"
#include "ivr/spline.hpp"

namespace ivr {

/// Per-direction subdivision counts for one boundary patch.
struct TessLevel {
    int ns = 1;
    int nt = 1;
};

/// One triangle of a tessellated boundary patch. Vertices carry both the
/// geometry-space position and the embedded parameter-cube point; the
/// winding makes cross(g1-g0, g2-g0) point out of the block.
struct SurfaceTriangle {
    Vector3d g[3];
    Vector3d p[3];
    Vector2d st[3]; // patch coordinates, for the edge-ownership rule
    int block = 0;
    // Grid cell this triangle covers, for half-open hit ownership.
    int cell_i = 0, cell_j = 0;
    bool upper = false;
    int grid_ns = 1, grid_nt = 1;
};

/// Subdivision counts such that the linear-interpolation error bound
/// (h^2/8 per direction, from the control-net second-derivative bounds)
/// stays below half the world-space pixel footprint at the patch's nearest
/// depth. Planar patches land at (1,1).
TessLevel tessellation_level(const BoundaryPatch& patch, const Camera& cam,
                             const DerivativeBounds& bounds, int max_level = 1024);

/// Uniform parameter-grid triangulation (2 triangles per cell); grid
/// vertices are evaluated once and shared, so patches are watertight.
std::vector<SurfaceTriangle> tessellate(const BoundaryPatch& patch, TessLevel level, int block_id);

} // namespace ivr
