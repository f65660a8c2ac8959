#pragma once

#include <cstdint>

#include "ivr/bvh.hpp"
#include "ivr/image.hpp"
#include "ivr/scene.hpp"

namespace ivr {

/// Matched entry/exit pair of one block along a view-ray.
struct SegmentPair {
    IntersectionRecord front;
    IntersectionRecord back;
    int block = 0;
};

struct PairingResult {
    std::vector<SegmentPair> pairs; // sorted front-to-back
    int dropped_records = 0;        // leftovers that found no partner
};

/// Blockwise depth-sorting: repeatedly picks the nearest unused back-facing
/// record, then the nearest unused front-facing record of the same block.
/// Unmatched leftovers are counted, never paired across blocks.
PairingResult depth_sort_pairs(PixelIntersectionList& records);

enum class ClipOutcome { Kept, Clipped, Dropped, Failed };

/// Shortens the pair against one cutting plane (the half-space the normal
/// points into is removed). A clipped endpoint is re-inverted by Newton
/// from the nearer surviving parameter point.
ClipOutcome clip_segment(SegmentPair& pair, const CutPlane& plane, const Ray& ray,
                         const DiffMap3& map, double tolerance);

/// Per-frame audit counters. Merging across pixel ranges is commutative.
struct RenderStats {
    double max_delta_p = 0.0;
    std::int64_t samples = 0;
    std::int64_t depth_violations = 0;
    std::int64_t delta_p_violations = 0;
    std::int64_t flagged_pixels = 0;
    std::int64_t records = 0;
    std::int64_t pairs = 0;
    std::int64_t degenerate_entries = 0;
    std::int64_t boundary_walks = 0;
    int tess_triangles = 0;

    void merge(const RenderStats& other);
};

struct RenderOutput {
    Image color;
    Image diagnostics; // red: inversion failure, green: delta-p violation,
                       // blue: depth-order violation
    RenderStats stats;
};

/// View-dependent tessellation of every block boundary, watertight within
/// each block (per-axis levels shared across its six faces).
TriangleBVH build_surface_bvh(const Scene& scene, int* triangle_count = nullptr);

/// Full frame: surface intersections, blockwise depth-sorting, segment
/// marching with the scene's integrator. Deterministic for a fixed scene.
RenderOutput render(const Scene& scene);

/// Single-pixel render against a prebuilt BVH (test hook).
void render_pixel(const Scene& scene, const TriangleBVH& bvh, int px, int py, Vector3d& color,
                  RenderStats& stats, Vector3d* diag_color = nullptr);

} // namespace ivr
