#include "ivr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ivr {

void Block::validate() const {
    if (!geometry || geometry->dim() != 3)
        throw std::invalid_argument("block " + std::to_string(id) + ": needs a 3-valued geometry spline");
    if (field == FieldKind::Rho && (!scalar || scalar->dim() != 1))
        throw std::invalid_argument("block " + std::to_string(id) + ": rho field needs a scalar spline");
    if (field == FieldKind::VonMises && (!displacement || displacement->dim() != 3))
        throw std::invalid_argument("block " + std::to_string(id) +
                                    ": von Mises field needs a displacement spline");
}

double Scene::bounding_diagonal() const {
    Vector3d lo = Vector3d::Constant(std::numeric_limits<double>::infinity());
    Vector3d hi = -lo;
    for (const Block& b : blocks) {
        const auto& pts = b.geometry->control_points();
        for (size_t i = 0; i + 3 <= pts.size(); i += 3) {
            const Vector3d p(pts[i], pts[i + 1], pts[i + 2]);
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    }
    if (blocks.empty()) return 1.0;
    return (hi - lo).norm();
}

double default_ds_fraction(Method m) {
    switch (m) {
        case Method::RK1:
        case Method::IRK1: return 1.0 / 2048.0;
        default: return 1.0 / 512.0;
    }
}

double Scene::resolved_ds() const {
    if (integrator.ds > 0.0) return integrator.ds;
    return bounding_diagonal() * default_ds_fraction(integrator.method);
}

double Scene::resolved_xi() const {
    if (xi > 0.0) return xi;
    return bounding_diagonal() / 512.0;
}

void Scene::validate() const {
    for (const Block& b : blocks) b.validate();
    if (transfer.nodes().empty()) throw std::invalid_argument("scene: transfer function is empty");
    if (integrator.c < 0.0) throw std::invalid_argument("scene: integrator c must be >= 0");
    for (const CutPlane& cp : cut_planes)
        if (cp.normal.norm() == 0.0) throw std::invalid_argument("scene: cut plane with zero normal");
}

void RenderStats::merge(const RenderStats& other) {
    max_delta_p = std::max(max_delta_p, other.max_delta_p);
    samples += other.samples;
    depth_violations += other.depth_violations;
    delta_p_violations += other.delta_p_violations;
    flagged_pixels += other.flagged_pixels;
    records += other.records;
    pairs += other.pairs;
    degenerate_entries += other.degenerate_entries;
    boundary_walks += other.boundary_walks;
    tess_triangles = std::max(tess_triangles, other.tess_triangles);
}

PairingResult depth_sort_pairs(PixelIntersectionList& records) {
    PairingResult result;
    auto nearest = [&](bool front, int block, bool any_block) -> int {
        int best = -1;
        for (size_t i = 0; i < records.size(); ++i) {
            const IntersectionRecord& r = records[i];
            if (r.used || r.front_facing != front) continue;
            if (!any_block && r.block != block) continue;
            if (best < 0 || r.depth < records[best].depth) best = static_cast<int>(i);
        }
        return best;
    };
    for (;;) {
        const int back = nearest(false, 0, true);
        if (back < 0) break;
        const int front = nearest(true, records[back].block, false);
        if (front < 0 || records[front].depth > records[back].depth) {
            records[back].used = true; // no admissible partner; feed the clip rules
            ++result.dropped_records;
            continue;
        }
        records[back].used = true;
        records[front].used = true;
        SegmentPair pair;
        pair.front = records[front];
        pair.back = records[back];
        pair.block = records[back].block;
        result.pairs.push_back(pair);
    }
    for (const IntersectionRecord& r : records)
        if (!r.used && r.front_facing) ++result.dropped_records;
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const SegmentPair& a, const SegmentPair& b) { return a.front.depth < b.front.depth; });
    return result;
}

ClipOutcome clip_segment(SegmentPair& pair, const CutPlane& plane, const Ray& ray,
                         const DiffMap3& map, double tolerance) {
    const Vector3d g_front = ray.origin + pair.front.depth * ray.direction;
    const Vector3d g_back = ray.origin + pair.back.depth * ray.direction;
    const double sf = plane.normal.dot(g_front - plane.point);
    const double sb = plane.normal.dot(g_back - plane.point);
    // The half-space the normal points into is cut away.
    if (sf <= 0.0 && sb <= 0.0) return ClipOutcome::Kept;
    if (sf > 0.0 && sb > 0.0) return ClipOutcome::Dropped;

    const double t_star = pair.front.depth + (pair.back.depth - pair.front.depth) * sf / (sf - sb);
    const Vector3d g_star = ray.origin + t_star * ray.direction;
    const bool front_clipped = sf > 0.0;
    const Vector3d seed = (t_star - pair.front.depth <= pair.back.depth - t_star)
                              ? pair.front.param_point
                              : pair.back.param_point;
    NewtonOptions opt;
    opt.tolerance = tolerance;
    const InvertResult inv = newton_invert(map, g_star, seed, opt);
    if (inv.status != InvertStatus::Converged && inv.status != InvertStatus::Stalled)
        return ClipOutcome::Failed;
    if (front_clipped) {
        pair.front.depth = t_star;
        pair.front.param_point = inv.p;
    } else {
        pair.back.depth = t_star;
        pair.back.param_point = inv.p;
    }
    return ClipOutcome::Clipped;
}

namespace {

/// Per-sample Def.-1 bookkeeping for one pixel.
struct PixelAudit {
    const Camera* cam = nullptr;
    int px = 0, py = 0;
    bool enabled = false;
    RenderStats* stats = nullptr;
    double last_depth = -std::numeric_limits<double>::infinity();
    bool delta_p_violated = false;
    bool depth_violated = false;

    void begin_segment() { last_depth = -std::numeric_limits<double>::infinity(); }

    void check(const Vector3d& g, const Ray& ray) {
        if (!enabled) return;
        ++stats->samples;
        const double dp = cam->delta_p(px, py, g);
        stats->max_delta_p = std::max(stats->max_delta_p, dp);
        if (dp > 1.0 + 1e-9) {
            ++stats->delta_p_violations;
            delta_p_violated = true;
        }
        const double depth = Camera::ray_depth(ray, g);
        if (depth < last_depth - 1e-9 * (1.0 + std::abs(last_depth))) {
            ++stats->depth_violations;
            depth_violated = true;
        }
        last_depth = depth;
    }
};

struct FieldEvaluator {
    const Block* block = nullptr;
    const DiffMap3* geom = nullptr;

    std::optional<double> operator()(const Vector3d& p) const {
        switch (block->field) {
            case FieldKind::Rho: {
                ScalarJet jet;
                block->scalar->eval1(p, 0, jet);
                return jet.value;
            }
            case FieldKind::Quality: {
                MapJet jet;
                geom->eval(p, 1, jet);
                return field_param_quality(jet);
            }
            case FieldKind::VonMises: {
                MapJet phi, u;
                geom->eval(p, 1, phi);
                block->displacement->eval3(p, 1, u);
                return field_von_mises(phi, u);
            }
        }
        return std::nullopt;
    }
};

/// Walks one entry/exit pair with the scene's integrator, compositing
/// supersampled transfer slabs between consecutive field samples.
bool march_segment(const Scene& scene, const Block& block, const DiffMap3& geom,
                   const SegmentPair& pair, const Ray& ray, double ds, double xi, double c_weight,
                   CompositeState& state, PixelAudit& audit, RenderStats& stats) {
    const double span = pair.back.depth - pair.front.depth;
    if (!(span > 1e-12)) return true; // coincident faces contribute nothing

    RaySegment seg = RaySegment::between(ray.origin + pair.front.depth * ray.direction,
                                         ray.origin + pair.back.depth * ray.direction);
    Vector3d p = pair.front.param_point;

    const double frustum_floor = scene.camera.frustum_half_width(pair.front.depth);
    const EntryFix fix = handle_degenerate_entry(geom, seg, p, pair.back.param_point,
                                                 scene.integrator.tolerance > 0
                                                     ? scene.integrator.tolerance
                                                     : frustum_floor);
    if (fix.needed) {
        ++stats.degenerate_entries;
        if (!fix.ok) return false;
        p = fix.p_front;
        if ((seg.g_back - fix.g_front).norm() <= 1e-12) return true;
        seg = RaySegment::between(fix.g_front, seg.g_back);
    }
    const SegmentField field(seg, c_weight);
    const FieldEvaluator field_value{&block, &geom};

    audit.begin_segment();
    audit.check(geom.value(p), ray);
    std::optional<double> v_prev = field_value(p);
    if (!v_prev) return false;

    const int steps = std::max(1, static_cast<int>(std::ceil(seg.length / ds)));
    const Method method = scene.integrator.method;
    bool walking_face = false;
    int walk_face = -1;
    double s = 0.0;
    for (int i = 1; i <= steps; ++i) {
        const double s_next = std::min(seg.length, i * ds);
        const double h = s_next - s;
        if (!(h > 0.0)) break;
        s = s_next;

        if (method == Method::RF) {
            const Vector3d g_i = seg.g_front + s * seg.v_par;
            NewtonOptions opt;
            opt.tolerance = scene.integrator.tolerance > 0
                                ? scene.integrator.tolerance
                                : scene.camera.frustum_half_width(Camera::ray_depth(ray, g_i));
            InvertResult inv;
            if (walking_face) {
                inv = newton_invert(geom, g_i, p, opt);
                if (inv.status == InvertStatus::Converged) {
                    walking_face = false; // re-entered the domain
                } else {
                    inv = boundary_walk(geom, g_i, p, walk_face, opt);
                    ++stats.boundary_walks;
                }
            } else {
                inv = newton_invert(geom, g_i, p, opt);
            }
            switch (inv.status) {
                case InvertStatus::Converged:
                case InvertStatus::Stalled:
                    p = inv.p;
                    break;
                case InvertStatus::ExitedFace:
                    walking_face = true;
                    walk_face = inv.exit_face;
                    inv = boundary_walk(geom, g_i, inv.p, walk_face, opt);
                    ++stats.boundary_walks;
                    p = inv.p;
                    break;
                case InvertStatus::Singular:
                case InvertStatus::IterationCap:
                    return false;
            }
        } else if (method == Method::IRK1) {
            const StepResult step = implicit_euler_step(geom, p, h, field);
            if (step.singular || !step.ok) return false;
            p = step.p;
        } else {
            const StepResult step = explicit_rk_step(geom, p, h, field, method);
            if (step.singular || !step.ok) return false;
            p = step.p;
        }

        audit.check(geom.value(p), ray);
        const std::optional<double> v_cur = field_value(p);
        if (!v_cur) return false;
        const int m = scene.transfer.substeps_hint(*v_prev, *v_cur, scene.max_substeps);
        supersample_segment(scene.transfer, *v_prev, *v_cur, h, m, xi, state);
        v_prev = v_cur;
        if (state.saturated()) return true;
    }
    return true;
}

} // namespace

TriangleBVH build_surface_bvh(const Scene& scene, int* triangle_count) {
    std::vector<SurfaceTriangle> all;
    for (const Block& block : scene.blocks) {
        const auto patches = block.geometry->boundary_patches();
        // Shared per-axis levels keep shared boundary curves of the block's
        // faces sampled at identical parameter values (watertight block).
        int axis_level[3] = {1, 1, 1};
        for (const BoundaryPatch& patch : patches) {
            const DerivativeBounds bounds = second_derivative_bound(patch.surface);
            const TessLevel level = tessellation_level(patch, scene.camera, bounds);
            axis_level[patch.axis_s()] = std::max(axis_level[patch.axis_s()], level.ns);
            axis_level[patch.axis_t()] = std::max(axis_level[patch.axis_t()], level.nt);
        }
        for (const BoundaryPatch& patch : patches) {
            TessLevel level{axis_level[patch.axis_s()], axis_level[patch.axis_t()]};
            auto tris = tessellate(patch, level, block.id);
            all.insert(all.end(), tris.begin(), tris.end());
        }
    }
    if (triangle_count) *triangle_count = static_cast<int>(all.size());
    return TriangleBVH(std::move(all));
}

void render_pixel(const Scene& scene, const TriangleBVH& bvh, int px, int py, Vector3d& color,
                  RenderStats& stats, Vector3d* diag_color) {
    const Ray ray = scene.camera.primary_ray(px, py);
    PixelIntersectionList records;
    bvh.intersect(ray, scene.camera.near_distance(), records);
    stats.records += static_cast<std::int64_t>(records.size());

    bool flagged = false;

    // Near-clip rule: odd per-block parity means the near plane is inside
    // that block; insert a synthetic front record at the near plane.
    for (const Block& block : scene.blocks) {
        int count = 0;
        int nearest = -1;
        for (size_t i = 0; i < records.size(); ++i) {
            if (records[i].block != block.id) continue;
            ++count;
            if (nearest < 0 || records[i].depth < records[nearest].depth)
                nearest = static_cast<int>(i);
        }
        if (count % 2 == 0 || nearest < 0) continue;
        SplineMap3 geom(block.geometry.get());
        const Vector3d g_near = ray.origin + scene.camera.near_distance() * ray.direction;
        NewtonOptions opt;
        opt.tolerance = scene.camera.frustum_half_width(scene.camera.near_distance());
        const InvertResult inv = newton_invert(geom, g_near, records[nearest].param_point, opt);
        if (inv.status == InvertStatus::Converged || inv.status == InvertStatus::Stalled) {
            IntersectionRecord rec;
            rec.depth = scene.camera.near_distance();
            rec.param_point = inv.p;
            rec.block = block.id;
            rec.front_facing = true;
            records.push_back(rec);
        } else {
            flagged = true;
        }
    }

    PairingResult paired = depth_sort_pairs(records);
    stats.pairs += static_cast<std::int64_t>(paired.pairs.size());
    if (paired.dropped_records > 0) flagged = true;

    PixelAudit audit;
    audit.cam = &scene.camera;
    audit.px = px;
    audit.py = py;
    audit.enabled = scene.audit;
    audit.stats = &stats;

    const double ds = scene.resolved_ds();
    const double xi = scene.resolved_xi();
    CompositeState state;
    for (SegmentPair& pair : paired.pairs) {
        const Block* block = nullptr;
        for (const Block& b : scene.blocks)
            if (b.id == pair.block) block = &b;
        if (!block) continue;
        SplineMap3 geom(block->geometry.get());

        bool dropped = false;
        for (const CutPlane& plane : scene.cut_planes) {
            const double tol = scene.camera.frustum_half_width(pair.front.depth);
            const ClipOutcome outcome = clip_segment(pair, plane, ray, geom, tol);
            if (outcome == ClipOutcome::Dropped) {
                dropped = true;
                break;
            }
            if (outcome == ClipOutcome::Failed) {
                dropped = true;
                flagged = true;
                break;
            }
        }
        if (dropped) continue;

        if (!march_segment(scene, *block, geom, pair, ray, ds, xi, scene.integrator.c, state,
                           audit, stats))
            flagged = true;
        if (state.saturated()) break;
    }

    color = state.color + (1.0 - state.alpha) * scene.background.at(px, py);
    if (flagged) ++stats.flagged_pixels;
    if (diag_color) {
        *diag_color = Vector3d(flagged ? 1.0 : 0.0, audit.delta_p_violated ? 1.0 : 0.0,
                               audit.depth_violated ? 1.0 : 0.0);
    }
}

RenderOutput render(const Scene& scene) {
    scene.validate();
    RenderOutput out;
    const int w = scene.camera.width(), h = scene.camera.height();
    out.color = Image(w, h);
    out.diagnostics = Image(w, h);

    int triangle_count = 0;
    const TriangleBVH bvh = build_surface_bvh(scene, &triangle_count);
    out.stats.tess_triangles = triangle_count;

    int n_threads = scene.threads > 0 ? scene.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, h));
    std::vector<RenderStats> thread_stats(n_threads);
    auto worker = [&](int tid) {
        Vector3d color, diag;
        for (int y = tid; y < h; y += n_threads) {
            for (int x = 0; x < w; ++x) {
                render_pixel(scene, bvh, x, y, color, thread_stats[tid], &diag);
                out.color.set(x, y, color);
                out.diagnostics.set(x, y, diag);
            }
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& t : pool) t.join();
    }
    for (const RenderStats& s : thread_stats) out.stats.merge(s);
    out.stats.tess_triangles = triangle_count;
    return out;
}

} // namespace ivr
