#include "ivr/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <fstream>

#include "ivr/fields.hpp"
#include "ivr/inversion.hpp"

namespace ivr {

Vector3d VoxelGrid::center(int i, int j, int k) const {
    const Vector3d ext = hi - lo;
    return lo + Vector3d((i + 0.5) / res[0] * ext[0], (j + 0.5) / res[1] * ext[1],
                         (k + 0.5) / res[2] * ext[2]);
}

double VoxelGrid::trilinear(const Vector3d& g, const std::vector<double>& field) const {
    const Vector3d ext = hi - lo;
    double c[3];
    int i0[3];
    for (int a = 0; a < 3; ++a) {
        const double x = (g[a] - lo[a]) / ext[a] * res[a] - 0.5;
        const double clamped = std::clamp(x, 0.0, static_cast<double>(res[a] - 1));
        i0[a] = std::min(static_cast<int>(clamped), res[a] - 2);
        i0[a] = std::max(i0[a], 0);
        c[a] = clamped - i0[a];
    }
    double acc = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                const double w = (di ? c[0] : 1 - c[0]) * (dj ? c[1] : 1 - c[1]) *
                                 (dk ? c[2] : 1 - c[2]);
                acc += w * field[index(i0[0] + di, i0[1] + dj, i0[2] + dk)];
            }
    return acc;
}

namespace {

struct BlockSeeds {
    const Block* block;
    std::vector<Vector3d> params;
    std::vector<Vector3d> values;
};

std::optional<double> field_at(const Block& block, const DiffMap3& geom, const Vector3d& p) {
    switch (block.field) {
        case FieldKind::Rho: {
            ScalarJet jet;
            block.scalar->eval1(p, 0, jet);
            return jet.value;
        }
        case FieldKind::Quality: {
            MapJet jet;
            geom.eval(p, 1, jet);
            return field_param_quality(jet);
        }
        case FieldKind::VonMises: {
            MapJet phi, u;
            geom.eval(p, 1, phi);
            block.displacement->eval3(p, 1, u);
            return field_von_mises(phi, u);
        }
    }
    return std::nullopt;
}

} // namespace

VoxelGrid voxelize(const std::vector<Block>& blocks, const Eigen::Vector3i& res) {
    if (res.minCoeff() < 2) throw std::invalid_argument("voxelize: resolution must be >= 2");
    VoxelGrid grid;
    grid.res = res;
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
    if (blocks.empty()) throw std::invalid_argument("voxelize: no blocks");
    grid.lo = lo;
    grid.hi = hi;
    grid.value.assign(static_cast<size_t>(res[0]) * res[1] * res[2], 0.0);
    grid.inside.assign(grid.value.size(), 0.0);

    // Coarse forward-evaluated parameter grids provide Newton seeds.
    std::vector<BlockSeeds> seeds;
    constexpr int kSeedRes = 5;
    for (const Block& b : blocks) {
        BlockSeeds s;
        s.block = &b;
        for (int i = 0; i < kSeedRes; ++i)
            for (int j = 0; j < kSeedRes; ++j)
                for (int k = 0; k < kSeedRes; ++k) {
                    const Vector3d p(i / (kSeedRes - 1.0), j / (kSeedRes - 1.0),
                                     k / (kSeedRes - 1.0));
                    MapJet jet;
                    b.geometry->eval3(p, 0, jet);
                    s.params.push_back(p);
                    s.values.push_back(jet.value);
                }
        seeds.push_back(std::move(s));
    }

    const double tol = 1e-9 * (hi - lo).norm();
    const int n_threads =
        std::max(1, std::min(static_cast<int>(std::thread::hardware_concurrency()), res[2]));
    auto worker = [&](int tid) {
        NewtonOptions opt;
        opt.tolerance = tol;
        for (int k = tid; k < res[2]; k += n_threads) {
            for (int j = 0; j < res[1]; ++j) {
                for (int i = 0; i < res[0]; ++i) {
                    const Vector3d g = grid.center(i, j, k);
                    for (const BlockSeeds& s : seeds) {
                        int best = 0;
                        double best_d = std::numeric_limits<double>::infinity();
                        for (size_t q = 0; q < s.values.size(); ++q) {
                            const double d = (s.values[q] - g).squaredNorm();
                            if (d < best_d) {
                                best_d = d;
                                best = static_cast<int>(q);
                            }
                        }
                        SplineMap3 geom(s.block->geometry.get());
                        const InvertResult inv = newton_invert(geom, g, s.params[best], opt);
                        if (inv.status != InvertStatus::Converged || inv.residual > tol) continue;
                        const auto value = field_at(*s.block, geom, inv.p);
                        if (!value) continue;
                        grid.value[grid.index(i, j, k)] = *value;
                        grid.inside[grid.index(i, j, k)] = 1.0;
                        break;
                    }
                }
            }
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& t : pool) t.join();
    }
    return grid;
}

Image render_voxel(const Scene& scene, const VoxelGrid& grid) {
    const int w = scene.camera.width(), h = scene.camera.height();
    Image image(w, h);
    const double ds = scene.resolved_ds();
    const double xi = scene.resolved_xi();

    const int n_threads =
        std::max(1, std::min(static_cast<int>(std::thread::hardware_concurrency()), h));
    auto worker = [&](int tid) {
        for (int y = tid; y < h; y += n_threads) {
            for (int x = 0; x < w; ++x) {
                const Ray ray = scene.camera.primary_ray(x, y);
                // Clip the ray against the grid box.
                double t0 = scene.camera.near_distance();
                double t1 = std::numeric_limits<double>::infinity();
                bool miss = false;
                for (int a = 0; a < 3; ++a) {
                    if (ray.direction[a] == 0.0) {
                        if (ray.origin[a] < grid.lo[a] || ray.origin[a] > grid.hi[a]) miss = true;
                        continue;
                    }
                    double near = (grid.lo[a] - ray.origin[a]) / ray.direction[a];
                    double far = (grid.hi[a] - ray.origin[a]) / ray.direction[a];
                    if (near > far) std::swap(near, far);
                    t0 = std::max(t0, near);
                    t1 = std::min(t1, far);
                }
                CompositeState state;
                if (!miss && t0 < t1) {
                    bool have_prev = false;
                    double v_prev = 0.0;
                    double s_prev = t0;
                    for (double s = t0 + 0.5 * ds; s < t1; s += ds) {
                        const Vector3d g = ray.origin + s * ray.direction;
                        if (grid.sample_inside(g) < 0.5) {
                            have_prev = false;
                            continue;
                        }
                        const double v = grid.sample_value(g);
                        if (have_prev) {
                            const int m = scene.transfer.substeps_hint(v_prev, v, scene.max_substeps);
                            supersample_segment(scene.transfer, v_prev, v, s - s_prev, m, xi, state);
                        } else {
                            Vector3d color;
                            double alpha;
                            scene.transfer.sample(v, color, alpha);
                            composite_step(state, color, alpha, ds, xi);
                        }
                        v_prev = v;
                        s_prev = s;
                        have_prev = true;
                        if (state.saturated()) break;
                    }
                }
                image.set(x, y, state.color + (1.0 - state.alpha) * scene.background.at(x, y));
            }
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& t : pool) t.join();
    }
    return image;
}

void save_grid(const VoxelGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "ivr-grid 1\n";
    out << "res " << grid.res[0] << " " << grid.res[1] << " " << grid.res[2] << "\n";
    out << "box " << grid.lo[0] << " " << grid.lo[1] << " " << grid.lo[2] << " " << grid.hi[0]
        << " " << grid.hi[1] << " " << grid.hi[2] << "\n";
    out << "voxels\n";
    for (size_t i = 0; i < grid.value.size(); ++i)
        out << grid.value[i] << " " << grid.inside[i] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

VoxelGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string token;
    int version = 0;
    in >> token >> version;
    if (token != "ivr-grid" || version != 1)
        throw std::runtime_error(path + ": not a grid file");
    VoxelGrid grid;
    in >> token >> grid.res[0] >> grid.res[1] >> grid.res[2];
    if (token != "res") throw std::runtime_error(path + ": expected res");
    in >> token >> grid.lo[0] >> grid.lo[1] >> grid.lo[2] >> grid.hi[0] >> grid.hi[1] >>
        grid.hi[2];
    if (token != "box") throw std::runtime_error(path + ": expected box");
    in >> token;
    if (token != "voxels") throw std::runtime_error(path + ": expected voxels");
    const size_t count = static_cast<size_t>(grid.res[0]) * grid.res[1] * grid.res[2];
    grid.value.resize(count);
    grid.inside.resize(count);
    for (size_t i = 0; i < count; ++i)
        if (!(in >> grid.value[i] >> grid.inside[i]))
            throw std::runtime_error(path + ": truncated voxel data");
    return grid;
}

} // namespace ivr