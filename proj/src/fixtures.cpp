#include "ivr/fixtures.hpp"

#include <cmath>
#include <functional>
#include <filesystem>
#include <limits>

#include "ivr/sceneio.hpp"

namespace ivr {
namespace fixtures {

namespace {

KnotVector clamped_uniform(int count, int degree) {
    std::vector<double> knots;
    for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
    const int spans = count - degree;
    for (int i = 1; i < spans; ++i) knots.push_back(static_cast<double>(i) / spans);
    for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
    return KnotVector(std::move(knots), degree);
}

/// Greville abscissae of a clamped knot vector; control values placed there
/// reproduce linear functions exactly.
std::vector<double> greville(const KnotVector& kv) {
    const auto& knots = kv.knots();
    const int p = kv.degree();
    std::vector<double> out(kv.num_basis());
    for (int i = 0; i < kv.num_basis(); ++i) {
        double sum = 0.0;
        for (int j = 1; j <= p; ++j) sum += knots[i + j];
        out[i] = p > 0 ? sum / p : 0.5 * (knots[i] + knots[i + 1]);
    }
    return out;
}

BSplineVolume from_grid(int l, int m, int n, int degree,
                        const std::function<Vector3d(double, double, double)>& f) {
    KnotVector ku = clamped_uniform(l, degree);
    KnotVector kv = clamped_uniform(m, degree);
    KnotVector kw = clamped_uniform(n, degree);
    const auto gu = greville(ku), gv = greville(kv), gw = greville(kw);
    std::vector<double> pts;
    pts.reserve(static_cast<size_t>(l) * m * n * 3);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < l; ++i) {
                const Vector3d p = f(gu[i], gv[j], gw[k]);
                pts.push_back(p[0]);
                pts.push_back(p[1]);
                pts.push_back(p[2]);
            }
    return BSplineVolume(std::move(ku), std::move(kv), std::move(kw), 3, std::move(pts));
}

TransferFunction default_transfer(double lo, double hi) {
    const double span = hi - lo;
    std::vector<TransferNode> nodes = {
        {lo, {0.18, 0.25, 0.65}, 0.08},
        {lo + 0.35 * span, {0.10, 0.65, 0.75}, 0.22},
        {lo + 0.65 * span, {0.95, 0.80, 0.25}, 0.45},
        {hi, {0.90, 0.25, 0.15}, 0.85},
    };
    return TransferFunction(std::move(nodes));
}

} // namespace

BSplineVolume twisted_bar() {
    return from_grid(5, 5, 9, 2, [](double u, double v, double w) {
        const double angle = 0.5 * M_PI * w;
        const double x = u - 0.5, y = v - 0.5;
        const double c = std::cos(angle), s = std::sin(angle);
        return Vector3d(c * x - s * y, s * x + c * y, 3.0 * w);
    });
}

BSplineVolume collapsed_edge_block() {
    BSplineVolume box = from_grid(4, 4, 4, 2, [](double u, double v, double w) {
        return Vector3d(u, v, w);
    });
    // Contract the edge (u varying, v = 1, w = 1) to a single point.
    std::vector<double> pts = box.control_points();
    const int l = box.count_u(), m = box.count_v(), n = box.count_w();
    for (int i = 0; i < l; ++i) {
        const size_t idx = ((static_cast<size_t>(n - 1) * m + (m - 1)) * l + i) * 3;
        pts[idx] = 0.5;
        pts[idx + 1] = 1.0;
        pts[idx + 2] = 1.0;
    }
    return BSplineVolume(box.knots_u(), box.knots_v(), box.knots_w(), 3, std::move(pts));
}

std::vector<BSplineVolume> channel_blocks() {
    std::vector<BSplineVolume> blocks;
    blocks.push_back(from_grid(4, 3, 3, 2, [](double u, double v, double w) {
        return Vector3d(u, v, w);
    }));
    blocks.push_back(from_grid(4, 3, 3, 2, [](double u, double v, double w) {
        return Vector3d(1.0 + u, v, w);
    }));
    return blocks;
}

BSplineVolume concave_face_block() {
    return from_grid(5, 5, 3, 2, [](double u, double v, double w) {
        const double bump = std::sin(M_PI * u) * std::sin(M_PI * v);
        return Vector3d(u, v, w * (1.0 - 0.45 * bump));
    });
}

BSplineVolume identity_cube(int degree) {
    const int count = degree + 2;
    return from_grid(count, count, count, degree, [](double u, double v, double w) {
        return Vector3d(u, v, w);
    });
}

BSplineVolume linear_scalar(const BSplineVolume& geometry, int axis) {
    const KnotVector kvs[3] = {geometry.knots_u(), geometry.knots_v(), geometry.knots_w()};
    const auto g = greville(kvs[axis]);
    const int l = geometry.count_u(), m = geometry.count_v(), n = geometry.count_w();
    std::vector<double> pts(static_cast<size_t>(l) * m * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < l; ++i) {
                const int idx[3] = {i, j, k};
                pts[(static_cast<size_t>(k) * m + j) * l + i] = g[idx[axis]];
            }
    return BSplineVolume(kvs[0], kvs[1], kvs[2], 1, std::move(pts));
}

BSplineVolume shear_displacement(const BSplineVolume& geometry, double gamma) {
    const auto gw = greville(geometry.knots_w());
    const int l = geometry.count_u(), m = geometry.count_v(), n = geometry.count_w();
    std::vector<double> pts;
    pts.reserve(static_cast<size_t>(l) * m * n * 3);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < l; ++i) {
                (void)i;
                (void)j;
                pts.push_back(gamma * gw[k] * gw[k]);
                pts.push_back(0.0);
                pts.push_back(0.0);
            }
    return BSplineVolume(geometry.knots_u(), geometry.knots_v(), geometry.knots_w(), 3,
                         std::move(pts));
}

Camera frame_blocks(const std::vector<Block>& blocks, int width, int height, double fov_y_deg) {
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
    const Vector3d center = 0.5 * (lo + hi);
    const double radius = 0.5 * (hi - lo).norm();
    const double fov = fov_y_deg * M_PI / 180.0;
    const double distance = 1.25 * radius / std::tan(0.5 * fov);
    const Vector3d dir = Vector3d(0.55, -0.65, 0.45).normalized();
    return Camera(center + distance * dir, center, Vector3d(0, 0, 1), fov, width, height,
                  0.05 * distance);
}

Scene twisted_bar_scene(Method method, int width, int height) {
    Scene scene;
    Block block;
    block.id = 0;
    block.geometry = std::make_shared<BSplineVolume>(twisted_bar());
    block.field = FieldKind::Quality;
    scene.blocks.push_back(block);
    scene.camera = frame_blocks(scene.blocks, width, height);
    // Quality of the twisted bar stays in roughly [0.3, 0.6].
    scene.transfer = default_transfer(0.25, 0.62);
    scene.integrator.method = method;
    scene.integrator.c = method == Method::IRK1 ? 100.0 : 1.0;
    scene.audit = true;
    return scene;
}

Scene collapsed_edge_scene(Method method, int width, int height) {
    Scene scene;
    Block block;
    block.id = 0;
    block.geometry = std::make_shared<BSplineVolume>(collapsed_edge_block());
    block.scalar = std::make_shared<BSplineVolume>(linear_scalar(*block.geometry, 0));
    block.field = FieldKind::Rho;
    scene.blocks.push_back(block);
    scene.camera = frame_blocks(scene.blocks, width, height);
    scene.transfer = default_transfer(0.0, 1.0);
    scene.integrator.method = method;
    scene.integrator.c = method == Method::IRK1 ? 100.0 : 1.0;
    scene.audit = true;
    return scene;
}

Scene channel_scene(Method method, int width, int height) {
    Scene scene;
    auto volumes = channel_blocks();
    for (size_t i = 0; i < volumes.size(); ++i) {
        Block block;
        block.id = static_cast<int>(i);
        block.geometry = std::make_shared<BSplineVolume>(std::move(volumes[i]));
        block.scalar = std::make_shared<BSplineVolume>(linear_scalar(*block.geometry, 2));
        block.field = FieldKind::Rho;
        scene.blocks.push_back(std::move(block));
    }
    scene.camera = frame_blocks(scene.blocks, width, height);
    scene.transfer = default_transfer(0.0, 1.0);
    scene.integrator.method = method;
    scene.integrator.c = method == Method::IRK1 ? 100.0 : 1.0;
    scene.audit = true;
    return scene;
}

Scene concave_face_scene(Method method, int width, int height) {
    Scene scene;
    Block block;
    block.id = 0;
    block.geometry = std::make_shared<BSplineVolume>(concave_face_block());
    block.scalar = std::make_shared<BSplineVolume>(linear_scalar(*block.geometry, 1));
    block.field = FieldKind::Rho;
    scene.blocks.push_back(block);
    scene.camera = frame_blocks(scene.blocks, width, height);
    scene.transfer = default_transfer(0.0, 1.0);
    scene.integrator.method = method;
    scene.integrator.c = method == Method::IRK1 ? 100.0 : 1.0;
    scene.audit = true;
    return scene;
}

void write_all(const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const fs::path dir(directory);

    const BSplineVolume bar = twisted_bar();
    save_volume(bar, (dir / "twisted_bar.vol").string());
    const BSplineVolume edge = collapsed_edge_block();
    save_volume(edge, (dir / "collapsed_edge.vol").string());
    save_volume(linear_scalar(edge, 0), (dir / "collapsed_edge_rho.vol").string());
    const auto channel = channel_blocks();
    save_volume(channel[0], (dir / "channel_a.vol").string());
    save_volume(channel[1], (dir / "channel_b.vol").string());
    save_volume(linear_scalar(channel[0], 2), (dir / "channel_rho.vol").string());
    const BSplineVolume concave = concave_face_block();
    save_volume(concave, (dir / "concave.vol").string());
    save_volume(linear_scalar(concave, 1), (dir / "concave_rho.vol").string());
    save_volume(shear_displacement(bar, 0.2), (dir / "twisted_bar_shear.vol").string());

    struct Item {
        const char* name;
        Scene scene;
        std::vector<BlockPaths> paths;
    };
    std::vector<Item> items;
    items.push_back({"twisted_bar.scene.json", twisted_bar_scene(Method::RK4, 640, 480),
                     {{"twisted_bar.vol", "", ""}}});
    items.push_back({"collapsed_edge.scene.json", collapsed_edge_scene(Method::RF, 640, 480),
                     {{"collapsed_edge.vol", "collapsed_edge_rho.vol", ""}}});
    items.push_back({"channel.scene.json", channel_scene(Method::RK2, 640, 480),
                     {{"channel_a.vol", "channel_rho.vol", ""},
                      {"channel_b.vol", "channel_rho.vol", ""}}});
    items.push_back({"concave.scene.json", concave_face_scene(Method::RF, 640, 480),
                     {{"concave.vol", "concave_rho.vol", ""}}});
    for (auto& item : items) {
        SceneFile file;
        file.scene = std::move(item.scene);
        file.paths = item.paths;
        save_scene(file, (dir / item.name).string());
    }
}

} // namespace fixtures
} // namespace ivr
