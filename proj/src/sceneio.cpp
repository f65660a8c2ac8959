#include "ivr/sceneio.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ivr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> read_doubles(std::istream& in, size_t count, const std::string& what,
                                 const std::string& path) {
    std::vector<double> out(count);
    for (size_t i = 0; i < count; ++i)
        if (!(in >> out[i]))
            throw std::runtime_error(path + ": truncated " + what);
    return out;
}

} // namespace

BSplineVolume load_volume(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open volume file: " + path);
    std::string token;
    in >> token;
    if (token != "ivr-volume") throw std::runtime_error(path + ": not a volume file");
    int version;
    in >> version;
    if (version != 1) throw std::runtime_error(path + ": unsupported version");

    int deg[3] = {-1, -1, -1}, dim = 0, counts[3] = {0, 0, 0};
    std::vector<double> knots[3];
    std::vector<double> points;
    while (in >> token) {
        if (token == "degrees") {
            in >> deg[0] >> deg[1] >> deg[2];
        } else if (token == "dim") {
            in >> dim;
        } else if (token == "counts") {
            in >> counts[0] >> counts[1] >> counts[2];
        } else if (token == "knots_u" || token == "knots_v" || token == "knots_w") {
            const int a = token[6] - 'u';
            if (deg[a] < 0 || counts[a] <= 0)
                throw std::runtime_error(path + ": " + token + " before degrees/counts");
            knots[a] = read_doubles(in, counts[a] + deg[a] + 1, token, path);
        } else if (token == "points") {
            if (dim <= 0 || counts[0] <= 0)
                throw std::runtime_error(path + ": points before dim/counts");
            points = read_doubles(
                in, static_cast<size_t>(counts[0]) * counts[1] * counts[2] * dim, "points", path);
            break;
        } else {
            throw std::runtime_error(path + ": unknown field '" + token + "'");
        }
    }
    try {
        return BSplineVolume(KnotVector(knots[0], deg[0]), KnotVector(knots[1], deg[1]),
                             KnotVector(knots[2], deg[2]), dim, std::move(points));
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_volume(const BSplineVolume& volume, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "ivr-volume 1\n";
    out << "degrees " << volume.knots_u().degree() << " " << volume.knots_v().degree() << " "
        << volume.knots_w().degree() << "\n";
    out << "dim " << volume.dim() << "\n";
    out << "counts " << volume.count_u() << " " << volume.count_v() << " " << volume.count_w()
        << "\n";
    const KnotVector* kvs[3] = {&volume.knots_u(), &volume.knots_v(), &volume.knots_w()};
    const char* names[3] = {"knots_u", "knots_v", "knots_w"};
    for (int a = 0; a < 3; ++a) {
        out << names[a];
        for (double k : kvs[a]->knots()) out << " " << k;
        out << "\n";
    }
    out << "points\n";
    const auto& pts = volume.control_points();
    for (size_t i = 0; i < pts.size(); i += volume.dim()) {
        for (int c = 0; c < volume.dim(); ++c) out << (c ? " " : "") << pts[i + c];
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

Vector3d parse_vec3(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3)
        throw std::runtime_error(field + ": expected an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const json& require(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw std::runtime_error(where + "." + key + ": missing");
    return *it;
}

FieldKind parse_field(const std::string& s, const std::string& where) {
    if (s == "rho") return FieldKind::Rho;
    if (s == "quality") return FieldKind::Quality;
    if (s == "vonmises") return FieldKind::VonMises;
    throw std::runtime_error(where + ".field: expected rho|quality|vonmises, got '" + s + "'");
}

} // namespace

SceneFile load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": JSON parse error: " + e.what());
    }
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& rel) { return (base / rel).string(); };

    SceneFile file;
    Scene& scene = file.scene;

    const json& cam = require(j, "camera", "scene");
    scene.camera = Camera(parse_vec3(require(cam, "eye", "camera"), "camera.eye"),
                          parse_vec3(require(cam, "look_at", "camera"), "camera.look_at"),
                          parse_vec3(cam.value("up", json::array({0.0, 0.0, 1.0})), "camera.up"),
                          require(cam, "fov_y_deg", "camera").get<double>() * M_PI / 180.0,
                          require(cam, "width", "camera").get<int>(),
                          require(cam, "height", "camera").get<int>(), cam.value("near", 1e-2));

    int next_id = 0;
    for (const json& jb : j.value("blocks", json::array())) {
        const std::string where = "blocks[" + std::to_string(next_id) + "]";
        Block block;
        BlockPaths paths;
        block.id = next_id++;
        paths.volume = require(jb, "volume", where).get<std::string>();
        block.geometry = std::make_shared<BSplineVolume>(load_volume(resolve(paths.volume)));
        block.field = parse_field(jb.value("field", "rho"), where);
        if (jb.contains("scalar")) {
            paths.scalar = jb["scalar"].get<std::string>();
            block.scalar = std::make_shared<BSplineVolume>(load_volume(resolve(paths.scalar)));
        }
        if (jb.contains("displacement")) {
            paths.displacement = jb["displacement"].get<std::string>();
            block.displacement =
                std::make_shared<BSplineVolume>(load_volume(resolve(paths.displacement)));
        }
        scene.blocks.push_back(std::move(block));
        file.paths.push_back(std::move(paths));
    }

    const json& tf = require(j, "transfer", "scene");
    std::vector<TransferNode> nodes;
    for (const json& jn : require(tf, "nodes", "transfer")) {
        TransferNode n;
        n.value = require(jn, "value", "transfer.nodes[]").get<double>();
        n.color = parse_vec3(require(jn, "color", "transfer.nodes[]"), "transfer.nodes[].color");
        n.alpha = require(jn, "alpha", "transfer.nodes[]").get<double>();
        nodes.push_back(n);
    }
    try {
        scene.transfer = TransferFunction(std::move(nodes));
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": transfer: " + e.what());
    }
    scene.xi = tf.value("xi", 0.0);

    for (const json& jp : j.value("cut_planes", json::array())) {
        CutPlane plane;
        plane.point = parse_vec3(require(jp, "point", "cut_planes[]"), "cut_planes[].point");
        plane.normal = parse_vec3(require(jp, "normal", "cut_planes[]"), "cut_planes[].normal");
        scene.cut_planes.push_back(plane);
    }

    if (j.contains("integrator")) {
        const json& ji = j["integrator"];
        scene.integrator.method = method_from_name(ji.value("method", "rk4"));
        scene.integrator.c =
            ji.value("c", scene.integrator.method == Method::IRK1 ? 100.0 : 1.0);
        scene.integrator.ds = ji.value("ds", 0.0);
        scene.integrator.tolerance = ji.value("tol", 0.0);
    } else {
        scene.integrator.c = 1.0;
    }

    if (j.contains("background")) {
        const json& jb = j["background"];
        if (jb.contains("color")) scene.background.color = parse_vec3(jb["color"], "background.color");
        scene.background.checkerboard = jb.value("checkerboard", false);
    }
    scene.audit = j.value("audit", false);
    scene.max_substeps = j.value("max_substeps", 256);
    scene.threads = j.value("threads", 0);

    try {
        scene.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return file;
}

void save_scene(const SceneFile& file, const std::string& path) {
    const Scene& scene = file.scene;
    json j;
    const Camera& cam = scene.camera;
    const Vector3d look_at = cam.eye() + cam.forward();
    j["camera"] = {{"eye", {cam.eye()[0], cam.eye()[1], cam.eye()[2]}},
                   {"look_at", {look_at[0], look_at[1], look_at[2]}},
                   {"fov_y_deg", cam.fov_y() * 180.0 / M_PI},
                   {"width", cam.width()},
                   {"height", cam.height()},
                   {"near", cam.near_distance()}};
    j["blocks"] = json::array();
    for (size_t i = 0; i < scene.blocks.size(); ++i) {
        json jb;
        jb["volume"] = file.paths[i].volume;
        switch (scene.blocks[i].field) {
            case FieldKind::Rho: jb["field"] = "rho"; break;
            case FieldKind::Quality: jb["field"] = "quality"; break;
            case FieldKind::VonMises: jb["field"] = "vonmises"; break;
        }
        if (!file.paths[i].scalar.empty()) jb["scalar"] = file.paths[i].scalar;
        if (!file.paths[i].displacement.empty()) jb["displacement"] = file.paths[i].displacement;
        j["blocks"].push_back(jb);
    }

    json nodes = json::array();
    for (const TransferNode& n : scene.transfer.nodes())
        nodes.push_back({{"value", n.value},
                         {"color", {n.color[0], n.color[1], n.color[2]}},
                         {"alpha", n.alpha}});
    j["transfer"] = {{"nodes", nodes}};
    if (scene.xi > 0.0) j["transfer"]["xi"] = scene.xi;

    if (!scene.cut_planes.empty()) {
        j["cut_planes"] = json::array();
        for (const CutPlane& p : scene.cut_planes)
            j["cut_planes"].push_back({{"point", {p.point[0], p.point[1], p.point[2]}},
                                       {"normal", {p.normal[0], p.normal[1], p.normal[2]}}});
    }

    j["integrator"] = {{"method", method_name(scene.integrator.method)},
                       {"c", scene.integrator.c}};
    if (scene.integrator.ds > 0.0) j["integrator"]["ds"] = scene.integrator.ds;
    if (scene.integrator.tolerance > 0.0) j["integrator"]["tol"] = scene.integrator.tolerance;

    j["background"] = {{"color", {scene.background.color[0], scene.background.color[1],
                                  scene.background.color[2]}},
                       {"checkerboard", scene.background.checkerboard}};
    j["audit"] = scene.audit;
    j["max_substeps"] = scene.max_substeps;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

std::string scene_summary(const Scene& scene) {
    std::ostringstream os;
    os << "camera: " << scene.camera.width() << "x" << scene.camera.height() << "\n";
    os << "blocks: " << scene.blocks.size() << "\n";
    os << "method: " << method_name(scene.integrator.method) << "\n";
    os << "c: " << scene.integrator.c << "\n";
    os << "ds: " << scene.resolved_ds() << (scene.integrator.ds > 0 ? "" : " (default)") << "\n";
    os << "xi: " << scene.resolved_xi() << (scene.xi > 0 ? "" : " (default)") << "\n";
    if (scene.integrator.method == Method::RF)
        os << "tol: "
           << (scene.integrator.tolerance > 0 ? std::to_string(scene.integrator.tolerance)
                                              : std::string("pixel frustum"))
           << "\n";
    os << "cut_planes: " << scene.cut_planes.size() << "\n";
    os << "audit: " << (scene.audit ? "on" : "off") << "\n";
    return os.str();
}

} // namespace ivr
