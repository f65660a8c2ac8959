#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ivr/color.hpp"
#include "ivr/convergence.hpp"
#include "ivr/fixtures.hpp"
#include "ivr/maps.hpp"
#include "ivr/pipeline.hpp"
#include "ivr/sceneio.hpp"
#include "ivr/voxel.hpp"

namespace {

using namespace ivr;

void apply_overrides(Scene& scene, const std::string& method, double c, double ds, double tol,
                     int threads, bool audit) {
    if (!method.empty()) {
        scene.integrator.method = method_from_name(method);
        if (c < 0.0)
            scene.integrator.c = scene.integrator.method == Method::IRK1 ? 100.0 : 1.0;
    }
    if (c >= 0.0) scene.integrator.c = c;
    if (ds > 0.0) scene.integrator.ds = ds;
    if (tol > 0.0) scene.integrator.tolerance = tol;
    if (threads > 0) scene.threads = threads;
    if (audit) scene.audit = true;
}

std::string stats_text(const RenderStats& s) {
    std::ostringstream os;
    os << "max_delta_p " << s.max_delta_p << "\n";
    os << "samples " << s.samples << "\n";
    os << "depth_violations " << s.depth_violations << "\n";
    os << "delta_p_violations " << s.delta_p_violations << "\n";
    os << "flagged_pixels " << s.flagged_pixels << "\n";
    os << "records " << s.records << "\n";
    os << "pairs " << s.pairs << "\n";
    os << "degenerate_entries " << s.degenerate_entries << "\n";
    os << "boundary_walks " << s.boundary_walks << "\n";
    os << "triangles " << s.tess_triangles << "\n";
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"software volume renderer for trivariate B-spline models"};
    app.require_subcommand(1);

    std::string scene_path, out_path, diag_path, stats_path, grid_path, method;
    double c = -1.0, ds = 0.0, tol = 0.0;
    int threads = 0;
    bool audit = false;
    long max_flagged = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scene", scene_path, "scene file")->required();
        cmd->add_option("--method", method, "integrator: rf|rk1|irk1|rk2|rk3|rk4|rk4-38|rkf5");
        cmd->add_option("--c", c, "perpendicular velocity weight");
        cmd->add_option("--ds", ds, "sample distance");
        cmd->add_option("--tol", tol, "root-finding tolerance");
        cmd->add_option("--threads", threads, "worker threads (0: all cores)");
    };

    CLI::App* render = app.add_subcommand("render", "render a scene");
    add_common(render);
    render->add_option("--out", out_path, "output image (.ppm / .ppm.gz)")->required();
    render->add_option("--diag", diag_path, "diagnostic flags image");
    render->add_option("--stats", stats_path, "write audit stats to file");
    render->add_flag("--audit", audit, "enable per-sample accuracy audits");
    render->add_option("--max-flagged", max_flagged, "exit nonzero above this flagged-pixel count");

    CLI::App* voxelize_cmd = app.add_subcommand("voxelize", "resample a scene onto a voxel grid");
    voxelize_cmd->add_option("--scene", scene_path, "scene file")->required();
    int res = 64;
    voxelize_cmd->add_option("--res", res, "grid resolution per axis")->required();
    voxelize_cmd->add_option("--out", out_path, "output grid file")->required();

    CLI::App* render_voxel_cmd = app.add_subcommand("render-voxel", "ray march a voxel grid");
    add_common(render_voxel_cmd);
    render_voxel_cmd->add_option("--grid", grid_path, "grid file")->required();
    render_voxel_cmd->add_option("--out", out_path, "output image")->required();

    CLI::App* compare = app.add_subcommand("compare", "CIEDE2000 image comparison");
    std::string path_a, path_b, heatmap_path;
    compare->add_option("--a", path_a, "first image")->required();
    compare->add_option("--b", path_b, "second image")->required();
    compare->add_option("--heatmap", heatmap_path, "banded difference image");

    CLI::App* converge = app.add_subcommand("converge", "segment-inversion convergence study");
    std::string map_name = "ripple";
    std::vector<std::string> method_list;
    std::vector<double> ds_list, tol_list;
    double c_explicit = 1.0, c_implicit = 100.0;
    std::vector<double> front{0.0, 0.3, 0.5}, back{1.0, 0.7, 0.5};
    converge->add_option("--map", map_name, "analytic map name");
    converge->add_option("--methods", method_list, "methods to run");
    converge->add_option("--ds", ds_list, "sample distances");
    converge->add_option("--c", c_explicit, "c for explicit methods");
    converge->add_option("--cimp", c_implicit, "c for implicit Euler");
    converge->add_option("--tol", tol_list, "RF tolerances");
    converge->add_option("--front", front, "entry parameter point")->expected(3);
    converge->add_option("--back", back, "exit parameter point")->expected(3);
    converge->add_option("--out", out_path, "write the table to a file");

    CLI::App* tessdump = app.add_subcommand("tessdump", "dump the view tessellation");
    tessdump->add_option("--scene", scene_path, "scene file")->required();
    tessdump->add_option("--out", out_path, "indexed triangle text file")->required();

    CLI::App* gen = app.add_subcommand("gen", "write the synthetic fixture models and scenes");
    std::string dir = "fixtures";
    gen->add_option("--dir", dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed()) {
            Scene scene = load_scene(scene_path).scene;
            apply_overrides(scene, method, c, ds, tol, threads, audit);
            std::cout << scene_summary(scene);
            const RenderOutput out = ivr::render(scene);
            write_image(out.color, out_path);
            if (!diag_path.empty()) write_image(out.diagnostics, diag_path);
            const std::string text = stats_text(out.stats);
            std::cout << text;
            if (!stats_path.empty()) {
                std::ofstream f(stats_path);
                f << text;
            }
            if (out.stats.flagged_pixels > max_flagged) {
                std::cerr << "flagged pixels exceed threshold (" << out.stats.flagged_pixels
                          << " > " << max_flagged << ")\n";
                return 2;
            }
        } else if (voxelize_cmd->parsed()) {
            Scene scene = load_scene(scene_path).scene;
            const VoxelGrid grid = voxelize(scene.blocks, Eigen::Vector3i::Constant(res));
            save_grid(grid, out_path);
            size_t inside = 0;
            for (double v : grid.inside) inside += v > 0.5;
            std::cout << "voxels " << grid.value.size() << "\ninside " << inside << "\n";
        } else if (render_voxel_cmd->parsed()) {
            Scene scene = load_scene(scene_path).scene;
            apply_overrides(scene, method, c, ds, tol, threads, audit);
            const VoxelGrid grid = load_grid(grid_path);
            write_image(render_voxel(scene, grid), out_path);
        } else if (compare->parsed()) {
            Image heatmap;
            const ImageDeltaStats stats =
                compare_images(read_image(path_a), read_image(path_b),
                               heatmap_path.empty() ? nullptr : &heatmap);
            if (!heatmap_path.empty()) write_image(heatmap, heatmap_path);
            std::cout << "max_delta_e " << stats.max << "\nmean_delta_e " << stats.mean
                      << "\nvar_delta_e " << stats.variance << "\n";
        } else if (converge->parsed()) {
            if (ds_list.empty()) ds_list = default_convergence_ds();
            if (tol_list.empty()) tol_list = {1e-3, 1e-14};
            std::vector<Method> methods;
            if (method_list.empty()) {
                methods = {Method::RK1, Method::IRK1, Method::RK2,    Method::RK3,
                           Method::RK4, Method::RK4_38, Method::RKF5, Method::RF};
            } else {
                for (const auto& name : method_list) methods.push_back(method_from_name(name));
            }
            const auto map = find_analytic_map(map_name);
            const ConvergenceTable table = convergence_study(
                *map, Vector3d(front[0], front[1], front[2]), Vector3d(back[0], back[1], back[2]),
                methods, ds_list, c_explicit, c_implicit, tol_list);
            const std::string text = format_convergence_table(table);
            std::cout << text;
            if (!out_path.empty()) {
                std::ofstream f(out_path);
                f << text;
            }
        } else if (tessdump->parsed()) {
            Scene scene = load_scene(scene_path).scene;
            const TriangleBVH bvh = build_surface_bvh(scene);
            std::ofstream f(out_path);
            if (!f) throw std::runtime_error("cannot open for writing: " + out_path);
            f.precision(17);
            for (const SurfaceTriangle& tri : bvh.triangles())
                for (int i = 0; i < 3; ++i)
                    f << "v " << tri.g[i][0] << " " << tri.g[i][1] << " " << tri.g[i][2] << "\n";
            for (size_t t = 0; t < bvh.triangles().size(); ++t)
                f << "f " << 3 * t + 1 << " " << 3 * t + 2 << " " << 3 * t + 3 << "\n";
            std::cout << "triangles " << bvh.triangles().size() << "\n";
        } else if (gen->parsed()) {
            fixtures::write_all(dir);
            std::cout << "fixtures written to " << dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
