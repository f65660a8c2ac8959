#pragma once

#include <string>

#include "ivr/scene.hpp"

namespace ivr {

/// Structured text exchange format for spline volumes: degrees, knot
/// vectors and a flat control-point list, one point per line, u fastest.
BSplineVolume load_volume(const std::string& path);
void save_volume(const BSplineVolume& volume, const std::string& path);

/// Source file references of a loaded block, kept for re-saving scenes.
struct BlockPaths {
    std::string volume;
    std::string scalar;
    std::string displacement;
};

struct SceneFile {
    Scene scene;
    std::vector<BlockPaths> paths;
};

/// Parses, resolves referenced volume files (relative to the scene file)
/// and validates. Errors name the offending field or file.
SceneFile load_scene(const std::string& path);
void save_scene(const SceneFile& file, const std::string& path);

/// One-line-per-setting echo of the resolved scene (defaults filled in).
std::string scene_summary(const Scene& scene);

} // namespace ivr
