#pragma once

#include "ivr/image.hpp"
#include "ivr/scene.hpp"

namespace ivr {

/// Regular resampling of an isogeometric model: per-voxel field value plus
/// an inside/outside flag, both trilinearly interpolated when sampled.
struct VoxelGrid {
    Eigen::Vector3i res = Eigen::Vector3i::Zero();
    Vector3d lo = Vector3d::Zero();
    Vector3d hi = Vector3d::Ones();
    std::vector<double> value;
    std::vector<double> inside;

    size_t index(int i, int j, int k) const {
        return (static_cast<size_t>(k) * res[1] + j) * res[0] + i;
    }
    Vector3d center(int i, int j, int k) const;
    double sample_value(const Vector3d& g) const { return trilinear(g, value); }
    double sample_inside(const Vector3d& g) const { return trilinear(g, inside); }

private:
    double trilinear(const Vector3d& g, const std::vector<double>& field) const;
};

/// Evaluates every voxel center by Newton inversion seeded from a coarse
/// parameter grid; voxels outside every block are flagged.
VoxelGrid voxelize(const std::vector<Block>& blocks, const Eigen::Vector3i& res);

/// Classic ray marching of a voxel grid with the same compositing as the
/// direct renderer; samples with interpolated inside < 0.5 are skipped.
Image render_voxel(const Scene& scene, const VoxelGrid& grid);

/// Structured text persistence of a grid.
void save_grid(const VoxelGrid& grid, const std::string& path);
VoxelGrid load_grid(const std::string& path);

} // namespace ivr
