#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ivr/camera.hpp"
#include "ivr/fields.hpp"
#include "ivr/inversion.hpp"
#include "ivr/spline.hpp"
#include "ivr/transfer.hpp"

namespace ivr {

/// One volume block: geometry spline, scalar-field source and optional
/// displacement spline, all over the same unit parameter cube.
struct Block {
    int id = 0;
    std::shared_ptr<const BSplineVolume> geometry;      // d = 3
    std::shared_ptr<const BSplineVolume> scalar;        // d = 1, FieldKind::Rho
    std::shared_ptr<const BSplineVolume> displacement;  // d = 3, FieldKind::VonMises
    FieldKind field = FieldKind::Rho;

    void validate() const;
};

struct CutPlane {
    Vector3d point = Vector3d::Zero();
    Vector3d normal = Vector3d::UnitZ();
};

struct Background {
    Vector3d color = Vector3d::Zero();
    bool checkerboard = false;
    Vector3d checker_color = Vector3d::Constant(0.35);
    int checker_size = 12;

    Vector3d at(int px, int py) const {
        if (!checkerboard) return color;
        const bool odd = ((px / checker_size) + (py / checker_size)) % 2 != 0;
        return odd ? checker_color : color;
    }
};

struct Scene {
    Camera camera;
    std::vector<Block> blocks;
    TransferFunction transfer;
    double xi = 0.0; // reference length for opacity; 0 resolves to diag/512
    std::vector<CutPlane> cut_planes;
    IntegratorSpec integrator;
    Background background;
    bool audit = false;
    int threads = 0; // 0: hardware concurrency
    int max_substeps = 256;

    /// Diagonal of the union of all block control hulls.
    double bounding_diagonal() const;
    /// Resolved defaults: ds (method-dependent), xi, c.
    double resolved_ds() const;
    double resolved_xi() const;
    void validate() const;
};

/// Method-specific default sample distance as a fraction of the scene
/// diagonal; first-order methods need denser sampling to stay pixel
/// accurate.
double default_ds_fraction(Method m);

} // namespace ivr
