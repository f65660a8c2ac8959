#pragma once

#include "ivr/image.hpp"

namespace ivr {

/// sRGB components in [0,1] to CIELAB (D65 white).
Eigen::Vector3d srgb_to_lab(const Eigen::Vector3d& rgb);

/// CIEDE2000 color difference between two Lab triples.
double ciede2000_lab(const Eigen::Vector3d& lab_a, const Eigen::Vector3d& lab_b);

/// CIEDE2000 between two sRGB colors in [0,1].
double delta_e_ciede2000(const Eigen::Vector3d& rgb_a, const Eigen::Vector3d& rgb_b);

struct ImageDeltaStats {
    double max = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Per-pixel CIEDE2000 statistics plus the banded heatmap: grey <= 1,
/// blue <= 5, green <= 10, red above. Throws on dimension mismatch.
ImageDeltaStats compare_images(const Image& a, const Image& b, Image* heatmap = nullptr,
                               std::vector<double>* per_pixel = nullptr);

} // namespace ivr
