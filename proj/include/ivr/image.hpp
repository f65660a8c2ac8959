#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ivr {

/// 8-bit RGB image, row-major from the top-left corner.
class Image {
public:
    Image() = default;
    Image(int width, int height) : width_(width), height_(height), data_(3u * width * height, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    void set(int x, int y, const Eigen::Vector3d& rgb);
    Eigen::Vector3d get(int x, int y) const; // components in [0,1]

    bool operator==(const Image& other) const = default;

private:
    int width_ = 0, height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Binary portable pixmap (P6, 8-bit). Paths ending in ".gz" are read and
/// written gzip-compressed; round trips are bit exact either way.
void write_image(const Image& image, const std::string& path);
Image read_image(const std::string& path);

} // namespace ivr
