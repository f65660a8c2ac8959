#include "ivr/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

namespace ivr {

namespace {

std::uint8_t quantize(double v) {
    const double clamped = std::min(1.0, std::max(0.0, v));
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

void Image::set(int x, int y, const Eigen::Vector3d& rgb) {
    const size_t i = 3u * (static_cast<size_t>(y) * width_ + x);
    data_[i] = quantize(rgb[0]);
    data_[i + 1] = quantize(rgb[1]);
    data_[i + 2] = quantize(rgb[2]);
}

Eigen::Vector3d Image::get(int x, int y) const {
    const size_t i = 3u * (static_cast<size_t>(y) * width_ + x);
    return {data_[i] / 255.0, data_[i + 1] / 255.0, data_[i + 2] / 255.0};
}

void write_image(const Image& image, const std::string& path) {
    std::ostringstream header;
    header << "P6\n" << image.width() << " " << image.height() << "\n255\n";
    const std::string head = header.str();
    if (has_suffix(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "wb");
        if (!f) throw std::runtime_error("cannot open for writing: " + path);
        gzwrite(f, head.data(), static_cast<unsigned>(head.size()));
        gzwrite(f, image.data().data(), static_cast<unsigned>(image.data().size()));
        gzclose(f);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(head.data(), static_cast<std::streamsize>(head.size()));
    f.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.data().size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

Image read_image(const std::string& path) {
    std::string bytes;
    if (has_suffix(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "rb");
        if (!f) throw std::runtime_error("cannot open: " + path);
        char buf[1 << 16];
        int n;
        while ((n = gzread(f, buf, sizeof buf)) > 0) bytes.append(buf, n);
        gzclose(f);
    } else {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open: " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        bytes = ss.str();
    }
    std::istringstream in(bytes);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("not an 8-bit P6 pixmap: " + path);
    in.get(); // single whitespace after the header
    Image image(w, h);
    in.read(reinterpret_cast<char*>(image.data().data()),
            static_cast<std::streamsize>(image.data().size()));
    if (in.gcount() != static_cast<std::streamsize>(image.data().size()))
        throw std::runtime_error("truncated pixmap: " + path);
    return image;
}

} // namespace ivr
