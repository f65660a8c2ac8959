#include "ivr/color.hpp"

#include <cmath>
#include <stdexcept>

namespace ivr {

namespace {

double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t)
                                     : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

} // namespace

Eigen::Vector3d srgb_to_lab(const Eigen::Vector3d& rgb) {
    const double r = srgb_to_linear(rgb[0]);
    const double g = srgb_to_linear(rgb[1]);
    const double b = srgb_to_linear(rgb[2]);
    // sRGB D65 primaries.
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double xn = 0.95047, yn = 1.0, zn = 1.08883;
    const double fx = lab_f(x / xn), fy = lab_f(y / yn), fz = lab_f(z / zn);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double ciede2000_lab(const Eigen::Vector3d& lab1, const Eigen::Vector3d& lab2) {
    const double l1 = lab1[0], a1 = lab1[1], b1 = lab1[2];
    const double l2 = lab2[0], a2 = lab2[1], b2 = lab2[2];

    const double c1 = std::hypot(a1, b1);
    const double c2 = std::hypot(a2, b2);
    const double c_bar = 0.5 * (c1 + c2);
    const double c_bar7 = std::pow(c_bar, 7.0);
    const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + std::pow(25.0, 7.0))));

    const double ap1 = (1.0 + g) * a1;
    const double ap2 = (1.0 + g) * a2;
    const double cp1 = std::hypot(ap1, b1);
    const double cp2 = std::hypot(ap2, b2);

    auto hue = [](double ap, double b) {
        if (ap == 0.0 && b == 0.0) return 0.0;
        double h = rad2deg(std::atan2(b, ap));
        return h < 0.0 ? h + 360.0 : h;
    };
    const double hp1 = hue(ap1, b1);
    const double hp2 = hue(ap2, b2);

    const double dl = l2 - l1;
    const double dc = cp2 - cp1;
    double dhp;
    if (cp1 * cp2 == 0.0) {
        dhp = 0.0;
    } else {
        dhp = hp2 - hp1;
        if (dhp > 180.0) dhp -= 360.0;
        else if (dhp < -180.0) dhp += 360.0;
    }
    const double dh = 2.0 * std::sqrt(cp1 * cp2) * std::sin(deg2rad(dhp) / 2.0);

    const double l_bar = 0.5 * (l1 + l2);
    const double cp_bar = 0.5 * (cp1 + cp2);
    double hp_bar;
    if (cp1 * cp2 == 0.0) {
        hp_bar = hp1 + hp2;
    } else {
        hp_bar = 0.5 * (hp1 + hp2);
        if (std::abs(hp1 - hp2) > 180.0) hp_bar += hp1 + hp2 < 360.0 ? 180.0 : -180.0;
    }

    const double t = 1.0 - 0.17 * std::cos(deg2rad(hp_bar - 30.0)) +
                     0.24 * std::cos(deg2rad(2.0 * hp_bar)) +
                     0.32 * std::cos(deg2rad(3.0 * hp_bar + 6.0)) -
                     0.20 * std::cos(deg2rad(4.0 * hp_bar - 63.0));
    const double dtheta = 30.0 * std::exp(-std::pow((hp_bar - 275.0) / 25.0, 2.0));
    const double cp_bar7 = std::pow(cp_bar, 7.0);
    const double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + std::pow(25.0, 7.0)));
    const double lm50 = (l_bar - 50.0) * (l_bar - 50.0);
    const double sl = 1.0 + 0.015 * lm50 / std::sqrt(20.0 + lm50);
    const double sc = 1.0 + 0.045 * cp_bar;
    const double sh = 1.0 + 0.015 * cp_bar * t;
    const double rt = -std::sin(deg2rad(2.0 * dtheta)) * rc;

    const double tl = dl / sl;
    const double tc = dc / sc;
    const double th = dh / sh;
    return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

double delta_e_ciede2000(const Eigen::Vector3d& rgb_a, const Eigen::Vector3d& rgb_b) {
    return ciede2000_lab(srgb_to_lab(rgb_a), srgb_to_lab(rgb_b));
}

ImageDeltaStats compare_images(const Image& a, const Image& b, Image* heatmap,
                               std::vector<double>* per_pixel) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("compare_images: dimension mismatch");
    ImageDeltaStats stats;
    if (heatmap) *heatmap = Image(a.width(), a.height());
    if (per_pixel) per_pixel->assign(static_cast<size_t>(a.width()) * a.height(), 0.0);
    double sum = 0.0, sum_sq = 0.0;
    const double n = static_cast<double>(a.width()) * a.height();
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            const double de = delta_e_ciede2000(a.get(x, y), b.get(x, y));
            stats.max = std::max(stats.max, de);
            sum += de;
            sum_sq += de * de;
            if (per_pixel) (*per_pixel)[static_cast<size_t>(y) * a.width() + x] = de;
            if (heatmap) {
                Eigen::Vector3d c;
                if (de <= 1.0) c = {0.5, 0.5, 0.5};
                else if (de <= 5.0) c = {0.0, 0.0, 1.0};
                else if (de <= 10.0) c = {0.0, 1.0, 0.0};
                else c = {1.0, 0.0, 0.0};
                heatmap->set(x, y, c);
            }
        }
    }
    stats.mean = sum / n;
    stats.variance = sum_sq / n - stats.mean * stats.mean;
    return stats;
}

} // namespace ivr
