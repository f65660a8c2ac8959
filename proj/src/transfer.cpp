#include "ivr/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ivr {

TransferFunction::TransferFunction(std::vector<TransferNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("transfer function: no nodes");
    for (size_t i = 0; i + 1 < nodes_.size(); ++i)
        if (!(nodes_[i].value < nodes_[i + 1].value))
            throw std::invalid_argument("transfer function: node values must strictly increase");
    for (const auto& n : nodes_)
        if (n.alpha < 0.0 || n.alpha > 1.0)
            throw std::invalid_argument("transfer function: alpha outside [0,1]");
}

void TransferFunction::sample(double value, Vector3d& color, double& alpha) const {
    if (value <= nodes_.front().value) {
        color = nodes_.front().color;
        alpha = nodes_.front().alpha;
        return;
    }
    if (value >= nodes_.back().value) {
        color = nodes_.back().color;
        alpha = nodes_.back().alpha;
        return;
    }
    const auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), value,
                                     [](double v, const TransferNode& n) { return v < n.value; });
    const auto lo = hi - 1;
    const double t = (value - lo->value) / (hi->value - lo->value);
    color = (1.0 - t) * lo->color + t * hi->color;
    alpha = (1.0 - t) * lo->alpha + t * hi->alpha;
}

int TransferFunction::substeps_hint(double v0, double v1, int cap) const {
    const double lo = std::min(v0, v1), hi = std::max(v0, v1);
    const double span = hi - lo;
    if (span <= 0.0) return 1;
    // Smallest node interval overlapping (lo, hi) sets the resolution.
    double gap = span;
    int crossed = 0;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].value > lo && nodes_[i].value < hi) ++crossed;
        if (i + 1 < nodes_.size()) {
            const double a = std::max(lo, nodes_[i].value);
            const double b = std::min(hi, nodes_[i + 1].value);
            if (b > a) gap = std::min(gap, nodes_[i + 1].value - nodes_[i].value);
        }
    }
    if (crossed == 0) return 1;
    const int m = static_cast<int>(std::ceil(span / gap));
    return std::clamp(m, crossed + 1, cap);
}

void composite_step(CompositeState& state, const Vector3d& c_src, double a_src, double ds,
                    double xi) {
    const double t = std::pow(1.0 - a_src, ds / xi);
    const double weight = (1.0 - t) * (1.0 - state.alpha);
    state.color += weight * c_src;
    state.alpha += weight;
}

void supersample_segment(const TransferFunction& tf, double rho_prev, double rho_cur, double ds,
                         int substeps, double xi, CompositeState& state) {
    const int m = std::max(1, substeps);
    const double h = ds / m;
    Vector3d color;
    double alpha;
    for (int k = 0; k < m; ++k) {
        const double frac = (k + 0.5) / m;
        const double value = rho_prev + frac * (rho_cur - rho_prev);
        tf.sample(value, color, alpha);
        composite_step(state, color, alpha, h, xi);
        if (state.saturated()) return;
    }
}

} // namespace ivr
