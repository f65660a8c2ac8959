#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ivr {

using Eigen::Vector3d;

struct TransferNode {
    double value = 0.0;
    Vector3d color = Vector3d::Zero(); // rgb in [0,1]
    double alpha = 0.0;                // opacity per reference length
};

/// Piecewise-linear transfer function over strictly increasing node values;
/// queries outside the range clamp to the end nodes.
class TransferFunction {
public:
    TransferFunction() = default;
    explicit TransferFunction(std::vector<TransferNode> nodes);

    const std::vector<TransferNode>& nodes() const { return nodes_; }

    void sample(double value, Vector3d& color, double& alpha) const;

    /// Substep count that resolves the node structure crossed by a value
    /// ramp from v0 to v1: roughly one substep per smallest node interval
    /// overlapped, at least one per crossed node, capped.
    int substeps_hint(double v0, double v1, int cap = 256) const;

private:
    std::vector<TransferNode> nodes_;
};

struct CompositeState {
    Vector3d color = Vector3d::Zero(); // alpha-premultiplied accumulation
    double alpha = 0.0;

    bool saturated() const { return alpha > 0.999; }
};

/// One front-to-back compositing step over a ray piece of length ds:
///   T      = (1 - a_src)^(ds/xi)
///   C_dst += (1 - T)(1 - a_dst) C_src
///   a_dst += (1 - T)(1 - a_dst)
void composite_step(CompositeState& state, const Vector3d& c_src, double a_src, double ds,
                    double xi);

/// Dense quadrature between two field samples assuming the field is linear
/// in between: m compositing substeps of length ds/m at interpolated values.
void supersample_segment(const TransferFunction& tf, double rho_prev, double rho_cur, double ds,
                         int substeps, double xi, CompositeState& state);

} // namespace ivr
