#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ivr/spline.hpp"

namespace ivr {

/// Closed-form differentiable map with hand-written Jacobian and Hessian.
/// 2D maps are embedded as (x,y,z) -> (f1(x,y), f2(x,y), z).
class AnalyticMap final : public DiffMap3 {
public:
    using EvalFn = std::function<void(const Vector3d&, int, MapJet&)>;

    AnalyticMap(std::string name, EvalFn fn);

    const std::string& name() const { return name_; }
    void eval(const Vector3d& p, int order, MapJet& out) const override { fn_(p, order, out); }

    /// Cross-checks the stated derivatives against central finite
    /// differences at a few interior points; throws on disagreement.
    void self_test() const;

private:
    std::string name_;
    EvalFn fn_;
};

/// Named registry of the built-in analytic test maps:
///   identity    - p
///   sine-shear  - (x, 0.3 sin(2 pi x) + y, z)
///   ripple      - (2x, y + 0.3 (1-x) sin(10 pi x), z)
std::shared_ptr<const AnalyticMap> find_analytic_map(const std::string& name);
std::vector<std::string> analytic_map_names();

} // namespace ivr
