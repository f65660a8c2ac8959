#pragma once

#include <string>
#include <vector>

#include "ivr/inversion.hpp"
#include "ivr/spline.hpp"

namespace ivr {

/// All sample parameter points of one segment traversal (entry included);
/// RF re-inverts each sample from the previous one, the ODE methods step.
std::vector<Vector3d> integrate_segment(const DiffMap3& map, const Vector3d& p_front,
                                        const Vector3d& p_back, const IntegratorSpec& spec);

/// Largest perpendicular deviation of the mapped samples from the ray line:
///   max_i || (g_front - phi(p_i)) - <g_front - phi(p_i), v_par> v_par ||_2
double segment_error_linf(const DiffMap3& map, const std::vector<Vector3d>& samples,
                          const RaySegment& segment);

struct ConvergenceRow {
    std::string label;
    IntegratorSpec spec;
    std::vector<double> errors;   // one per sample distance
    double observed_order = 0.0;  // mean over successive halvings (ODE methods)
};

struct ConvergenceTable {
    std::vector<double> ds;
    std::vector<ConvergenceRow> rows;
};

/// Table-style convergence study of the given methods on one segment.
/// RF rows are added per tolerance entry instead of using the frustum rule.
ConvergenceTable convergence_study(const DiffMap3& map, const Vector3d& p_front,
                                   const Vector3d& p_back, const std::vector<Method>& methods,
                                   const std::vector<double>& ds_list, double c_explicit,
                                   double c_implicit, const std::vector<double>& rf_tolerances);

/// Default sample distances of the study grid.
std::vector<double> default_convergence_ds();

/// Tab-separated rendering of the table with an order column.
std::string format_convergence_table(const ConvergenceTable& table);

} // namespace ivr
