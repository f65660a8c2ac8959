#include "ivr/convergence.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ivr {

std::vector<Vector3d> integrate_segment(const DiffMap3& map, const Vector3d& p_front,
                                        const Vector3d& p_back, const IntegratorSpec& spec) {
    const RaySegment seg = RaySegment::between(map.value(p_front), map.value(p_back));
    const SegmentField field(seg, spec.c);
    if (!(spec.ds > 0.0)) throw std::invalid_argument("integrate_segment: ds must be positive");

    std::vector<Vector3d> samples;
    samples.push_back(p_front);
    Vector3d p = p_front;
    const int steps = std::max(1, static_cast<int>(std::ceil(seg.length / spec.ds)));
    double s = 0.0;
    for (int i = 1; i <= steps; ++i) {
        const double s_next = std::min(seg.length, i * spec.ds);
        const double h = s_next - s;
        if (!(h > 0.0)) break;
        s = s_next;
        if (spec.method == Method::RF) {
            NewtonOptions opt;
            opt.tolerance = spec.tolerance;
            const Vector3d g_i = seg.g_front + s * seg.v_par;
            const InvertResult inv = newton_invert(map, g_i, p, opt);
            if (inv.status == InvertStatus::Singular)
                throw std::runtime_error("integrate_segment: singular Jacobian");
            p = inv.p;
        } else if (spec.method == Method::IRK1) {
            const StepResult step = implicit_euler_step(map, p, h, field);
            if (!step.ok) throw std::runtime_error("integrate_segment: implicit step failed");
            p = step.p;
        } else {
            const StepResult step = explicit_rk_step(map, p, h, field, spec.method);
            if (!step.ok) throw std::runtime_error("integrate_segment: explicit step failed");
            p = step.p;
        }
        samples.push_back(p);
    }
    return samples;
}

double segment_error_linf(const DiffMap3& map, const std::vector<Vector3d>& samples,
                          const RaySegment& segment) {
    double err = 0.0;
    for (const Vector3d& p : samples) {
        const Vector3d d = segment.g_front - map.value(p);
        const Vector3d perp = d - d.dot(segment.v_par) * segment.v_par;
        err = std::max(err, perp.norm());
    }
    return err;
}

ConvergenceTable convergence_study(const DiffMap3& map, const Vector3d& p_front,
                                   const Vector3d& p_back, const std::vector<Method>& methods,
                                   const std::vector<double>& ds_list, double c_explicit,
                                   double c_implicit, const std::vector<double>& rf_tolerances) {
    ConvergenceTable table;
    table.ds = ds_list;
    const RaySegment seg = RaySegment::between(map.value(p_front), map.value(p_back));

    auto run_row = [&](ConvergenceRow& row) {
        for (double ds : ds_list) {
            IntegratorSpec spec = row.spec;
            spec.ds = ds;
            const auto samples = integrate_segment(map, p_front, p_back, spec);
            row.errors.push_back(segment_error_linf(map, samples, seg));
        }
        double order_sum = 0.0;
        int order_count = 0;
        for (size_t i = 0; i + 1 < ds_list.size(); ++i) {
            if (row.errors[i] > 0.0 && row.errors[i + 1] > 0.0) {
                order_sum += std::log(row.errors[i] / row.errors[i + 1]) /
                             std::log(ds_list[i] / ds_list[i + 1]);
                ++order_count;
            }
        }
        row.observed_order = order_count > 0 ? order_sum / order_count : 0.0;
    };

    for (Method m : methods) {
        if (m == Method::RF) {
            for (double tol : rf_tolerances) {
                ConvergenceRow row;
                row.spec.method = Method::RF;
                row.spec.tolerance = tol;
                std::ostringstream label;
                label << "rf(tol=" << tol << ")";
                row.label = label.str();
                run_row(row);
                table.rows.push_back(std::move(row));
            }
            continue;
        }
        ConvergenceRow row;
        row.spec.method = m;
        row.spec.c = m == Method::IRK1 ? c_implicit : c_explicit;
        std::ostringstream label;
        label << method_name(m) << "(c=" << row.spec.c << ")";
        row.label = label.str();
        run_row(row);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<double> default_convergence_ds() { return {1.6e-2, 7.8e-3, 3.9e-3, 2.0e-3}; }

std::string format_convergence_table(const ConvergenceTable& table) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific;
    os << "method";
    for (double ds : table.ds) os << "\tds=" << ds;
    os << "\torder\n";
    for (const ConvergenceRow& row : table.rows) {
        os << row.label;
        for (double e : row.errors) os << "\t" << e;
        if (row.spec.method == Method::RF)
            os << "\t-";
        else
            os << "\t" << row.observed_order;
        os << "\n";
    }
    return os.str();
}

} // namespace ivr
