#pragma once

#include <vector>

namespace ivr {

constexpr int kMaxDegree = 8;

/// Non-zero basis values and derivatives on one span: ders[d][j] is the
/// d-th derivative of basis function (span - degree + j), j = 0..degree.
struct BasisDers {
    int count = 0;
    double ders[3][kMaxDegree + 1] = {};
};

/// Non-decreasing knot sequence with a polynomial degree.
/// The active domain is [knots[p], knots[n]] with n = size - p - 1.
class KnotVector {
public:
    KnotVector() = default;
    /// Throws std::invalid_argument on a malformed sequence.
    KnotVector(std::vector<double> knots, int degree);

    int degree() const { return degree_; }
    /// Number of basis functions / control points this vector supports.
    int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
    double domain_min() const { return knots_[degree_]; }
    double domain_max() const { return knots_[knots_.size() - degree_ - 1]; }
    const std::vector<double>& knots() const { return knots_; }

    /// Span index i with knots[i] <= t < knots[i+1]; t at the domain maximum
    /// returns the last non-degenerate span. Throws std::domain_error outside.
    int find_span(double t) const;

    /// Basis values and up to nders derivatives (Cox-de Boor tables, one pass).
    void basis_with_derivatives(int span, double t, int nders, BasisDers& out) const;

    /// Affinely remaps the sequence so the active domain becomes [0,1].
    void normalize();

private:
    std::vector<double> knots_;
    int degree_ = 0;
    int last_span_ = 0;
};

} // namespace ivr
