/// Univariate clamped B-splines on [0, 1]: knot construction, the two-term
/// evaluation recursion, normalization, and derivatives.

#pragma once

#include <vector>

namespace requnet {

/// Clamped knot sequence a_1 <= ... <= a_{2q+K+1} on [0, 1]: the boundary
/// values 0 and 1 are each repeated q+1 times and the K-1 interior knots sit
/// at j/K. Knot indices are 1-based throughout this module.
struct KnotVector {
    int q = 0;  ///< spline degree
    int K = 0;  ///< number of subintervals of [0, 1]
    std::vector<double> knots;  ///< size 2q+K+1, non-decreasing

    /// 1-based accessor: a(j), 1 <= j <= 2q+K+1.
    double a(int j) const { return knots[static_cast<size_t>(j) - 1]; }
    int size() const { return static_cast<int>(knots.size()); }
};

/// Identifies one B-spline of order m (0 <= m <= q) on a knot vector.
/// Valid indices are 1 <= j <= 2q+K-m.
struct BSplineId {
    int m = 0;
    int j = 1;
};

/// Builds the clamped knot vector for degree q and K subintervals.
/// Rejects q < 0 or K < 2.
KnotVector make_knots(int q, int K);

/// Checked constructor for BSplineId; rejects out-of-range (m, j).
BSplineId make_bspline_id(int m, int j, const KnotVector& kv);

/// Number of Greville abscissa / basis functions of full degree: q + K.
int basis_count(const KnotVector& kv);

/// Greville abscissa xi_j = (a_{j+1} + ... + a_{j+q}) / q, 1 <= j <= q+K.
double greville(const KnotVector& kv, int j);

/// Unnormalized B-spline B_j^{m,K}(x) for x in [0, 1].
///
/// Base case: B_j^0 = 1/(a_{j+1}-a_j) on [a_j, a_{j+1}) when a_j < a_{j+1},
/// otherwise 0. Recursion combines B_j^{m-1} and B_{j+1}^{m-1} with the
/// support test a_j <= x < a_{j+m+1}; degenerate spans (a_j = a_{j+m+1})
/// yield 0. At x = 1 the value is the left limit, so the clamped basis still
/// sums to one at the right endpoint.
double eval_b(const BSplineId& id, const KnotVector& kv, double x);

/// Normalized B-spline N_j^{m,K}(x) = (a_{j+m+1} - a_j) * B_j^{m,K}(x).
/// Values lie in [0, 1].
double eval_n(const BSplineId& id, const KnotVector& kv, double x);

/// Right-derivative of order `order` (0 <= order <= m) of N_j^{m,K} at x.
///
/// Uses the order-lowering rule
///   D N_j^m = m * ( N_j^{m-1}/(a_{j+m}-a_j) - N_{j+1}^{m-1}/(a_{j+m+1}-a_{j+1}) )
/// applied recursively, with terms of vanishing denominator dropped. The two
/// denominators differ near the clamped boundary; this index convention is
/// the one that matches finite differences of eval_n (checked in the tests).
double eval_n_deriv(const BSplineId& id, const KnotVector& kv, double x, int order);

}  // namespace requnet
