/// Tensor-product spline fitting and evaluation: the coefficient tensors the
/// compiler consumes, computed by interpolation at the Greville abscissae.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "requnet/bspline.hpp"

namespace requnet {

/// Black-box target f: [0,1]^d -> R^p with optional analytic derivatives
/// (used by test oracles) and a declared smoothness (beta, bound).
struct TargetFunction {
    int d = 1;
    int p = 1;
    std::function<std::vector<double>(std::span<const double>)> evaluator;
    /// optional: derivative(x, multi_index) -> R^p; empty when unavailable
    std::function<std::vector<double>(std::span<const double>, std::span<const int>)> derivative;
    double beta = 3.0;
    double holder_bound = 1.0;
};

/// Coefficient tensor of a tensor-product spline in the normalized basis:
/// w has shape p x (q+K)^d (output index slowest, then j_1, ..., j_d
/// row-major); wt holds the same coefficients scaled by
/// prod_l (a_{j_l+q+1} - a_{j_l}).
struct TensorSplineCoeffs {
    int p = 1;
    int d = 1;
    int q = 2;
    int K = 2;
    std::vector<double> w;
    std::vector<double> wt;

    int basis_per_dim() const { return q + K; }
    std::size_t tensor_size() const;
    double& at(int m, std::span<const int> j);          // j entries are 1-based
    double coeff(int m, std::span<const int> j) const;  // w
    double scaled(int m, std::span<const int> j) const; // wt
    double max_abs_w() const;
    double max_abs_wt() const;
};

/// Interpolates f at the d-fold tensor grid of Greville abscissae; for f
/// already in the spline space this reproduces it exactly. Throws if the
/// univariate collocation matrix is numerically singular.
TensorSplineCoeffs fit_coeffs(const TargetFunction& f, int q, int K);

/// S_f(x) from the at most (q+1)^d basis products supported at x.
std::vector<double> eval_spline(const TensorSplineCoeffs& c, std::span<const double> x);

/// Partial derivative D^gamma S_f(x); rejects any gamma_i > q.
std::vector<double> eval_spline_deriv(const TensorSplineCoeffs& c, std::span<const double> x,
                                      std::span<const int> gamma);

struct CoeffBoundReport {
    bool ok = false;
    double bound = 0.0;       ///< (2q+1)^d 9^{d(q-1)} * sup_f
    double max_abs_w = 0.0;
    double max_ratio = 0.0;   ///< max |w| / bound
};

/// Diagnostic check of max |w| against the dual-basis coefficient bound.
CoeffBoundReport check_coeff_bound(const TensorSplineCoeffs& c, double sup_f);

/// JSON round-trip: {p, d, q, K, w: [...], wt: [...]}.
std::string to_json_string(const TensorSplineCoeffs& c);
TensorSplineCoeffs coeffs_from_json_string(const std::string& text);

/// Odometer over 1-based multi-indices (j_1..j_d), each in [1, n]; returns
/// false when the iteration wraps around.
bool next_multi_index(std::span<int> j, int n);

}  // namespace requnet
