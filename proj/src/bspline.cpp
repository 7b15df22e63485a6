#include "requnet/bspline.hpp"

#include <stdexcept>
#include <string>

namespace requnet {

KnotVector make_knots(int q, int K) {
    if (q < 0) throw std::invalid_argument("make_knots: degree q must be >= 0");
    if (K < 2) throw std::invalid_argument("make_knots: K must be >= 2");
    KnotVector kv;
    kv.q = q;
    kv.K = K;
    kv.knots.resize(static_cast<size_t>(2 * q + K + 1));
    int n = 2 * q + K + 1;
    for (int j = 1; j <= n; ++j) {
        double value;
        if (j <= q + 1) {
            value = 0.0;
        } else if (j <= q + K) {
            value = static_cast<double>(j - q - 1) / K;
        } else {
            value = 1.0;
        }
        kv.knots[static_cast<size_t>(j) - 1] = value;
    }
    return kv;
}

BSplineId make_bspline_id(int m, int j, const KnotVector& kv) {
    if (m < 0 || m > kv.q)
        throw std::invalid_argument("make_bspline_id: order m out of range [0, q]");
    if (j < 1 || j > 2 * kv.q + kv.K - m)
        throw std::invalid_argument("make_bspline_id: index j out of range [1, 2q+K-m]");
    return BSplineId{m, j};
}

int basis_count(const KnotVector& kv) { return kv.q + kv.K; }

double greville(const KnotVector& kv, int j) {
    if (kv.q < 1) throw std::invalid_argument("greville: requires q >= 1");
    if (j < 1 || j > basis_count(kv))
        throw std::invalid_argument("greville: index out of range");
    double sum = 0.0;
    for (int i = 1; i <= kv.q; ++i) sum += kv.a(j + i);
    return sum / kv.q;
}

namespace {

// Support test with the left-limit convention at x = 1: the last nonempty
// span [a, 1) is treated as closed on the right.
bool in_span(double lo, double hi, double x) {
    if (!(lo < hi)) return false;
    if (x >= lo && x < hi) return true;
    return x == 1.0 && hi == 1.0;
}

double eval_b_rec(int m, int j, const KnotVector& kv, double x) {
    if (m == 0) {
        double lo = kv.a(j), hi = kv.a(j + 1);
        return in_span(lo, hi, x) ? 1.0 / (hi - lo) : 0.0;
    }
    double lo = kv.a(j), hi = kv.a(j + m + 1);
    if (!in_span(lo, hi, x)) return 0.0;
    double left = (x - lo) * eval_b_rec(m - 1, j, kv, x);
    double right = (hi - x) * eval_b_rec(m - 1, j + 1, kv, x);
    return (left + right) / (hi - lo);
}

void check_eval_args(const BSplineId& id, const KnotVector& kv, double x) {
    if (id.m < 0 || id.m > kv.q || id.j < 1 || id.j > 2 * kv.q + kv.K - id.m)
        throw std::invalid_argument("eval: BSplineId out of range for knot vector");
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("eval: x must lie in [0, 1]");
}

double eval_n_rec(int m, int j, const KnotVector& kv, double x, int order) {
    if (order == 0)
        return (kv.a(j + m + 1) - kv.a(j)) * eval_b_rec(m, j, kv, x);
    double d_left = kv.a(j + m) - kv.a(j);
    double d_right = kv.a(j + m + 1) - kv.a(j + 1);
    double value = 0.0;
    if (d_left > 0.0) value += eval_n_rec(m - 1, j, kv, x, order - 1) / d_left;
    if (d_right > 0.0) value -= eval_n_rec(m - 1, j + 1, kv, x, order - 1) / d_right;
    return m * value;
}

}  // namespace

double eval_b(const BSplineId& id, const KnotVector& kv, double x) {
    check_eval_args(id, kv, x);
    return eval_b_rec(id.m, id.j, kv, x);
}

double eval_n(const BSplineId& id, const KnotVector& kv, double x) {
    check_eval_args(id, kv, x);
    return (kv.a(id.j + id.m + 1) - kv.a(id.j)) * eval_b_rec(id.m, id.j, kv, x);
}

double eval_n_deriv(const BSplineId& id, const KnotVector& kv, double x, int order) {
    check_eval_args(id, kv, x);
    if (order < 0 || order > id.m)
        throw std::invalid_argument("eval_n_deriv: order must lie in [0, m], got " +
                                    std::to_string(order));
    return eval_n_rec(id.m, id.j, kv, x, order);
}

}  // namespace requnet
