#include "requnet/tensor_spline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace requnet {

std::size_t TensorSplineCoeffs::tensor_size() const {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(basis_per_dim());
    return n * static_cast<std::size_t>(p);
}

namespace {

std::size_t flat_index(const TensorSplineCoeffs& c, int m, std::span<const int> j) {
    std::size_t idx = static_cast<std::size_t>(m);
    for (int i = 0; i < c.d; ++i)
        idx = idx * static_cast<std::size_t>(c.basis_per_dim()) +
              static_cast<std::size_t>(j[static_cast<std::size_t>(i)] - 1);
    return idx;
}

}  // namespace

double& TensorSplineCoeffs::at(int m, std::span<const int> j) {
    return w[flat_index(*this, m, j)];
}

double TensorSplineCoeffs::coeff(int m, std::span<const int> j) const {
    return w[flat_index(*this, m, j)];
}

double TensorSplineCoeffs::scaled(int m, std::span<const int> j) const {
    return wt[flat_index(*this, m, j)];
}

double TensorSplineCoeffs::max_abs_w() const {
    double r = 0.0;
    for (double v : w) r = std::max(r, std::abs(v));
    return r;
}

double TensorSplineCoeffs::max_abs_wt() const {
    double r = 0.0;
    for (double v : wt) r = std::max(r, std::abs(v));
    return r;
}

bool next_multi_index(std::span<int> j, int n) {
    for (std::size_t i = j.size(); i-- > 0;) {
        if (j[i] < n) {
            ++j[i];
            return true;
        }
        j[i] = 1;
    }
    return false;
}

TensorSplineCoeffs fit_coeffs(const TargetFunction& f, int q, int K) {
    if (q < 2 || K < 2) throw std::invalid_argument("fit_coeffs: requires q >= 2 and K >= 2");
    if (!f.evaluator) throw std::invalid_argument("fit_coeffs: missing evaluator");
    KnotVector kv = make_knots(q, K);
    int n = basis_count(kv);
    int d = f.d, p = f.p;

    // univariate collocation matrix C[i][j] = N_j(xi_i)
    Eigen::MatrixXd colloc(n, n);
    for (int i = 1; i <= n; ++i) {
        double xi = greville(kv, i);
        for (int j = 1; j <= n; ++j)
            colloc(i - 1, j - 1) = eval_n({q, j}, kv, xi);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(colloc);
    // PartialPivLU does not signal singularity; Greville collocation on
    // clamped knots is safely conditioned, but guard against a degenerate
    // solve anyway.
    {
        Eigen::VectorXd probe = lu.solve(Eigen::VectorXd::Ones(n));
        if (!probe.allFinite())
            throw std::runtime_error("fit_coeffs: singular collocation matrix");
    }

    TensorSplineCoeffs out;
    out.p = p;
    out.d = d;
    out.q = q;
    out.K = K;
    out.w.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(std::pow(n, d)), 0.0);

    // sample f at the Greville tensor grid
    std::vector<int> j(static_cast<std::size_t>(d), 1);
    std::vector<double> x(static_cast<std::size_t>(d));
    do {
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = greville(kv, j[static_cast<std::size_t>(i)]);
        std::vector<double> val = f.evaluator(x);
        if (static_cast<int>(val.size()) != p)
            throw std::invalid_argument("fit_coeffs: evaluator output width mismatch");
        for (int m = 0; m < p; ++m) out.w[flat_index(out, m, j)] = val[static_cast<std::size_t>(m)];
    } while (next_multi_index(j, n));

    // solve along each axis in turn (tensor structure)
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    for (int m = 0; m < p; ++m) {
        double* slab = out.w.data() + static_cast<std::size_t>(m) * total;
        for (int axis = d - 1; axis >= 0; --axis) {
            // stride of the axis in the row-major layout
            std::size_t stride = 1;
            for (int i = axis + 1; i < d; ++i) stride *= static_cast<std::size_t>(n);
            std::size_t lines = total / static_cast<std::size_t>(n);
            for (std::size_t line = 0; line < lines; ++line) {
                // base offset of this line: expand line index skipping `axis`
                std::size_t rem = line, base = 0;
                for (int i = d - 1; i >= 0; --i) {
                    if (i == axis) continue;
                    std::size_t sz = static_cast<std::size_t>(n);
                    std::size_t digit = rem % sz;
                    rem /= sz;
                    std::size_t axis_stride = 1;
                    for (int t = i + 1; t < d; ++t) axis_stride *= static_cast<std::size_t>(n);
                    base += digit * axis_stride;
                }
                Eigen::VectorXd rhs(n);
                for (int t = 0; t < n; ++t)
                    rhs(t) = slab[base + static_cast<std::size_t>(t) * stride];
                Eigen::VectorXd sol = lu.solve(rhs);
                for (int t = 0; t < n; ++t)
                    slab[base + static_cast<std::size_t>(t) * stride] = sol(t);
            }
        }
    }

    // scaled coefficients
    out.wt.resize(out.w.size());
    std::fill(j.begin(), j.end(), 1);
    do {
        double scale = 1.0;
        for (int i = 0; i < d; ++i)
            scale *= kv.a(j[static_cast<std::size_t>(i)] + q + 1) - kv.a(j[static_cast<std::size_t>(i)]);
        for (int m = 0; m < p; ++m) {
            std::size_t idx = flat_index(out, m, j);
            out.wt[idx] = out.w[idx] * scale;
        }
    } while (next_multi_index(j, n));
    return out;
}

namespace {

// first interval index i (1-based, q+1 <= i <= q+K) with x in [a_i, a_{i+1})
int find_span(const KnotVector& kv, double x) {
    if (x >= 1.0) return kv.q + kv.K;
    int cell = static_cast<int>(std::floor(x * kv.K));
    if (cell >= kv.K) cell = kv.K - 1;
    return kv.q + 1 + cell;
}

void check_point(const TensorSplineCoeffs& c, std::span<const double> x) {
    if (static_cast<int>(x.size()) != c.d)
        throw std::invalid_argument("eval_spline: dimension mismatch");
    for (double t : x)
        if (t < 0.0 || t > 1.0)
            throw std::invalid_argument("eval_spline: point outside the unit cube");
}

}  // namespace

std::vector<double> eval_spline(const TensorSplineCoeffs& c, std::span<const double> x) {
    check_point(c, x);
    KnotVector kv = make_knots(c.q, c.K);
    int q = c.q;
    // per-dimension active indices and basis values
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(c.d));
    std::vector<int> lo(static_cast<std::size_t>(c.d));
    for (int i = 0; i < c.d; ++i) {
        int span = find_span(kv, x[static_cast<std::size_t>(i)]);
        lo[static_cast<std::size_t>(i)] = span - q;
        vals[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(q) + 1);
        for (int t = 0; t <= q; ++t)
            vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
                eval_n({q, span - q + t}, kv, x[static_cast<std::size_t>(i)]);
    }
    std::vector<double> out(static_cast<std::size_t>(c.p), 0.0);
    std::vector<int> offset(static_cast<std::size_t>(c.d), 0);
    std::vector<int> j(static_cast<std::size_t>(c.d));
    bool more = true;
    while (more) {
        double prod = 1.0;
        for (int i = 0; i < c.d; ++i) {
            prod *= vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(offset[static_cast<std::size_t>(i)])];
            j[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + offset[static_cast<std::size_t>(i)];
        }
        if (prod != 0.0)
            for (int m = 0; m < c.p; ++m) out[static_cast<std::size_t>(m)] += c.coeff(m, j) * prod;
        // advance offsets
        more = false;
        for (std::size_t i = offset.size(); i-- > 0;) {
            if (offset[i] < q) {
                ++offset[i];
                std::fill(offset.begin() + static_cast<long>(i) + 1, offset.end(), 0);
                more = true;
                break;
            }
        }
    }
    return out;
}

std::vector<double> eval_spline_deriv(const TensorSplineCoeffs& c, std::span<const double> x,
                                      std::span<const int> gamma) {
    check_point(c, x);
    if (static_cast<int>(gamma.size()) != c.d)
        throw std::invalid_argument("eval_spline_deriv: multi-index dimension mismatch");
    for (int g : gamma)
        if (g < 0 || g > c.q)
            throw std::invalid_argument("eval_spline_deriv: order outside [0, q]");
    KnotVector kv = make_knots(c.q, c.K);
    int q = c.q;
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(c.d));
    std::vector<int> lo(static_cast<std::size_t>(c.d));
    for (int i = 0; i < c.d; ++i) {
        int span = find_span(kv, x[static_cast<std::size_t>(i)]);
        lo[static_cast<std::size_t>(i)] = span - q;
        vals[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(q) + 1);
        for (int t = 0; t <= q; ++t)
            vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = eval_n_deriv(
                {q, span - q + t}, kv, x[static_cast<std::size_t>(i)], gamma[static_cast<std::size_t>(i)]);
    }
    std::vector<double> out(static_cast<std::size_t>(c.p), 0.0);
    std::vector<int> offset(static_cast<std::size_t>(c.d), 0);
    std::vector<int> j(static_cast<std::size_t>(c.d));
    bool more = true;
    while (more) {
        double prod = 1.0;
        for (int i = 0; i < c.d; ++i) {
            prod *= vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(offset[static_cast<std::size_t>(i)])];
            j[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + offset[static_cast<std::size_t>(i)];
        }
        if (prod != 0.0)
            for (int m = 0; m < c.p; ++m) out[static_cast<std::size_t>(m)] += c.coeff(m, j) * prod;
        more = false;
        for (std::size_t i = offset.size(); i-- > 0;) {
            if (offset[i] < q) {
                ++offset[i];
                std::fill(offset.begin() + static_cast<long>(i) + 1, offset.end(), 0);
                more = true;
                break;
            }
        }
    }
    return out;
}

CoeffBoundReport check_coeff_bound(const TensorSplineCoeffs& c, double sup_f) {
    CoeffBoundReport r;
    r.bound = std::pow(2.0 * c.q + 1.0, c.d) * std::pow(9.0, c.d * (c.q - 1)) * sup_f;
    r.max_abs_w = c.max_abs_w();
    r.max_ratio = r.bound > 0.0 ? r.max_abs_w / r.bound : (r.max_abs_w > 0.0 ? HUGE_VAL : 0.0);
    r.ok = r.max_abs_w <= r.bound;
    return r;
}

std::string to_json_string(const TensorSplineCoeffs& c) {
    nlohmann::json j;
    j["p"] = c.p;
    j["d"] = c.d;
    j["q"] = c.q;
    j["K"] = c.K;
    j["w"] = c.w;
    j["wt"] = c.wt;
    return j.dump();
}

TensorSplineCoeffs coeffs_from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TensorSplineCoeffs c;
    c.p = j.at("p").get<int>();
    c.d = j.at("d").get<int>();
    c.q = j.at("q").get<int>();
    c.K = j.at("K").get<int>();
    c.w = j.at("w").get<std::vector<double>>();
    c.wt = j.at("wt").get<std::vector<double>>();
    if (c.w.size() != c.tensor_size() || c.wt.size() != c.tensor_size())
        throw std::invalid_argument("coeffs_from_json_string: size mismatch");
    return c;
}

}  // namespace requnet
