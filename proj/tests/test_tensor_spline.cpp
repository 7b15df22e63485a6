#include "requnet/tensor_spline.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace requnet;

namespace {

TargetFunction make_target(int d, int p,
                           std::function<std::vector<double>(std::span<const double>)> f) {
    TargetFunction t;
    t.d = d;
    t.p = p;
    t.evaluator = std::move(f);
    return t;
}

// Independent oracle: full O((q+K)^d) summation over every basis product.
std::vector<double> naive_eval(const TensorSplineCoeffs& c, std::span<const double> x) {
    KnotVector kv = make_knots(c.q, c.K);
    int n = c.basis_per_dim();
    std::vector<double> out(static_cast<size_t>(c.p), 0.0);
    std::vector<int> j(static_cast<size_t>(c.d), 1);
    do {
        double prod = 1.0;
        for (int i = 0; i < c.d; ++i)
            prod *= eval_n({c.q, j[static_cast<size_t>(i)]}, kv, x[static_cast<size_t>(i)]);
        for (int m = 0; m < c.p; ++m) out[static_cast<size_t>(m)] += c.coeff(m, j) * prod;
    } while (next_multi_index(j, n));
    return out;
}

}  // namespace

TEST_SUITE("tensor_spline") {

TEST_CASE("constant target gives constant coefficients") {
    auto f = make_target(1, 1, [](std::span<const double>) {
        return std::vector<double>{0.7};
    });
    auto c = fit_coeffs(f, 2, 4);
    for (double v : c.w) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
    for (int i = 0; i <= 100; ++i) {
        double x = i / 100.0;
        CHECK(eval_spline(c, std::vector<double>{x})[0] ==
              doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("polynomial reproduction up to degree q") {
    // d = 1, q = 3
    auto f1 = make_target(1, 1, [](std::span<const double> x) {
        double t = x[0];
        return std::vector<double>{1.0 + t - 2.0 * t * t + 0.5 * t * t * t};
    });
    auto c1 = fit_coeffs(f1, 3, 4);
    for (int i = 0; i <= 101; ++i) {
        double x = i / 101.0;
        double want = f1.evaluator(std::vector<double>{x})[0];
        CHECK(std::abs(eval_spline(c1, std::vector<double>{x})[0] - want) <= 1e-10);
    }
    // d = 2, q = 2, polynomial of degree <= 2 in each variable
    auto f2 = make_target(2, 1, [](std::span<const double> x) {
        double a = x[0], b = x[1];
        return std::vector<double>{(1.0 + a + a * a) * (2.0 - b + 0.25 * b * b)};
    });
    auto c2 = fit_coeffs(f2, 2, 4);
    for (int i = 0; i <= 40; ++i)
        for (int k = 0; k <= 40; ++k) {
            std::vector<double> x{i / 40.0, k / 40.0};
            double want = f2.evaluator(x)[0];
            CHECK(std::abs(eval_spline(c2, x)[0] - want) <= 1e-10);
        }
}

TEST_CASE("sin(pi x) is approximated to 1e-3 by q=2, K=16") {
    auto f = make_target(1, 1, [](std::span<const double> x) {
        return std::vector<double>{std::sin(M_PI * x[0])};
    });
    auto c = fit_coeffs(f, 2, 16);
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double x = i / 2000.0;
        worst = std::max(worst, std::abs(eval_spline(c, std::vector<double>{x})[0] -
                                         std::sin(M_PI * x)));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("eval_spline: zero and partition-of-unity cases") {
    TensorSplineCoeffs c;
    c.p = 1;
    c.d = 1;
    c.q = 2;
    c.K = 4;
    c.w.assign(6, 0.0);
    c.wt.assign(6, 0.0);
    for (int i = 0; i <= 50; ++i)
        CHECK(eval_spline(c, std::vector<double>{i / 50.0})[0] == 0.0);
    c.w.assign(6, 1.0);
    for (int i = 0; i <= 50; ++i)
        CHECK(eval_spline(c, std::vector<double>{i / 50.0})[0] ==
              doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("eval_spline matches the naive full summation") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    TensorSplineCoeffs c;
    c.p = 2;
    c.d = 2;
    c.q = 2;
    c.K = 4;
    c.w.resize(c.tensor_size());
    c.wt.resize(c.tensor_size());
    for (auto& v : c.w) v = unif(rng);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> x{std::abs(unif(rng)) / 2.0, std::abs(unif(rng)) / 2.0};
        auto fast = eval_spline(c, x);
        auto slow = naive_eval(c, x);
        CHECK(std::abs(fast[0] - slow[0]) <= 1e-12);
        CHECK(std::abs(fast[1] - slow[1]) <= 1e-12);
    }
}

TEST_CASE("eval_spline_deriv: order zero, constants, finite differences") {
    auto f = make_target(2, 1, [](std::span<const double> x) {
        return std::vector<double>{std::sin(2.0 * x[0]) * std::cos(x[1])};
    });
    auto c = fit_coeffs(f, 3, 8);

    std::vector<int> zero{0, 0};
    for (int i = 1; i < 10; ++i) {
        std::vector<double> x{i / 10.0, 1.0 - i / 10.0};
        CHECK(eval_spline_deriv(c, x, zero)[0] ==
              doctest::Approx(eval_spline(c, x)[0]).epsilon(1e-14));
    }

    // gamma = (1, 0) against a central difference of eval_spline
    std::vector<int> g10{1, 0};
    double h = 1e-5;
    for (int i = 1; i < 16; ++i) {
        std::vector<double> x{(i + 0.431) / 16.0, 0.377};
        auto plus = eval_spline(c, std::vector<double>{x[0] + h, x[1]});
        auto minus = eval_spline(c, std::vector<double>{x[0] - h, x[1]});
        double fd = (plus[0] - minus[0]) / (2.0 * h);
        double an = eval_spline_deriv(c, x, g10)[0];
        CHECK(std::abs(an - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }

    // constant spline: any nonzero order differentiates to zero
    auto fc = make_target(2, 1, [](std::span<const double>) {
        return std::vector<double>{3.0};
    });
    auto cc = fit_coeffs(fc, 2, 4);
    std::vector<int> g11{1, 1};
    for (int i = 1; i < 8; ++i) {
        std::vector<double> x{i / 8.0, i / 9.0};
        CHECK(std::abs(eval_spline_deriv(cc, x, g11)[0]) <= 1e-9);
    }

    std::vector<int> too_high{4, 0};
    std::vector<double> x0{0.5, 0.5};
    CHECK_THROWS_AS(eval_spline_deriv(c, x0, too_high), std::invalid_argument);
}

TEST_CASE("coefficient bound diagnostic") {
    auto f1 = make_target(1, 1, [](std::span<const double>) {
        return std::vector<double>{1.0};
    });
    auto c1 = fit_coeffs(f1, 2, 8);
    auto r1 = check_coeff_bound(c1, 1.0);
    CHECK(r1.ok);
    CHECK(r1.max_abs_w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r1.bound == doctest::Approx(45.0));  // (2q+1) * 9^(q-1) = 5 * 9

    auto f2 = make_target(1, 1, [](std::span<const double> x) {
        return std::vector<double>{std::sin(M_PI * x[0])};
    });
    auto c2 = fit_coeffs(f2, 2, 8);
    CHECK(check_coeff_bound(c2, 1.0).ok);

    auto f3 = make_target(2, 1, [](std::span<const double> x) {
        return std::vector<double>{std::sin(x[0] * x[0] * x[1])};
    });
    auto c3 = fit_coeffs(f3, 3, 4);
    CHECK(check_coeff_bound(c3, 1.0).ok);
}

TEST_CASE("projector: refitting the spline's own samples is idempotent") {
    auto f = make_target(1, 1, [](std::span<const double> x) {
        return std::vector<double>{std::exp(x[0])};
    });
    auto c = fit_coeffs(f, 3, 8);
    TargetFunction g;
    g.d = 1;
    g.p = 1;
    g.evaluator = [&c](std::span<const double> x) { return eval_spline(c, x); };
    auto c2 = fit_coeffs(g, 3, 8);
    for (size_t i = 0; i < c.w.size(); ++i) CHECK(std::abs(c.w[i] - c2.w[i]) <= 1e-10);
}

TEST_CASE("linearity of the fit") {
    auto fa = make_target(1, 1, [](std::span<const double> x) {
        return std::vector<double>{std::sin(3.0 * x[0])};
    });
    auto fb = make_target(1, 1, [](std::span<const double> x) {
        return std::vector<double>{std::cos(2.0 * x[0]) - 0.3};
    });
    double alpha = 0.6, beta = -1.7;
    auto fab = make_target(1, 1, [&](std::span<const double> x) {
        return std::vector<double>{alpha * fa.evaluator(x)[0] + beta * fb.evaluator(x)[0]};
    });
    auto ca = fit_coeffs(fa, 2, 8);
    auto cb = fit_coeffs(fb, 2, 8);
    auto cab = fit_coeffs(fab, 2, 8);
    for (size_t i = 0; i < ca.w.size(); ++i)
        CHECK(std::abs(cab.w[i] - (alpha * ca.w[i] + beta * cb.w[i])) <= 1e-10);
}

TEST_CASE("locality: a perturbation inside one cell only moves nearby coefficients") {
    int q = 2, K = 8;
    auto base = make_target(1, 1, [](std::span<const double> x) {
        return std::vector<double>{x[0] * (1.0 - x[0])};
    });
    // bump supported strictly inside [4/8, 5/8]
    auto bumped = make_target(1, 1, [&](std::span<const double> x) {
        double t = x[0];
        double b = 0.0;
        if (t > 0.5 && t < 0.625) {
            double u = (t - 0.5) * 16.0 - 1.0;  // in (-1, 1)
            b = std::exp(-1.0 / (1.0 - u * u));
        }
        return std::vector<double>{base.evaluator(x)[0] + b};
    });
    auto c0 = fit_coeffs(base, q, K);
    auto c1 = fit_coeffs(bumped, q, K);
    KnotVector kv = make_knots(q, K);
    // Greville interpolation is not strictly local: far coefficients decay
    // geometrically (collocation inverse) instead of vanishing outright.
    double max_delta = 0.0;
    std::vector<double> delta(static_cast<size_t>(q + K) + 1, 0.0);
    for (int j = 1; j <= q + K; ++j) {
        delta[static_cast<size_t>(j)] =
            std::abs(c1.w[static_cast<size_t>(j) - 1] - c0.w[static_cast<size_t>(j) - 1]);
        max_delta = std::max(max_delta, delta[static_cast<size_t>(j)]);
    }
    CHECK(max_delta > 1e-3);  // the bump is visible at all
    for (int j = 1; j <= q + K; ++j) {
        bool touches = kv.a(j) < 0.625 && kv.a(j + q + 1) > 0.5;
        if (touches) continue;
        int gap = q + K;
        for (int i = 1; i <= q + K; ++i)
            if (kv.a(i) < 0.625 && kv.a(i + q + 1) > 0.5) gap = std::min(gap, std::abs(i - j));
        CHECK(delta[static_cast<size_t>(j)] <= max_delta * std::pow(0.45, gap));
    }
}

TEST_CASE("scaled coefficients equal w times the knot-span product") {
    auto f = make_target(2, 1, [](std::span<const double> x) {
        return std::vector<double>{std::sin(x[0] + 2.0 * x[1])};
    });
    auto c = fit_coeffs(f, 2, 4);
    KnotVector kv = make_knots(2, 4);
    std::vector<int> j{1, 1};
    do {
        double scale = (kv.a(j[0] + 3) - kv.a(j[0])) * (kv.a(j[1] + 3) - kv.a(j[1]));
        CHECK(c.scaled(0, j) == c.coeff(0, j) * scale);
        CHECK(std::abs(c.scaled(0, j)) <= std::abs(c.coeff(0, j)) + 1e-300);
    } while (next_multi_index(j, c.basis_per_dim()));
}

TEST_CASE("coefficient json round trip") {
    auto f = make_target(2, 2, [](std::span<const double> x) {
        return std::vector<double>{x[0] * x[1], x[0] - x[1]};
    });
    auto c = fit_coeffs(f, 2, 2);
    auto back = coeffs_from_json_string(to_json_string(c));
    CHECK(back.p == c.p);
    CHECK(back.d == c.d);
    CHECK(back.w == c.w);
    CHECK(back.wt == c.wt);
}

TEST_CASE("fit rejects bad arguments") {
    auto f = make_target(1, 1, [](std::span<const double>) {
        return std::vector<double>{0.0};
    });
    CHECK_THROWS_AS(fit_coeffs(f, 1, 4), std::invalid_argument);
    CHECK_THROWS_AS(fit_coeffs(f, 2, 1), std::invalid_argument);
}

}  // TEST_SUITE
