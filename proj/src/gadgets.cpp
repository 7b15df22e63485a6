#include "requnet/gadgets.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "requnet/bspline.hpp"

namespace requnet {

namespace build_detail {

void validate_gadget(const Gadget& g) {
    NetworkAudit a = g.net.audit();
    if (a.hidden_depth != g.declared_depth)
        throw std::logic_error(g.lemma_tag + ": depth " + std::to_string(a.hidden_depth) +
                               " != declared " + std::to_string(g.declared_depth));
    const auto& actual = g.net.arch().dims;
    const auto& declared = g.declared_arch.dims;
    if (actual.size() != declared.size())
        throw std::logic_error(g.lemma_tag + ": architecture length mismatch");
    for (size_t i = 0; i < actual.size(); ++i)
        if (actual[i] > declared[i])
            throw std::logic_error(g.lemma_tag + ": layer " + std::to_string(i) + " width " +
                                   std::to_string(actual[i]) + " exceeds declared " +
                                   std::to_string(declared[i]));
    if (a.nonzero > g.declared_nonzero_budget)
        throw std::logic_error(g.lemma_tag + ": " + std::to_string(a.nonzero) +
                               " nonzeros exceed budget " +
                               std::to_string(g.declared_nonzero_budget));
    if (a.max_abs_weight > 1.0)
        throw std::logic_error(g.lemma_tag + ": weight bound violated");
}

}  // namespace build_detail

using build_detail::validate_gadget;

Gadget identity_gadget(int width) {
    if (width < 1) throw std::invalid_argument("identity_gadget: width must be >= 1");
    Assembler a(width);
    a.open_layer();
    std::vector<Combo> rows;
    rows.reserve(static_cast<size_t>(width));
    for (int c = 0; c < width; ++c) rows.push_back(emit_identity(a, Combo::of(c)));
    Gadget g;
    g.net = a.build(rows);
    g.declared_depth = 1;
    g.declared_arch.dims = {width, 4 * width, width};
    g.declared_nonzero_budget = 13 * width;
    g.lemma_tag = "identity";
    validate_gadget(g);
    return g;
}

Gadget product2() {
    Assembler a(2);
    a.open_layer();
    int n1 = a.neuron(Combo{{{0, 1.0}, {1, 1.0}}}, 0.0);
    int n2 = a.neuron(Combo{{{0, 1.0}, {1, -1.0}}}, 0.0);
    int n3 = a.neuron(Combo{{{0, -1.0}, {1, 1.0}}}, 0.0);
    int n4 = a.neuron(Combo{{{0, -1.0}, {1, -1.0}}}, 0.0);
    Combo out{{{n1, 0.25}, {n2, -0.25}, {n3, -0.25}, {n4, 0.25}}};
    Gadget g;
    g.net = a.build({out});
    g.declared_depth = 1;
    g.declared_arch.dims = {2, 4, 1};
    g.declared_nonzero_budget = 20;  // 5 * 2^2
    g.lemma_tag = "product2";
    validate_gadget(g);
    return g;
}

Gadget product_k(int k) {
    if (k < 2) throw std::invalid_argument("product_k: k must be >= 2");
    int v = ceil_log2(k);
    Assembler a(k);
    std::vector<TreeSlot> slots;
    slots.reserve(static_cast<size_t>(1) << v);
    for (int i = 0; i < k; ++i) slots.push_back({false, Combo::of(i)});
    for (int i = k; i < (1 << v); ++i) slots.push_back({true, {}});
    for (int stage = 0; stage < v; ++stage) {
        a.open_layer();
        slots = emit_tree_stage(a, slots);
    }
    Gadget g;
    g.net = a.build({slots[0].combo});
    g.declared_depth = v;
    g.declared_arch.dims.push_back(k);
    for (int t = 1; t <= v; ++t) g.declared_arch.dims.push_back(1 << (v - t + 2));
    g.declared_arch.dims.push_back(1);
    g.declared_nonzero_budget = 5LL << (2 * v);
    g.lemma_tag = "product_k";
    validate_gadget(g);
    return g;
}

Gadget const_mult(double M, int L) {
    if (L < 1) throw std::invalid_argument("const_mult: L must be >= 1");
    double limit = std::pow(4.0, std::pow(4.0, L));
    if (!(std::abs(M) <= limit))
        throw std::invalid_argument("const_mult: |M| exceeds 4^(4^L) for L = " +
                                    std::to_string(L));

    // squaring chain value at hidden layer t (1-based), and the per-stage
    // multiplier caps 4 * g_{t-1} for the stages at layers 2 .. 2L+2
    int depth = 2 * L + 2;
    std::vector<double> g(static_cast<size_t>(depth), 0.0);
    g[0] = 1.0;
    for (int t = 1; t < depth - 1; ++t) {
        g[static_cast<size_t>(t)] = (g[static_cast<size_t>(t) - 1] + 1.0) * (g[static_cast<size_t>(t) - 1] + 1.0);
        if (!std::isfinite(g[static_cast<size_t>(t)]))
            throw std::invalid_argument("const_mult: chain overflows double range; reduce L");
    }

    // plan staged multipliers, smallest first so the running value stays
    // well scaled for the polarization blocks
    double target = std::abs(M);
    std::vector<double> planned(static_cast<size_t>(depth) + 1, 1.0);
    double rem = target;
    for (int t = 2; t <= depth; ++t) {
        double cap = 4.0 * g[static_cast<size_t>(t) - 2];
        int left = depth - t + 1;
        double want = (left == 1) ? rem : std::max(1.0, std::pow(rem, 1.0 / left));
        planned[static_cast<size_t>(t)] = std::min(cap, want);
        rem /= planned[static_cast<size_t>(t)];
    }
    if (rem > 1.0 + 1e-9)
        throw std::invalid_argument("const_mult: |M| exceeds the staged capacity for this L");

    Assembler a(1);
    a.open_layer();
    Combo y = emit_identity(a, Combo::of(0));
    int chain = a.neuron({}, -1.0);

    double realized = 1.0;
    for (int t = 2; t <= depth; ++t) {
        a.open_layer();
        double gp = g[static_cast<size_t>(t) - 2];
        double u;
        if (t < depth) {
            u = planned[static_cast<size_t>(t)] / (4.0 * gp);
        } else {
            u = target / (realized * 4.0 * gp);  // land exactly on |M|
        }
        if (std::abs(u) > 1.0)
            throw std::logic_error("const_mult: stage weight escaped [-1, 1]");
        realized *= u * 4.0 * gp;
        Combo p = (u == 0.0) ? Combo{} : Combo::of(chain, u);
        y = emit_product(a, p, 0.0, y.scaled(4.0), 0.0);
        if (t < depth) chain = a.neuron(Combo::of(chain), -1.0);
    }

    Gadget gad;
    gad.net = a.build({M < 0.0 ? y.scaled(-1.0) : y});
    gad.declared_depth = depth;
    gad.declared_arch.dims.push_back(1);
    for (int t = 1; t < depth; ++t) gad.declared_arch.dims.push_back(5);
    gad.declared_arch.dims.push_back(4);
    gad.declared_arch.dims.push_back(1);
    gad.declared_nonzero_budget = 60LL * L + 38;
    gad.lemma_tag = "const_mult";
    validate_gadget(gad);
    return gad;
}

namespace build_detail {

namespace {

// Combo reading K/4 from the triple (s(K/4+1), s(K/4-1), s(1-K/4)).
Combo quarter_k(const std::array<int, 3>& t) {
    return Combo{{{t[0], 0.25}, {t[1], -0.25}, {t[2], -0.25}}};
}

std::array<int, 3> emit_k_triple(Assembler& a, const Combo& quarter_k_value) {
    int n1 = a.neuron(quarter_k_value, -1.0);
    int n2 = a.neuron(quarter_k_value, 1.0);
    int n3 = a.neuron(quarter_k_value.scaled(-1.0), -1.0);
    return {n1, n2, n3};
}

// Read-outs B_j^{2,K}(x) / K^3 over the quadratic atom neurons, from the
// explicit piecewise formulas; an empty combo means the spline is zero.
std::vector<Combo> quadratic_slots(int q, int K, const std::vector<int>& plus, int m1, int m2) {
    std::vector<Combo> slots(static_cast<size_t>(K + 2 * q - 2));
    auto at = [&](int j) -> Combo& { return slots[static_cast<size_t>(j) - 1]; };
    at(q - 1) = Combo::of(m1);
    at(q) = Combo{{{m2, 0.25}, {m1, -1.0}}};
    at(q + K - 1) = Combo{{{plus[static_cast<size_t>(K) - 2], 0.25},
                           {plus[static_cast<size_t>(K) - 1], -1.0}}};
    at(q + K) = Combo::of(plus[static_cast<size_t>(K) - 1]);
    for (int j = q + 1; j <= q + K - 2; ++j) {
        Combo c;
        c.terms.emplace_back(plus[static_cast<size_t>(j - q) - 1], 1.0 / 6.0);
        c.terms.emplace_back(plus[static_cast<size_t>(j - q)], -0.5);
        c.terms.emplace_back(plus[static_cast<size_t>(j - q) + 1], 0.5);
        if (j - q + 2 <= K - 1) c.terms.emplace_back(plus[static_cast<size_t>(j - q) + 2], -1.0 / 6.0);
        at(j) = c;
    }
    return slots;
}

}  // namespace

Combo k_readout(const BankState& bank) {
    return Combo{{{bank.k_triple[0], 1.0}, {bank.k_triple[1], -1.0}, {bank.k_triple[2], -1.0}}};
}

std::vector<BankState> emit_spline_banks(Assembler& a, int q, int K, int d, int degree) {
    if (degree < 0) degree = q;
    if (q < 2 || K < 2)
        throw std::invalid_argument("emit_spline_banks: requires q >= 2 and K >= 2");
    if (degree < 2 || degree > q)
        throw std::invalid_argument("emit_spline_banks: degree must lie in [2, q]");
    KnotVector kv = make_knots(q, K);
    std::vector<BankState> banks(static_cast<size_t>(d));

    struct Atoms {
        std::vector<int> plus;
        int m1 = 0, m2 = 0;
        Combo k4;
    };
    std::vector<Atoms> atoms(static_cast<size_t>(d));

    // layer 1: quadratic atoms s(x - i/K), the two reflected atoms, a
    // two-neuron carrier for x, and ones summing to K/4
    a.open_layer();
    for (int c = 0; c < d; ++c) {
        Combo xin = Combo::of(c);
        Atoms& at = atoms[static_cast<size_t>(c)];
        at.plus.reserve(static_cast<size_t>(K));
        for (int i = 0; i < K; ++i)
            at.plus.push_back(a.neuron(xin, static_cast<double>(i) / K));
        at.m1 = a.neuron(xin.scaled(-1.0), -1.0 / K);
        at.m2 = a.neuron(xin.scaled(-1.0), -2.0 / K);
        banks[static_cast<size_t>(c)].x = emit_identity2(a, xin);
        double remaining = K / 4.0;
        while (remaining > 0.0) {
            double w = std::min(1.0, remaining);
            at.k4.terms.emplace_back(a.neuron({}, -1.0), w);
            remaining -= w;
        }
    }
    std::vector<std::vector<Combo>> slots(static_cast<size_t>(d));
    for (int c = 0; c < d; ++c) {
        const Atoms& at = atoms[static_cast<size_t>(c)];
        slots[static_cast<size_t>(c)] = quadratic_slots(q, K, at.plus, at.m1, at.m2);
    }

    // layer 2: carriers for the slots and x, and the K/4 triple
    a.open_layer();
    for (int c = 0; c < d; ++c) {
        auto& bank = banks[static_cast<size_t>(c)];
        for (auto& s : slots[static_cast<size_t>(c)])
            if (!s.terms.empty()) s = emit_identity2(a, s);
        bank.x = emit_identity2(a, bank.x);
        bank.k_triple = emit_k_triple(a, atoms[static_cast<size_t>(c)].k4);
    }

    // layer 3: multiply every slot by 2K (read K/2 off the triple)
    a.open_layer();
    for (int c = 0; c < d; ++c) {
        auto& bank = banks[static_cast<size_t>(c)];
        const auto& t = bank.k_triple;
        Combo half_k{{{t[0], 0.5}, {t[1], -0.5}, {t[2], -0.5}}};
        for (auto& s : slots[static_cast<size_t>(c)])
            if (!s.terms.empty()) s = emit_product(a, half_k, 0.0, s.scaled(4.0), 0.0);
        bank.x = emit_identity2(a, bank.x);
        bank.k_triple = emit_k_triple(a, quarter_k(t));
    }

    // layer 4: multiply by K^2/2 (alpha * (sum of the triple) = K^2/8)
    a.open_layer();
    double alpha = static_cast<double>(K) * K / (static_cast<double>(K) * K + 16.0);
    for (int c = 0; c < d; ++c) {
        auto& bank = banks[static_cast<size_t>(c)];
        const auto& t = bank.k_triple;
        Combo eighth_k2{{{t[0], alpha}, {t[1], alpha}, {t[2], alpha}}};
        for (auto& s : slots[static_cast<size_t>(c)])
            if (!s.terms.empty()) s = emit_product(a, eighth_k2, 0.0, s.scaled(4.0), 0.0);
        bank.x = emit_identity2(a, bank.x);
        bank.k_triple = emit_k_triple(a, quarter_k(t));
        bank.splines = slots[static_cast<size_t>(c)];
    }

    // degree lift: two layers per level m through the recursion
    // B_j^m = (x-a_j)/(a_{j+m+1}-a_j) B_j^{m-1} + (a_{j+m+1}-x)/(a_{j+m+1}-a_j) B_{j+1}^{m-1}
    for (int m = 3; m <= degree; ++m) {
        int out_count = K + 2 * q - m;
        std::vector<std::vector<Combo>> u(static_cast<size_t>(d)), v(static_cast<size_t>(d));
        std::vector<std::vector<Combo>> carried(static_cast<size_t>(d));

        a.open_layer();
        for (int c = 0; c < d; ++c) {
            auto& bank = banks[static_cast<size_t>(c)];
            Combo k_read = k_readout(bank);
            u[static_cast<size_t>(c)].resize(static_cast<size_t>(out_count));
            v[static_cast<size_t>(c)].resize(static_cast<size_t>(out_count));
            for (int j = 1; j <= out_count; ++j) {
                double lo = kv.a(j), hi = kv.a(j + m + 1);
                if (!(lo < hi)) continue;
                double cj = 1.0 / (K * (hi - lo));  // in (0, 1] since hi - lo >= 1/K
                u[static_cast<size_t>(c)][static_cast<size_t>(j) - 1] =
                    emit_product(a, bank.x, -lo, k_read.scaled(cj), 0.0);
                v[static_cast<size_t>(c)][static_cast<size_t>(j) - 1] =
                    emit_product(a, bank.x.scaled(-1.0), hi, k_read.scaled(cj), 0.0);
            }
            carried[static_cast<size_t>(c)].resize(bank.splines.size());
            for (size_t i = 0; i < bank.splines.size(); ++i)
                if (!bank.splines[i].terms.empty())
                    carried[static_cast<size_t>(c)][i] = emit_identity3(a, bank.splines[i]);
            bank.x = emit_identity2(a, bank.x);
            bank.k_triple = emit_k_triple(a, quarter_k(bank.k_triple));
        }

        a.open_layer();
        for (int c = 0; c < d; ++c) {
            auto& bank = banks[static_cast<size_t>(c)];
            const auto& carry = carried[static_cast<size_t>(c)];
            std::vector<Combo> lifted(static_cast<size_t>(out_count));
            for (int j = 1; j <= out_count; ++j) {
                if (!(kv.a(j) < kv.a(j + m + 1))) continue;
                Combo sum;
                const Combo& uc = u[static_cast<size_t>(c)][static_cast<size_t>(j) - 1];
                const Combo& vc = v[static_cast<size_t>(c)][static_cast<size_t>(j) - 1];
                if (!carry[static_cast<size_t>(j) - 1].terms.empty())
                    sum = emit_product(a, uc, 0.0, carry[static_cast<size_t>(j) - 1], 0.0);
                if (static_cast<size_t>(j) < carry.size() &&
                    !carry[static_cast<size_t>(j)].terms.empty())
                    sum = add_combos(
                        sum, emit_product(a, vc, 0.0, carry[static_cast<size_t>(j)], 0.0));
                lifted[static_cast<size_t>(j) - 1] = sum;
            }
            bank.splines = std::move(lifted);
            bank.x = emit_identity2(a, bank.x);
            bank.k_triple = emit_k_triple(a, quarter_k(bank.k_triple));
        }
    }
    return banks;
}

}  // namespace build_detail

namespace {

Gadget build_bspline_gadget(int q, int K, int degree) {
    Assembler a(1);
    auto banks = build_detail::emit_spline_banks(a, q, K, 1, degree);
    const build_detail::BankState& bank = banks[0];
    std::vector<Combo> rows;
    rows.push_back(bank.x);
    rows.push_back(build_detail::k_readout(bank));
    for (const auto& s : bank.splines) rows.push_back(s);
    Gadget g;
    g.net = a.build(rows);
    return g;
}

}  // namespace

Gadget bspline_net_quadratic(int q, int K) {
    if (q < 2 || K < 2)
        throw std::invalid_argument("bspline_net_quadratic: requires q, K >= 2");
    Gadget g = build_bspline_gadget(q, K, 2);
    g.declared_depth = 4;
    g.declared_arch.dims = {1, 4 * (K + 2 * q - 1) + K, 4 * K + 8 * q, 4 * K + 8 * q,
                            4 * K + 8 * q, K + 2 * q};
    g.declared_nonzero_budget = 72LL * (K + 2 * q);
    g.lemma_tag = "bspline_quadratic";
    build_detail::validate_gadget(g);
    return g;
}

Gadget bspline_net(int q, int K) {
    if (q < 2 || K < 2) throw std::invalid_argument("bspline_net: requires q, K >= 2");
    Gadget g = build_bspline_gadget(q, K, q);
    g.declared_depth = 4 + 2 * (q - 2);
    g.declared_arch.dims = {1, 4 * (K + 2 * q - 1) + K, 4 * K + 8 * q, 4 * K + 8 * q,
                            4 * K + 8 * q};
    for (int m = 3; m <= q; ++m) {
        g.declared_arch.dims.push_back(12 * (K + 2 * q - m) + 12);
        g.declared_arch.dims.push_back(8 * (K + 2 * q - m) + 8);
    }
    g.declared_arch.dims.push_back(K + q + 2);
    g.declared_nonzero_budget = 72LL * q * (K + 2 * q);
    g.lemma_tag = "bspline";
    build_detail::validate_gadget(g);
    return g;
}

std::string to_json_string(const Gadget& g) {
    nlohmann::json j = nlohmann::json::parse(to_json_string(g.net));
    j["lemma_tag"] = g.lemma_tag;
    return j.dump();
}

}  // namespace requnet
