#include "requnet/builder.hpp"

#include <cmath>
#include <stdexcept>

namespace requnet {

Combo Combo::scaled(double s) const {
    if (s == 0.0) return {};
    Combo out;
    out.terms.reserve(terms.size());
    for (const auto& [n, c] : terms) out.terms.emplace_back(n, c * s);
    return out;
}

Combo add_combos(const Combo& a, const Combo& b) {
    std::map<int, double> acc;
    for (const auto& [n, c] : a.terms) acc[n] += c;
    for (const auto& [n, c] : b.terms) acc[n] += c;
    Combo out;
    for (const auto& [n, c] : acc)
        if (c != 0.0) out.terms.emplace_back(n, c);
    return out;
}

Assembler::Assembler(int input_width) : input_width_(input_width) {
    if (input_width <= 0) throw std::invalid_argument("Assembler: input width must be positive");
}

void Assembler::open_layer() {
    widths_.push_back(0);
    w_.emplace_back();
    v_.emplace_back();
}

int Assembler::neuron(const Combo& pre, double v) {
    if (widths_.empty()) throw std::logic_error("Assembler: no open layer");
    if (std::abs(v) > 1.0) throw std::invalid_argument("Assembler: shift outside [-1, 1]");
    int idx = widths_.back()++;
    int prev_width = widths_.size() >= 2 ? widths_[widths_.size() - 2] : input_width_;
    auto& mat = w_.back();
    for (const auto& [n, c] : pre.terms) {
        if (n < 0 || n >= prev_width)
            throw std::invalid_argument("Assembler: combo reads outside previous layer");
        mat[{idx, n}] += c;
    }
    v_.back().push_back(v);
    return idx;
}

int Assembler::layer_width() const {
    return widths_.empty() ? input_width_ : widths_.back();
}

Network Assembler::build(const std::vector<Combo>& output_rows) {
    if (widths_.empty()) throw std::logic_error("Assembler: network needs a hidden layer");
    if (output_rows.empty()) throw std::invalid_argument("Assembler: no output rows");
    Architecture arch;
    arch.dims.push_back(input_width_);
    for (int w : widths_) arch.dims.push_back(w);
    arch.dims.push_back(static_cast<int>(output_rows.size()));

    std::vector<SparseMatrix> weights;
    for (size_t l = 0; l < w_.size(); ++l) {
        std::vector<WeightEntry> entries;
        entries.reserve(w_[l].size());
        for (const auto& [rc, val] : w_[l])
            if (val != 0.0) entries.push_back({rc.first, rc.second, val});
        int cols = l == 0 ? input_width_ : widths_[l - 1];
        weights.emplace_back(widths_[l], cols, std::move(entries));
    }
    {
        std::map<std::pair<int, int>, double> acc;
        for (size_t r = 0; r < output_rows.size(); ++r)
            for (const auto& [n, c] : output_rows[r].terms) acc[{static_cast<int>(r), n}] += c;
        std::vector<WeightEntry> entries;
        for (const auto& [rc, val] : acc)
            if (val != 0.0) entries.push_back({rc.first, rc.second, val});
        weights.emplace_back(static_cast<int>(output_rows.size()), widths_.back(),
                             std::move(entries));
    }
    std::vector<std::vector<double>> shifts(v_.begin(), v_.end());
    return Network(std::move(arch), std::move(weights), std::move(shifts));
}

Combo emit_const_one(Assembler& a) { return Combo::of(a.neuron({}, -1.0)); }

Combo emit_product(Assembler& a, const Combo& p, double cp, const Combo& r, double cr) {
    if (std::abs(cp + cr) > 1.0 || std::abs(cp - cr) > 1.0)
        throw std::invalid_argument("emit_product: constant offsets exceed the shift bound");
    Combo sum = add_combos(p, r);
    Combo diff = add_combos(p, r.scaled(-1.0));
    int n1 = a.neuron(sum, -(cp + cr));
    int n2 = a.neuron(sum.scaled(-1.0), cp + cr);
    int n3 = a.neuron(diff, -(cp - cr));
    int n4 = a.neuron(diff.scaled(-1.0), cp - cr);
    Combo out;
    out.terms = {{n1, 0.25}, {n2, 0.25}, {n3, -0.25}, {n4, -0.25}};
    return out;
}

Combo emit_identity(Assembler& a, const Combo& y) { return emit_product(a, y, 0.0, {}, 1.0); }

Combo emit_identity3(Assembler& a, const Combo& y) {
    int n1 = a.neuron(y, -1.0);
    int n2 = a.neuron(y, 1.0);
    int n3 = a.neuron(y.scaled(-1.0), -1.0);
    Combo out;
    out.terms = {{n1, 0.25}, {n2, -0.25}, {n3, -0.25}};
    return out;
}

Combo emit_identity2(Assembler& a, const Combo& y) {
    int n1 = a.neuron(y, -1.0);
    int n2 = a.neuron(y.scaled(-1.0), -1.0);
    Combo out;
    out.terms = {{n1, 0.25}, {n2, -0.25}};
    return out;
}

std::vector<TreeSlot> emit_tree_stage(Assembler& a, const std::vector<TreeSlot>& slots) {
    if (slots.size() % 2 != 0) throw std::invalid_argument("emit_tree_stage: odd slot count");
    std::vector<TreeSlot> next;
    next.reserve(slots.size() / 2);
    for (size_t i = 0; i < slots.size(); i += 2) {
        const TreeSlot& s1 = slots[i];
        const TreeSlot& s2 = slots[i + 1];
        if (s1.one && s2.one) {
            next.push_back({true, {}});
        } else if (s1.one || s2.one) {
            const Combo& live = s1.one ? s2.combo : s1.combo;
            next.push_back({false, emit_product(a, live, 0.0, {}, 1.0)});
        } else {
            next.push_back({false, emit_product(a, s1.combo, 0.0, s2.combo, 0.0)});
        }
    }
    return next;
}

int ceil_log2(int n) {
    if (n < 1) throw std::invalid_argument("ceil_log2: argument must be >= 1");
    int v = 0;
    while ((1 << v) < n) ++v;
    return v;
}

}  // namespace requnet
