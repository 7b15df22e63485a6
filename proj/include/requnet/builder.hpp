/// Layer-by-layer construction of sparse ReQU networks.
///
/// Values at a layer interface are represented as Combos: linear read-outs
/// of the current hidden layer's neurons. Emitting a block (product,
/// identity, constant) adds neurons to the open layer and returns the combo
/// through which the block's value is read by the next layer, so consecutive
/// linear maps are merged from the start and never materialize entries
/// outside [-1, 1].

#pragma once

#include <map>
#include <vector>

#include "requnet/network.hpp"

namespace requnet {

/// Linear read-out sum(coeff * neuron) over the layer below the open one.
struct Combo {
    std::vector<std::pair<int, double>> terms;

    static Combo of(int neuron, double coeff = 1.0) { return Combo{{{neuron, coeff}}}; }
    Combo scaled(double s) const;
};

Combo add_combos(const Combo& a, const Combo& b);

class Assembler {
public:
    explicit Assembler(int input_width);

    /// Opens the next hidden layer; neuron combos now read the previous one.
    void open_layer();
    /// Adds a neuron with pre-activation read `pre` and shift `v`, i.e. value
    /// max(pre_value - v, 0)^2. Returns its index within the open layer.
    int neuron(const Combo& pre, double v);
    int layer_width() const;
    int layers_open() const { return static_cast<int>(widths_.size()); }

    /// Sets the final linear layer and assembles the validated network.
    Network build(const std::vector<Combo>& output_rows);

private:
    int input_width_;
    std::vector<int> widths_;
    std::vector<std::map<std::pair<int, int>, double>> w_;
    std::vector<std::vector<double>> v_;
};

/// sigma(1) = 1 from a shift alone.
Combo emit_const_one(Assembler& a);

/// (value(p) + cp) * (value(r) + cr) via the four-neuron square trick.
/// Requires |cp + cr| <= 1 and |cp - cr| <= 1.
Combo emit_product(Assembler& a, const Combo& p, double cp, const Combo& r, double cr);

/// Identity block valid for any real input (four neurons).
Combo emit_identity(Assembler& a, const Combo& y);
/// Identity block valid for y >= -1 (three neurons).
Combo emit_identity3(Assembler& a, const Combo& y);
/// Identity block valid for |y| <= 1 (two neurons).
Combo emit_identity2(Assembler& a, const Combo& y);

/// One slot of a product tree: either a live value or a padding one.
struct TreeSlot {
    bool one = false;
    Combo combo;
};

/// Advances a padded product tree by one stage within the open layer,
/// pairing slots (0,1), (2,3), ... The slot count must be even.
std::vector<TreeSlot> emit_tree_stage(Assembler& a, const std::vector<TreeSlot>& slots);

int ceil_log2(int n);

}  // namespace requnet
