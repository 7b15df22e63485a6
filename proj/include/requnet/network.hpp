/// Sparse feed-forward network IR with shifted ReQU activations.
///
/// A network of architecture (p_0, ..., p_{L+1}) is the composition
///   W_L o s_{v_L} o W_{L-1} o ... o W_1 o s_{v_1} o W_0,
/// where s_v(y)_i = max(y_i - v_i, 0)^2. All weight and shift entries are
/// required to lie in [-1, 1]; violating layers are rejected at construction.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace requnet {

struct Architecture {
    std::vector<int> dims;  ///< (p_0, ..., p_{L+1}), length >= 2

    int input_width() const { return dims.front(); }
    int output_width() const { return dims.back(); }
    int hidden_depth() const { return static_cast<int>(dims.size()) - 2; }
    int width() const;
};

struct WeightEntry {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// One boundary matrix W_l in coordinate-list form, row-major sorted.
class SparseMatrix {
public:
    SparseMatrix() = default;
    /// Entries are sorted and validated; duplicate (row, col) pairs and
    /// explicit zeros are rejected.
    SparseMatrix(int rows, int cols, std::vector<WeightEntry> entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<WeightEntry>& entries() const { return entries_; }
    std::int64_t nonzero() const { return static_cast<std::int64_t>(entries_.size()); }
    double max_abs() const;

    /// y += W x
    void accumulate(std::span<const double> x, std::span<double> y) const;
    /// Y += W X for row-major X (cols x k), Y (rows x k). Used by the jet pass.
    void accumulate_rows(const std::vector<double>& x, int k, std::vector<double>& y) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<WeightEntry> entries_;
};

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

struct NetworkAudit {
    int hidden_depth = 0;
    int width = 0;
    std::int64_t nonzero = 0;
    double max_abs_weight = 0.0;
};

class Network {
public:
    Network() = default;
    /// weights.size() must be hidden_depth()+1 and shifts.size() hidden_depth();
    /// shifts[l] belongs to the activation feeding W_{l+1}. Shape mismatches
    /// and entries outside [-1, 1] are hard errors.
    Network(Architecture arch, std::vector<SparseMatrix> weights,
            std::vector<std::vector<double>> shifts);

    const Architecture& arch() const { return arch_; }
    int input_width() const { return arch_.input_width(); }
    int output_width() const { return arch_.output_width(); }
    int hidden_depth() const { return arch_.hidden_depth(); }
    const SparseMatrix& weight(int l) const { return weights_[static_cast<size_t>(l)]; }
    const std::vector<double>& shift(int l) const { return shifts_[static_cast<size_t>(l)]; }

    std::vector<double> forward(std::span<const double> x) const;
    NetworkAudit audit() const;

private:
    Architecture arch_;
    std::vector<SparseMatrix> weights_;   // W_0 .. W_L
    std::vector<std::vector<double>> shifts_;  // v_1 .. v_L
};

/// Composition h(g(x)). The boundary product W^h_0 * W^g_L is used when its
/// entries stay within [-1, 1]; otherwise a four-neuron identity block is
/// inserted at the interface (one extra hidden layer) to preserve the bound.
Network concat(const Network& g, const Network& h);

/// Block-diagonal stacking of two equal-depth networks over a shared input;
/// the output is the concatenation of both outputs and the nonzero count is
/// the sum of the two counts.
Network parallel(const Network& f, const Network& g);

/// Like parallel, but the inputs are disjoint as well: the result consumes
/// the concatenation of both input vectors.
Network parallel_disjoint(const Network& f, const Network& g);

/// Extends the network to `target_hidden` hidden layers by appending
/// four-neuron identity blocks per output coordinate; pointwise equal.
Network pad_depth(const Network& net, int target_hidden);

/// JSON round-trip: {dims: [...], layers: [{w: [[r,c,value],...], v: [...]}]}.
std::string to_json_string(const Network& net);
Network network_from_json_string(const std::string& text);

}  // namespace requnet
