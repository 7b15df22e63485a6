#include "requnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace requnet {

int Architecture::width() const {
    int w = 0;
    for (int d : dims) w = std::max(w, d);
    return w;
}

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<WeightEntry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("SparseMatrix: dimensions must be positive");
    std::sort(entries_.begin(), entries_.end(), [](const WeightEntry& a, const WeightEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_)
            throw std::invalid_argument("SparseMatrix: entry out of shape");
        if (e.value == 0.0)
            throw std::invalid_argument("SparseMatrix: explicit zero entry");
        if (i > 0 && entries_[i - 1].row == e.row && entries_[i - 1].col == e.col)
            throw std::invalid_argument("SparseMatrix: duplicate entry");
    }
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
}

void SparseMatrix::accumulate(std::span<const double> x, std::span<double> y) const {
    for (const auto& e : entries_) y[static_cast<size_t>(e.row)] += e.value * x[static_cast<size_t>(e.col)];
}

void SparseMatrix::accumulate_rows(const std::vector<double>& x, int k, std::vector<double>& y) const {
    for (const auto& e : entries_) {
        const double* src = x.data() + static_cast<size_t>(e.col) * k;
        double* dst = y.data() + static_cast<size_t>(e.row) * k;
        for (int t = 0; t < k; ++t) dst[t] += e.value * src[t];
    }
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
    std::map<std::pair<int, int>, double> acc;
    // group b by row for the walk over a's entries
    std::vector<std::vector<const WeightEntry*>> by_row(static_cast<size_t>(b.rows()));
    for (const auto& e : b.entries()) by_row[static_cast<size_t>(e.row)].push_back(&e);
    for (const auto& ea : a.entries())
        for (const WeightEntry* eb : by_row[static_cast<size_t>(ea.col)])
            acc[{ea.row, eb->col}] += ea.value * eb->value;
    std::vector<WeightEntry> entries;
    entries.reserve(acc.size());
    for (const auto& [rc, v] : acc)
        if (v != 0.0) entries.push_back({rc.first, rc.second, v});
    return SparseMatrix(a.rows(), b.cols(), std::move(entries));
}

Network::Network(Architecture arch, std::vector<SparseMatrix> weights,
                 std::vector<std::vector<double>> shifts)
    : arch_(std::move(arch)), weights_(std::move(weights)), shifts_(std::move(shifts)) {
    if (arch_.dims.size() < 2) throw std::invalid_argument("Network: architecture too short");
    for (int d : arch_.dims)
        if (d <= 0) throw std::invalid_argument("Network: nonpositive layer width");
    int L = arch_.hidden_depth();
    if (static_cast<int>(weights_.size()) != L + 1)
        throw std::invalid_argument("Network: expected L+1 weight matrices");
    if (static_cast<int>(shifts_.size()) != L)
        throw std::invalid_argument("Network: expected L shift vectors");
    for (int l = 0; l <= L; ++l) {
        const auto& w = weights_[static_cast<size_t>(l)];
        if (w.rows() != arch_.dims[static_cast<size_t>(l) + 1] ||
            w.cols() != arch_.dims[static_cast<size_t>(l)])
            throw std::invalid_argument("Network: weight matrix shape mismatch");
        if (w.max_abs() > 1.0)
            throw std::invalid_argument("Network: weight entry outside [-1, 1]");
    }
    for (int l = 0; l < L; ++l) {
        const auto& v = shifts_[static_cast<size_t>(l)];
        if (static_cast<int>(v.size()) != arch_.dims[static_cast<size_t>(l) + 1])
            throw std::invalid_argument("Network: shift vector length mismatch");
        for (double s : v)
            if (std::abs(s) > 1.0)
                throw std::invalid_argument("Network: shift entry outside [-1, 1]");
    }
}

std::vector<double> Network::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_width())
        throw std::invalid_argument("forward: input width mismatch");
    int L = hidden_depth();
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (int l = 0; l <= L; ++l) {
        next.assign(static_cast<size_t>(arch_.dims[static_cast<size_t>(l) + 1]), 0.0);
        weights_[static_cast<size_t>(l)].accumulate(cur, next);
        if (l < L) {
            const auto& v = shifts_[static_cast<size_t>(l)];
            for (size_t i = 0; i < next.size(); ++i) {
                double t = next[i] - v[i];
                next[i] = t > 0.0 ? t * t : 0.0;
            }
        }
        cur.swap(next);
    }
    return cur;
}

NetworkAudit Network::audit() const {
    NetworkAudit a;
    a.hidden_depth = hidden_depth();
    a.width = arch_.width();
    a.nonzero = 0;
    a.max_abs_weight = 0.0;
    for (const auto& w : weights_) {
        a.nonzero += w.nonzero();
        a.max_abs_weight = std::max(a.max_abs_weight, w.max_abs());
    }
    for (const auto& v : shifts_)
        for (double s : v)
            if (s != 0.0) {
                ++a.nonzero;
                a.max_abs_weight = std::max(a.max_abs_weight, std::abs(s));
            }
    return a;
}

namespace {

// Four-neuron identity block pattern: x = ((x+1)^2 - (x-1)^2) / 4 realized
// with shifts (-1, -1, +1, +1) and signs (+, -, +, -) on the input.
SparseMatrix identity_block_in(const SparseMatrix& base) {
    // rows: for each base row r, four copies +r, -r, +r, -r
    std::vector<WeightEntry> entries;
    entries.reserve(base.entries().size() * 4);
    for (const auto& e : base.entries())
        for (int t = 0; t < 4; ++t) {
            double sign = (t % 2 == 0) ? 1.0 : -1.0;
            entries.push_back({4 * e.row + t, e.col, sign * e.value});
        }
    return SparseMatrix(base.rows() * 4, base.cols(), std::move(entries));
}

// With input signs (+, -, +, -) these shifts give the four pieces
// s(y+1), s(-y-1), s(y-1), s(1-y), and y = ((y+1)^2 - (y-1)^2)/4 is the
// quarter combination (+, +, -, -) of them.
std::vector<double> identity_block_shifts(int coords) {
    std::vector<double> v(static_cast<size_t>(4 * coords));
    for (int c = 0; c < coords; ++c) {
        v[static_cast<size_t>(4 * c) + 0] = -1.0;
        v[static_cast<size_t>(4 * c) + 1] = 1.0;
        v[static_cast<size_t>(4 * c) + 2] = 1.0;
        v[static_cast<size_t>(4 * c) + 3] = -1.0;
    }
    return v;
}

SparseMatrix identity_block_out(int coords) {
    std::vector<WeightEntry> entries;
    entries.reserve(static_cast<size_t>(4 * coords));
    for (int c = 0; c < coords; ++c) {
        entries.push_back({c, 4 * c + 0, 0.25});
        entries.push_back({c, 4 * c + 1, 0.25});
        entries.push_back({c, 4 * c + 2, -0.25});
        entries.push_back({c, 4 * c + 3, -0.25});
    }
    return SparseMatrix(coords, 4 * coords, std::move(entries));
}

}  // namespace

Network concat(const Network& g, const Network& h) {
    if (g.output_width() != h.input_width())
        throw std::invalid_argument("concat: interface width mismatch");
    int Lg = g.hidden_depth(), Lh = h.hidden_depth();

    SparseMatrix spliced = multiply(h.weight(0), g.weight(Lg));
    bool direct = spliced.max_abs() <= 1.0;

    Architecture arch;
    std::vector<SparseMatrix> weights;
    std::vector<std::vector<double>> shifts;
    arch.dims.assign(g.arch().dims.begin(), g.arch().dims.end() - 1);
    for (int l = 0; l < Lg; ++l) {
        weights.push_back(g.weight(l));
        shifts.push_back(g.shift(l));
    }
    if (direct) {
        weights.push_back(std::move(spliced));
    } else {
        int w = g.output_width();
        arch.dims.push_back(4 * w);
        weights.push_back(identity_block_in(g.weight(Lg)));
        shifts.push_back(identity_block_shifts(w));
        weights.push_back(multiply(h.weight(0), identity_block_out(w)));
    }
    arch.dims.insert(arch.dims.end(), h.arch().dims.begin() + 1, h.arch().dims.end());
    for (int l = 0; l < Lh; ++l) {
        shifts.push_back(h.shift(l));
        weights.push_back(h.weight(l + 1));
    }
    return Network(std::move(arch), std::move(weights), std::move(shifts));
}

namespace {

Network stack(const Network& f, const Network& g, bool shared_input) {
    if (f.hidden_depth() != g.hidden_depth())
        throw std::invalid_argument("parallel: depth mismatch");
    if (shared_input && f.input_width() != g.input_width())
        throw std::invalid_argument("parallel: input width mismatch");
    int L = f.hidden_depth();
    Architecture arch;
    arch.dims.resize(f.arch().dims.size());
    for (size_t i = 0; i < arch.dims.size(); ++i)
        arch.dims[i] = f.arch().dims[i] + g.arch().dims[i];
    if (shared_input) arch.dims[0] = f.input_width();

    std::vector<SparseMatrix> weights;
    std::vector<std::vector<double>> shifts;
    for (int l = 0; l <= L; ++l) {
        const auto& wf = f.weight(l);
        const auto& wg = g.weight(l);
        int row_off = wf.rows();
        int col_off = (l == 0 && shared_input) ? 0 : wf.cols();
        std::vector<WeightEntry> entries(wf.entries());
        entries.reserve(entries.size() + wg.entries().size());
        for (const auto& e : wg.entries())
            entries.push_back({e.row + row_off, e.col + col_off, e.value});
        weights.emplace_back(wf.rows() + wg.rows(), col_off + wg.cols(), std::move(entries));
    }
    for (int l = 0; l < L; ++l) {
        std::vector<double> v(f.shift(l));
        v.insert(v.end(), g.shift(l).begin(), g.shift(l).end());
        shifts.push_back(std::move(v));
    }
    return Network(std::move(arch), std::move(weights), std::move(shifts));
}

}  // namespace

Network parallel(const Network& f, const Network& g) { return stack(f, g, true); }

Network parallel_disjoint(const Network& f, const Network& g) { return stack(f, g, false); }

Network pad_depth(const Network& net, int target_hidden) {
    if (target_hidden < net.hidden_depth())
        throw std::invalid_argument("pad_depth: target below current depth");
    Network out = net;
    while (out.hidden_depth() < target_hidden) {
        int L = out.hidden_depth();
        int w = out.output_width();
        Architecture arch = out.arch();
        arch.dims.insert(arch.dims.end() - 1, 4 * w);
        std::vector<SparseMatrix> weights;
        std::vector<std::vector<double>> shifts;
        for (int l = 0; l < L; ++l) {
            weights.push_back(out.weight(l));
            shifts.push_back(out.shift(l));
        }
        weights.push_back(identity_block_in(out.weight(L)));
        shifts.push_back(identity_block_shifts(w));
        weights.push_back(identity_block_out(w));
        out = Network(std::move(arch), std::move(weights), std::move(shifts));
    }
    return out;
}

std::string to_json_string(const Network& net) {
    nlohmann::json j;
    j["dims"] = net.arch().dims;
    nlohmann::json layers = nlohmann::json::array();
    int L = net.hidden_depth();
    for (int l = 0; l <= L; ++l) {
        nlohmann::json layer;
        nlohmann::json w = nlohmann::json::array();
        for (const auto& e : net.weight(l).entries())
            w.push_back(nlohmann::json::array({e.row, e.col, e.value}));
        layer["w"] = std::move(w);
        layer["v"] = (l == 0) ? std::vector<double>{} : net.shift(l - 1);
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump();
}

Network network_from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Architecture arch;
    arch.dims = j.at("dims").get<std::vector<int>>();
    std::vector<SparseMatrix> weights;
    std::vector<std::vector<double>> shifts;
    const auto& layers = j.at("layers");
    for (size_t l = 0; l < layers.size(); ++l) {
        std::vector<WeightEntry> entries;
        for (const auto& t : layers[l].at("w"))
            entries.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<double>()});
        weights.emplace_back(arch.dims.at(l + 1), arch.dims.at(l), std::move(entries));
        if (l > 0) shifts.push_back(layers[l].at("v").get<std::vector<double>>());
    }
    return Network(std::move(arch), std::move(weights), std::move(shifts));
}

}  // namespace requnet
