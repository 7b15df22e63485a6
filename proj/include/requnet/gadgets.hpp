/// Constructors for the explicit ReQU building-block networks: identity,
/// products, multiplication by a large constant, and the banks that emit all
/// B-splines of a clamped knot vector. Each constructor returns the network
/// together with its declared size budget; the budget is checked at
/// construction and violations are hard errors.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "requnet/builder.hpp"
#include "requnet/network.hpp"

namespace requnet {

struct Gadget {
    Network net;
    int declared_depth = 0;
    Architecture declared_arch;
    std::int64_t declared_nonzero_budget = 0;
    std::string lemma_tag;
};

/// Coordinate-wise identity on R^width; one hidden layer, four neurons and
/// at most 13 nonzeros per coordinate.
Gadget identity_gadget(int width);

/// (x1, x2) -> x1 * x2 via x1x2 = ((x1+x2)^2 - (x1-x2)^2) / 4; class (2,4,1).
Gadget product2();

/// (x1, ..., xk) -> x1 * ... * xk, k >= 2. Inputs are padded with constant
/// ones to the next power of two and multiplied pairwise over ceil(log2 k)
/// stages; at most 5 * 4^ceil(log2 k) nonzeros.
Gadget product_k(int k);

/// x -> M * x for |M| <= 4^(4^L), L >= 1, with 2L+2 hidden layers of widths
/// (5, ..., 5, 4) and at most 60L+38 nonzeros. The factor M is split across
/// the hidden layers as staged multipliers fed by a squaring chain, which
/// keeps every weight in [-1, 1] and the polarization error per stage small.
Gadget const_mult(double M, int L);

/// x -> (x, K, B_1^{2,K}(x), ..., B_{K+2q-2}^{2,K}(x)) for x in [0, 1];
/// 4 hidden layers, at most 72(K+2q) nonzeros.
Gadget bspline_net_quadratic(int q, int K);

/// x -> (x, K, B_1^{q,K}(x), ..., B_{q+K}^{q,K}(x)) for x in [0, 1];
/// 4+2(q-2) hidden layers, at most 72q(K+2q) nonzeros. Starts from the
/// quadratic bank and lifts one degree per pair of layers through the
/// two-term recursion.
Gadget bspline_net(int q, int K);

/// Gadget JSON: the network document plus a lemma_tag field.
std::string to_json_string(const Gadget& g);

namespace build_detail {

/// Per-coordinate spline-bank state while a network is being assembled:
/// read-outs for x, for K (as the neuron triple behind K/4), and for every
/// unnormalized B-spline of the current degree (empty combo = identically 0,
/// indices 1..K+2q-degree stored from slot 0).
struct BankState {
    Combo x;
    std::array<int, 3> k_triple{};
    std::vector<Combo> splines;
};

/// Emits d parallel spline banks (one per input coordinate) into the
/// assembler; used by bspline_net and by the spline compiler. The slot range
/// is sized for degree q; `degree` (2 <= degree <= q, default q) selects how
/// far the recursion lift runs, so degree 2 yields the quadratic bank
/// B_1^{2,K} .. B_{K+2q-2}^{2,K}.
std::vector<BankState> emit_spline_banks(Assembler& a, int q, int K, int d, int degree = -1);

/// Read-out of the constant K from a bank's k_triple (over the layer that
/// contains the triple).
Combo k_readout(const BankState& bank);

void validate_gadget(const Gadget& g);

}  // namespace build_detail

}  // namespace requnet
