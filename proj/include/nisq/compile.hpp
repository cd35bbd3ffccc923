#pragma once

#include <cstdint>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/coupling.hpp"

namespace nisq {

/// Square matrix over GF(2), row-major.
class F2Matrix {
  public:
    F2Matrix() = default;
    explicit F2Matrix(int n) : n_(n), bits_(static_cast<std::size_t>(n) * n, 0) {}
    static F2Matrix identity(int n);
    static F2Matrix from_rows(const std::vector<std::vector<int>>& rows);

    int size() const { return n_; }
    std::uint8_t operator()(int r, int c) const { return bits_[static_cast<std::size_t>(r) * n_ + c]; }
    std::uint8_t& operator()(int r, int c) { return bits_[static_cast<std::size_t>(r) * n_ + c]; }

    void add_row(int dst, int src);  // row dst ^= row src
    F2Matrix operator*(const F2Matrix& rhs) const;
    bool operator==(const F2Matrix&) const = default;
    bool invertible() const;

  private:
    int n_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// x -> M x for a CX-only circuit; CX(c, t) adds row c into row t.
F2Matrix cnot_to_matrix(const Circuit& circuit);

/// Gaussian-elimination synthesis without connectivity constraints; at most n^2 gates.
Circuit matrix_to_cnot(const F2Matrix& m);

struct FuseOptions {
    /// Multiply single-qubit runs into an adjacent two-qubit gate on the same wire.
    bool absorb_into_two_qubit = false;
};

/// Merges runs of single-qubit gates on a wire into one raw gate; runs equal to the
/// identity up to phase are dropped. Lone gates are kept as they are.
Circuit fuse_gates(const Circuit& circuit, FuseOptions options = {});

/// Logical -> physical bijection.
struct Layout {
    std::vector<int> l2p;

    static Layout identity(int n);
    int size() const { return static_cast<int>(l2p.size()); }
    int physical(int logical) const { return l2p.at(logical); }
    std::vector<int> p2l() const;
    void validate() const;
    bool operator==(const Layout&) const = default;
};

struct RouteOptions {
    double lookahead_weight = 0.0;  // weight of the next layer in the SWAP score
};

struct RouteResult {
    Circuit circuit;  // acts on physical qubits
    Layout initial;
    Layout final;
    int swaps = 0;
};

/// Greedy front-layer router. Every emitted two-qubit gate lies on a graph edge.
/// Gates on more than two qubits are rejected.
RouteResult route(const Circuit& circuit, const CouplingGraph& graph, const Layout& initial);
RouteResult route(const Circuit& circuit, const CouplingGraph& graph, const Layout& initial, RouteOptions options);
RouteResult route(const Circuit& circuit, const CouplingGraph& graph);

/// Relabels qubit q to map[q] on a circuit of width `width`.
Circuit relabel_qubits(const Circuit& circuit, const std::vector<int>& map, int width);

}  // namespace nisq
