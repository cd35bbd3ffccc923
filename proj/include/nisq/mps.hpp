#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/pauli.hpp"

namespace nisq {

struct TruncationReport {
    double discarded_weight = 0.0;  // sum of dropped lambda^2, relative to the pre-truncation total
    int bond_dim = 0;               // size of the updated bond
};

/// Right-canonical matrix product state. Site j holds B[j][sigma] of shape
/// D_{j-1} x D_j; bond j (between sites j and j+1) stores its Schmidt values.
class MPSState {
  public:
    static MPSState product_zero(int n_qubits, int max_bond = 64, double trunc_eps = 0.0);

    int n_qubits() const { return static_cast<int>(sites_.size()); }
    int max_bond() const { return d_cap_; }
    double trunc_eps() const { return eps_; }
    int bond_dim(int bond) const { return static_cast<int>(lambda_[bond].size()); }
    int max_bond_dim() const;
    const RealVector& lambda(int bond) const { return lambda_[bond]; }
    const Matrix& site(int j, int sigma) const { return sites_[j][sigma]; }
    /// Accumulated discarded weight over all two-site updates.
    double total_discarded() const { return discarded_; }

    void apply_1q(const Matrix& u, int site);
    /// `u` acts on (site, site + 1) with `site` as the most significant local bit.
    TruncationReport apply_2q(const Matrix& u, int site);
    /// Arbitrary pair; targets[0] is the most significant local bit of `u`.
    TruncationReport apply_2q_nonadjacent(const Matrix& u, int q0, int q1);
    /// Dispatches 1q and 2q gates; returns the largest discarded weight of the step.
    TruncationReport apply(const Gate& gate, std::span<const double> params = {});
    double apply_circuit(const Circuit& circuit, std::span<const double> params = {});

    cplx amplitude(const std::string& bits) const;
    double expectation(const PauliString& p) const;
    double expectation(const Observable& obs) const;
    std::vector<std::string> sample(int shots, Rng& rng) const;

    /// max over sites of |sum_sigma B B^dagger - I|.
    double right_canonical_error() const;
    /// Dense 2^n vector, for tests on small widths.
    std::vector<cplx> to_dense() const;

  private:
    std::vector<std::array<Matrix, 2>> sites_;
    std::vector<RealVector> lambda_;
    int d_cap_ = 64;
    double eps_ = 0.0;
    double discarded_ = 0.0;
};

inline MPSState init_product(int n, int max_bond = 64, double trunc_eps = 0.0) {
    return MPSState::product_zero(n, max_bond, trunc_eps);
}

}  // namespace nisq
