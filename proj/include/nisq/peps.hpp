#pragma once

#include <span>
#include <string>
#include <vector>

#include "nisq/circuit.hpp"

namespace nisq {

/// (n_h - 2)(n_v - 2) D^{min(n_h, n_v) + 3}; requires n_h, n_v >= 3.
double estimate_cost(int n_h, int n_v, int bond_dim);

/// Exact PEPS on an n_h (columns) x n_v (rows) grid. Qubit index = row * n_h + col.
/// Site tensors A^sigma_{l,r,u,d} are stored as 2 x (l r u d) matrices, d fastest.
class PEPSState {
  public:
    static PEPSState zero_grid(int n_h, int n_v, double cost_budget = 1e12);

    int n_h() const { return n_h_; }
    int n_v() const { return n_v_; }
    int n_qubits() const { return n_h_ * n_v_; }
    int qubit(int row, int col) const { return row * n_h_ + col; }

    /// Bond between horizontally adjacent (row, col) and (row, col + 1).
    int h_bond(int row, int col) const { return h_[row * (n_h_ - 1) + col]; }
    /// Bond between vertically adjacent (row, col) and (row + 1, col).
    int v_bond(int row, int col) const { return v_[row * n_h_ + col]; }
    int max_bond_dim() const;
    /// Complex numbers stored across all site tensors.
    std::size_t stored_elements() const;

    void apply_1q(const Matrix& u, int site);
    /// Exact update; returns the Schmidt rank multiplied into the shared bond.
    int apply_2q(const Matrix& u, int site_a, int site_b);
    void apply(const Gate& gate, std::span<const double> params = {});
    void apply_circuit(const Circuit& circuit, std::span<const double> params = {});

    enum class Order { Columns, Rows };
    cplx amplitude(const std::string& bits, Order order = Order::Columns) const;

  private:
    struct Site {
        int l = 1, r = 1, u = 1, d = 1;
        Matrix a;  // 2 x (l*r*u*d)
    };
    Site& site(int q) { return sites_[q]; }
    int& bond_between(int qa, int qb);
    double current_cost(int bond_dim) const;

    int n_h_ = 0, n_v_ = 0;
    double budget_ = 1e12;
    std::vector<Site> sites_;
    std::vector<int> h_, v_;
};

inline PEPSState init_zero_grid(int n_h, int n_v) { return PEPSState::zero_grid(n_h, n_v); }

}  // namespace nisq
