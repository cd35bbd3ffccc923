#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/pauli.hpp"

namespace nisq {

/// Default cap on the bytes a single dense state may occupy (4 GiB).
std::uint64_t memory_budget();
void set_memory_budget(std::uint64_t bytes);

/// Number of basis pairs gathered per batched matrix product in the gate kernels.
int kernel_block_size();
void set_kernel_block_size(int block);

/// Dense 2^n amplitude vector, index bit (n-1-q) holds qubit q.
class StateVector {
  public:
    /// |0...0>; throws BudgetError when 2^n amplitudes exceed `budget_bytes`.
    static StateVector zero(int n_qubits, std::uint64_t budget_bytes = memory_budget());
    static StateVector from_amplitudes(std::vector<cplx> amplitudes);

    StateVector(const StateVector& other);
    StateVector(StateVector&& other) noexcept;
    StateVector& operator=(const StateVector& other);
    StateVector& operator=(StateVector&& other) noexcept;
    ~StateVector();

    int n_qubits() const { return n_; }
    std::uint64_t dim() const { return amps_.size(); }
    std::span<cplx> data() { return amps_; }
    std::span<const cplx> data() const { return amps_; }
    cplx operator[](std::uint64_t i) const { return amps_[i]; }

    void apply(const Gate& gate, std::span<const double> params = {});
    /// Applies an arbitrary (not necessarily unitary) 2^k x 2^k matrix in place.
    void apply_matrix(const Matrix& m, std::span<const int> targets);
    void apply_circuit(const Circuit& circuit, std::span<const double> params = {});

    cplx amplitude(const std::string& bits) const;
    double expectation(const PauliString& p) const;
    double expectation(const Observable& obs) const;
    /// <this| P |other> without materializing P|other>.
    cplx pauli_matrix_element(const PauliString& p, const StateVector& other) const;

    std::vector<double> probabilities() const;
    std::vector<std::uint64_t> sample_indices(int shots, Rng& rng) const;
    std::vector<std::string> sample(int shots, Rng& rng) const;
    /// Projective Z measurement of qubit q with collapse and renormalization.
    int measure_qubit(int q, Rng& rng);

    double norm2() const;
    cplx inner(const StateVector& other) const;  // <this|other>

    // Allocation accounting for the live full-state buffer count.
    static int live_buffers();
    static int peak_buffers();
    static void reset_peak();

  private:
    explicit StateVector(int n, std::vector<cplx> amps);
    int n_ = 0;
    std::vector<cplx> amps_;
};

// Free-function surface mirroring the operation names.
inline StateVector init_zero(int n) { return StateVector::zero(n); }
StateVector simulate(const Circuit& circuit, std::span<const double> params = {});
/// Full 2^n x 2^n unitary of a circuit (column j = circuit applied to |j>).
Matrix circuit_unitary(const Circuit& circuit, std::span<const double> params = {});

/// In-place kernel on a raw amplitude buffer of n qubits. Exposed so the density
/// simulator can reuse it on the 2n-qubit squashed vector.
void apply_matrix_inplace(std::span<cplx> amps, int n, const Matrix& m, std::span<const int> targets);

struct Bipartition {
    std::vector<int> a;
    std::vector<int> b;
};

struct SFResult {
    cplx amplitude;
    std::uint64_t path_count = 0;
    int cross_gates = 0;
};

/// Operator-Schmidt split of a gate across two qubit groups: Q = sum_s U_s (x) V_s.
struct SplitGate {
    std::vector<Matrix> left;   // act on the gate's targets that lie in group A (gate order)
    std::vector<Matrix> right;  // act on the targets in group B
    std::vector<int> left_targets;
    std::vector<int> right_targets;
    int rank() const { return static_cast<int>(left.size()); }
};
SplitGate split_gate(const Matrix& m, std::span<const int> targets, std::span<const int> left_qubits,
                     double cutoff = 1e-12);

/// Schroedinger-Feynman amplitude <bits|C|0>: each cross gate is split by SVD
/// and the two halves are simulated per path.
SFResult sf_amplitude(const Circuit& circuit, const std::string& bits, const Bipartition& part,
                      std::span<const double> params = {}, std::uint64_t path_budget = 1u << 20);

}  // namespace nisq
