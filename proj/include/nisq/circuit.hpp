#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nisq/common.hpp"

namespace nisq {

enum class GateKind {
    I, X, Y, Z, H, S, Sdg, T, Tdg,
    Rx, Ry, Rz,
    CX, CZ, SWAP, CCZ,
    RawMatrix,
};

/// Number of qubits a standard kind acts on (RawMatrix: 0, determined by its payload).
int arity(GateKind kind);
bool is_parametric(GateKind kind);
/// Lower-case grammar token for a kind ("h", "cx", "unitary", ...).
std::string_view kind_name(GateKind kind);
std::optional<GateKind> kind_from_name(std::string_view name);

/// Rotation angle: either a literal, or scale * theta[slot].
struct Param {
    double value = 0.0;
    int slot = -1;
    double scale = 1.0;

    bool symbolic() const { return slot >= 0; }
    double resolve(std::span<const double> theta) const;
    bool operator==(const Param&) const = default;
};

struct Gate {
    GateKind kind = GateKind::I;
    std::vector<int> targets;
    std::optional<Param> param;
    std::shared_ptr<const Matrix> matrix;  // RawMatrix payload only

    static Gate make(GateKind kind, std::vector<int> targets);
    static Gate rotation(GateKind kind, int target, Param param);
    static Gate raw(Matrix unitary, std::vector<int> targets);

    int num_targets() const { return static_cast<int>(targets.size()); }
    bool operator==(const Gate& other) const;
};

class Circuit {
  public:
    Circuit() = default;
    explicit Circuit(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    int n_params() const { return static_cast<int>(param_names_.size()); }
    const std::vector<Gate>& ops() const { return ops_; }
    std::vector<Gate>& mutable_ops() { return ops_; }
    const std::vector<std::string>& param_names() const { return param_names_; }

    /// Validates and appends. Throws InputError on width or slot violations.
    Circuit& add(Gate gate);
    Circuit& add(GateKind kind, std::vector<int> targets) { return add(Gate::make(kind, std::move(targets))); }

    /// Returns the slot for a named parameter, allocating a new one on first use.
    int param_slot(const std::string& name);
    void set_param_names(std::vector<std::string> names) { param_names_ = std::move(names); }

    std::size_t size() const { return ops_.size(); }
    bool operator==(const Circuit& other) const;

  private:
    int n_qubits_ = 0;
    std::vector<Gate> ops_;
    std::vector<std::string> param_names_;
};

/// Dense unitary of a gate; parametric kinds use the half-angle convention
/// Rz(t) = diag(e^{-it/2}, e^{it/2}). Row/column bit order follows `targets`
/// with targets[0] most significant.
Matrix gate_matrix(const Gate& gate, std::span<const double> params = {});

/// Single-qubit 2x2 Pauli matrices indexed 0=I, 1=X, 2=Y, 3=Z.
const Matrix& pauli_matrix(int letter);

/// Reversed op order, each gate replaced by its adjoint.
Circuit inverse(const Circuit& circuit);

/// Replaces every symbolic parameter with its numeric value.
Circuit bind(const Circuit& circuit, std::span<const double> params);

/// Circuit text in the qreg/gate grammar; parse_circuit(render(c)) == c.
std::string render(const Circuit& circuit);
Circuit parse_circuit(std::string_view text);
Circuit load_circuit(const std::string& path);

bool is_unitary(const Matrix& m, double tol = 1e-10);

}  // namespace nisq
