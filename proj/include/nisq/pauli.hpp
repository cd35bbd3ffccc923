#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nisq/circuit.hpp"

namespace nisq {

/// Word over {I,X,Y,Z}; letter k acts on qubit k. Stored as 0=I,1=X,2=Y,3=Z.
struct PauliString {
    std::vector<std::uint8_t> letters;
    double coefficient = 1.0;

    PauliString() = default;
    PauliString(std::string_view word, double coeff = 1.0);

    int size() const { return static_cast<int>(letters.size()); }
    std::string word() const;
    bool is_identity() const;

    /// Bit masks in the amplitude-index convention (qubit 0 = most significant).
    std::uint64_t x_mask() const;
    std::uint64_t z_mask() const;

    bool commutes_with(const PauliString& other) const;
    Matrix dense() const;
    bool operator==(const PauliString&) const = default;
};

/// Pauli word with a phase in {1, i, -1, -i}, encoded as power of i.
struct PhasedPauli {
    PauliString pauli;
    int phase_power = 0;  // phase = i^phase_power

    cplx phase() const;
};

/// Real-weighted sum of Pauli strings.
struct Observable {
    std::vector<PauliString> terms;

    Observable() = default;
    explicit Observable(std::vector<PauliString> t) : terms(std::move(t)) {}

    int width() const { return terms.empty() ? 0 : terms.front().size(); }
    Matrix dense() const;
};

/// "coeff WORD" per line; blank lines and // comments ignored.
Observable parse_observable(std::string_view text);
Observable load_observable(const std::string& path);

/// Pauli product a*b with phase tracking.
PhasedPauli multiply(const PhasedPauli& a, const PhasedPauli& b);

/// C P C^dagger for a Clifford gate in {I,H,S,Sdg,X,Y,Z,CX,CZ,SWAP}. Throws InputError otherwise.
PhasedPauli pauli_apply_conjugation(const PhasedPauli& p, const Gate& clifford);
PhasedPauli pauli_apply_conjugation(const PauliString& p, const Gate& clifford);

bool is_clifford_kind(GateKind kind);

}  // namespace nisq
