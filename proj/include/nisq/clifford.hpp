#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/pauli.hpp"

namespace nisq {

/// Images of X_q and Z_q (q = 0..n-1) under conjugation C P C^dagger; fixes C up to phase.
struct Tableau {
    std::vector<PhasedPauli> x_images, z_images;

    static Tableau identity(int n);
    int n_qubits() const { return static_cast<int>(x_images.size()); }
    /// Composes with a gate applied after the current Clifford.
    void then(const Gate& gate);
    void then(const std::vector<Gate>& word);
    std::string key() const;
};

/// The n-qubit Clifford group modulo phase (n = 1: 24 elements, n = 2: 11520), each
/// element stored as a shortest word over {H, S, CX} found by breadth-first search.
class CliffordGroup {
  public:
    static const CliffordGroup& get(int n);

    int n_qubits() const { return n_; }
    int size() const { return static_cast<int>(words_.size()); }
    const std::vector<Gate>& word(int index) const { return words_.at(index); }
    /// Element index of an arbitrary Clifford word (gates from the conjugation-supported set).
    int index_of(const std::vector<Gate>& word) const;
    int index_of(const Tableau& t) const;

  private:
    explicit CliffordGroup(int n);
    int n_;
    std::vector<std::vector<Gate>> words_;
    std::unordered_map<std::string, int> index_;
};

/// Uniform Clifford on qubits 0..n-1; throws InputError for n > 2.
std::vector<Gate> clifford_sample(int n, Rng& rng);
/// Word for the inverse element.
std::vector<Gate> clifford_inverse(const std::vector<Gate>& word, int n);

/// 2^n x 2^n unitary of a Clifford word.
Matrix word_unitary(const std::vector<Gate>& word, int n);

}  // namespace nisq
