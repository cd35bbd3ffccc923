#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/pauli.hpp"
#include "nisq/statevector.hpp"

namespace nisq {

struct Channel {
    std::string name;
    int arity = 1;
    std::vector<Matrix> kraus;
    /// Set for Pauli-diagonal channels: 4^arity rates indexed by Pauli word
    /// (letters 0=I,1=X,2=Y,3=Z, first target most significant).
    std::optional<std::vector<double>> pauli_rates;

    bool trace_preserving(double tol = 1e-10) const;
};

Channel identity_channel(int arity = 1);
/// rho -> (1-p) rho + p/(4^k - 1) sum_{P != I} P rho P.
Channel depolarizing(double p, int arity = 1);
Channel bit_flip(double p);
Channel phase_flip(double p);
Channel amplitude_damping(double gamma);
Channel pauli_channel(std::vector<double> rates);
Channel unitary_channel(const Matrix& u);
Channel kraus_channel(std::vector<Matrix> kraus, std::string name = "kraus");

/// 2k-qubit matrix acting on (targets, targets') of the squashed vector: sum_s K_s (x) conj(K_s).
Matrix to_superop(const Channel& channel);

/// Classical per-qubit readout confusion: p01 = P(read 1 | 0), p10 = P(read 0 | 1).
struct ReadoutError {
    std::vector<double> p01;
    std::vector<double> p10;

    bool empty() const { return p01.empty(); }
    double p01_of(int q) const { return p01.size() == 1 ? p01[0] : p01.at(q); }
    double p10_of(int q) const { return p10.size() == 1 ? p10[0] : p10.at(q); }
};

/// Channels fire after each gate whose kind name matches a key ("*" matches all).
/// A one-qubit channel attached to a k-qubit gate fires on each target.
struct NoiseModel {
    std::map<std::string, std::vector<Channel>> gates;
    ReadoutError readout;

    bool empty() const { return gates.empty() && readout.empty(); }
    void add(const std::string& kind, Channel channel) { gates[kind].push_back(std::move(channel)); }
    /// (channel, targets) pairs firing after `gate`.
    std::vector<std::pair<const Channel*, std::vector<int>>> after(const Gate& gate) const;
};

NoiseModel parse_noise_model(std::string_view json_text);
NoiseModel load_noise_model(const std::string& path);
std::string noise_model_to_json(const NoiseModel& model);

/// Density operator stored as the 2n-qubit squashed vector rho~[sigma, sigma'].
class SquashedDensityState {
  public:
    static SquashedDensityState zero(int n_qubits, std::uint64_t budget_bytes = memory_budget());
    static SquashedDensityState from_pure(const StateVector& psi);
    static SquashedDensityState from_matrix(const Matrix& rho);

    int n_qubits() const { return n_; }
    const StateVector& squashed() const { return vec_; }
    cplx element(std::uint64_t row, std::uint64_t col) const;

    void apply_unitary(const Matrix& u, std::span<const int> targets);
    void apply(const Gate& gate, std::span<const double> params = {});
    void apply_channel(const Channel& channel, std::span<const int> targets);

    double trace() const;
    double probability(const std::string& bits) const;
    std::vector<double> probabilities() const;
    double expectation(const PauliString& p) const;
    double expectation(const Observable& obs) const;
    /// Dense 2^n x 2^n density matrix (tests and small-n mitigation).
    Matrix density_matrix() const;

  private:
    SquashedDensityState(int n, StateVector v) : n_(n), vec_(std::move(v)) {}
    int n_;
    StateVector vec_;
};

SquashedDensityState run_density(const Circuit& circuit, const NoiseModel& noise,
                                 std::span<const double> params = {});

/// Applies the readout confusion to an exact outcome distribution.
std::vector<double> apply_readout(std::span<const double> probs, int n, const ReadoutError& readout);
/// Flips sampled bits according to the readout confusion.
void apply_readout(std::string& bits, const ReadoutError& readout, Rng& rng);

struct MCResult {
    std::vector<std::string> bitstrings;
    std::vector<double> means;       // per observable, averaged over trajectories
    std::vector<double> std_errors;  // standard error of each mean
};

/// Pauli-insertion Monte Carlo: every attached channel must be a Pauli channel.
/// Each shot draws its own error realization from a seed derived from (seed, shot),
/// so results do not depend on the worker count.
MCResult run_pauli_mc(const Circuit& circuit, const NoiseModel& noise, int shots, std::uint64_t seed,
                      const std::vector<Observable>& observables = {}, std::span<const double> params = {});

}  // namespace nisq
