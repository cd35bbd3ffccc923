#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/coupling.hpp"
#include "nisq/fit.hpp"
#include "nisq/noise.hpp"

namespace nisq {

/// Default sequence lengths 2, 4, ..., 256.
std::vector<int> default_lengths();

/// Exact (shots = 0) or sampled outcome distribution of a circuit under a noise model,
/// readout confusion included.
std::vector<double> noisy_distribution(const Circuit& circuit, const NoiseModel& noise, int shots, Rng& rng);

// ---------------------------------------------------------------- randomized benchmarking

struct RBConfig {
    int n = 1;
    std::vector<int> lengths = default_lengths();
    int sequences = 30;  // K_m
    int shots = 1000;    // 0 = exact survival probabilities
    std::uint64_t seed = 1;
};

struct RBResult {
    DecayFit fit;
    double error_rate = 0.0;                   // (2^n - 1)/2^n (1 - p)
    std::vector<std::vector<double>> survivals;  // [length][sequence]
    bool fit_ok = true;
    std::string fit_error;
};

/// m uniformly random Cliffords followed by the inverting Clifford. Each Clifford is one
/// raw gate (kind "unitary") on qubits 0..n-1, so per-Clifford noise keys on "unitary".
Circuit rb_sequence(int n, int m, Rng& rng);

RBResult rb_run(const RBConfig& config, const NoiseModel& noise);

// ---------------------------------------------------------------- cross-entropy benchmarking

/// pi/2 rotation about the equatorial axis at angle k pi/4 (k = 0..7).
Gate xeb_gate(int k, int qubit);

/// H(p, q) = -sum p_i log q_i; q is floored at 1e-300 so zero ideal entries stay finite.
double cross_entropy(const std::vector<double>& p, const std::vector<double>& q);
/// (H(uniform, ideal) - H(measured, ideal)) / (H(uniform, ideal) - H(ideal, ideal)).
double xeb_alpha(const std::vector<double>& measured, const std::vector<double>& ideal);

struct XEBConfig {
    int n = 1;  // 1: single-qubit sequences; 2: cycles of random 1q layer + CZ
    std::vector<int> lengths = default_lengths();
    int sequences = 30;
    int shots = 1000;
    std::uint64_t seed = 1;
};

struct XEBResult {
    std::vector<double> lengths;
    std::vector<double> alphas;  // mean alpha per length
    DecayFit fit;                // 1q: gate decay; 2q: cycle decay
    double p = 1.0;              // decay of the benchmarked gate
    double r = 0.0;              // (N - 1)/N (1 - p)
    double r_pauli = 0.0;        // (N - 1)/N r
    std::vector<DecayFit> single_qubit_fits;  // 2q mode: simultaneous 1q references
    bool fit_ok = true;  // false: some fit failed and p is left at 1
    std::string fit_error;
};

XEBResult xeb_run(const XEBConfig& config, const NoiseModel& noise);

// ---------------------------------------------------------------- random circuit sampling

/// Two-qubit pattern for cycle i: "ABCDCDAB"[i mod 8].
char rqc_pattern(int cycle);
/// Edges of a rows x cols grid in pattern A (horizontal, even column), B (horizontal, odd
/// column), C (vertical, even row) or D (vertical, odd row). Qubit index r * cols + c.
std::vector<std::pair<int, int>> rqc_pattern_edges(int rows, int cols, char pattern);

/// m cycles of (random layer of sqrt X / sqrt Y / sqrt W, patterned CZ layer) and a final
/// single-qubit layer; no qubit repeats its previous single-qubit gate.
Circuit rqc_generate(int rows, int cols, int cycles, Rng& rng);

struct XEBFidelity {
    double fidelity = 0.0;
    double std_error = 0.0;
};

/// F = 2^n <p(x_i)> - 1 with ideal probabilities from the state-vector simulator (n <= 20).
XEBFidelity linear_xeb_fidelity(const Circuit& circuit, const std::vector<std::string>& samples);
XEBFidelity linear_xeb_fidelity(const std::vector<double>& ideal, const std::vector<std::uint64_t>& samples);

// ---------------------------------------------------------------- quantum volume

/// Haar-random unitary by Ginibre sampling and QR with the phase fix.
Matrix haar_unitary(int dim, Rng& rng);
/// haar_unitary(4) rescaled to unit determinant.
Matrix haar_su4(Rng& rng);

/// (|Tr(U^dagger V)|^2 / d + 1) / (d + 1).
double average_gate_fidelity(const Matrix& u, const Matrix& v);

/// m layers, each a random qubit permutation followed by SU(4) gates on consecutive pairs.
Circuit qv_circuit(int m, Rng& rng);

/// Median (mean of the two middle values) and heavy-set membership p > median.
double median_probability(std::vector<double> probs);
std::vector<bool> heavy_set(const std::vector<double>& probs);

struct QVConfig {
    int min_width = 2;
    int max_width = 5;
    int circuits = 100;
    int shots = 0;
    std::uint64_t seed = 1;
    /// When set, each width-m circuit is routed onto topology(m) before execution and the
    /// routed unitary is checked against the original (1 - F_avg <= 1e-10).
    std::function<CouplingGraph(int)> topology;
};

struct QVWidth {
    int width = 0;
    std::vector<double> heavy;  // h_U per circuit
    double mean_heavy = 0.0;
    bool passed = false;        // mean h_U > 2/3
    int swaps = 0;              // total routing SWAPs
};

struct QVResult {
    std::vector<QVWidth> widths;
    int log2_volume = 0;  // largest passing width
};

QVResult qv_run(const QVConfig& config, const NoiseModel& noise);

// ---------------------------------------------------------------- mirror circuits

struct MirrorCircuit {
    Circuit circuit;
    std::string expected;  // ideal outcome
};

/// Random Pauli-eigenstate preparation, C, random Pauli layer, C^-1, un-preparation.
/// The outcome is predicted by Pauli tracking. C must use Clifford kinds only.
MirrorCircuit mirror_circuit(const Circuit& base, Rng& rng);

/// (S - 1/2^w) / (1 - 1/2^w).
double mirror_polarization(double success, int width);

struct MirrorConfig {
    int repetitions = 20;
    int shots = 0;
    std::uint64_t seed = 1;
};

struct MirrorResult {
    double polarization = 0.0;  // mean over repetitions
    std::vector<double> success;
    std::vector<double> polarizations;
};

MirrorResult mirror_run(const Circuit& base, const NoiseModel& noise, const MirrorConfig& config);

}  // namespace nisq
