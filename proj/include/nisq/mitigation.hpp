#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/noise.hpp"
#include "nisq/pauli.hpp"

namespace nisq {

// ---------------------------------------------------------------- zero-noise extrapolation

struct RichardsonResult {
    double estimate = 0.0;
    std::vector<double> gamma;           // gamma_i = prod_{j != i} l_j / (l_j - l_i)
    double variance_amplification = 0.0;  // sum gamma_i^2
};

RichardsonResult zne_richardson(const std::vector<double>& lambdas, const std::vector<double>& values);

/// Two-point exponential fit of A e^{-f mu}: returns A = (v(mu)^lambda / v(lambda mu))^{1/(lambda - 1)}.
double zne_exponential(double value_mu, double value_lambda_mu, double lambda);

/// Least-squares fit of ln|v| to ln A + sum_{i=1..d} f_i l^i; returns sign * A.
double zne_polyexp(const std::vector<double>& lambdas, const std::vector<double>& values, int degree);

struct LeastSquaresZNE {
    double estimate = 0.0;
    std::vector<double> alpha;                  // coefficients in `monomials` order
    std::vector<std::vector<int>> monomials;  // exponent vectors, graded by total degree
};

/// Multi-parameter polynomial fit of total degree <= order; estimate is the constant term.
LeastSquaresZNE zne_least_squares(const std::vector<std::vector<double>>& noise_params,
                                  const std::vector<double>& values, int order);

/// Each two-qubit gate G becomes G (G^dagger G)^n for factor 2n + 1.
Circuit scale_noise_identity_insertion(const Circuit& circuit, int factor);

// ---------------------------------------------------------------- probabilistic error cancellation

struct QuasiProbDecomposition {
    int arity = 1;
    std::vector<int> paulis;  // Pauli word index, first target most significant
    std::vector<double> q;
    double one_norm = 1.0;  // Q = sum |q|

    double overhead() const { return one_norm * one_norm; }
};

/// Inverse of a Pauli channel as a signed mixture of Pauli conjugations.
QuasiProbDecomposition pec_decompose(const Channel& channel);

/// Transfer eigenvalues f_sigma = sum_P r_P (+1 if [P, sigma] = 0 else -1), sigma in word order.
std::vector<double> pauli_transfer_eigenvalues(const Channel& channel);

enum class PECMode {
    Exact,      // each sampled insertion pattern evaluated exactly on the density simulator
    SingleShot  // one noisy trajectory and one measured outcome per sample
};

struct PECResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double one_norm = 1.0;  // product of per-insertion Q
    int samples = 0;
};

/// Monte Carlo over basis insertions sampled with probability |q| / Q, weighted by sign * Q.
/// Every channel in `noise` must be a Pauli channel.
PECResult pec_estimate(const Circuit& circuit, const NoiseModel& noise, const Observable& obs, int samples,
                       std::uint64_t seed, PECMode mode = PECMode::Exact);

/// Plain sampling of `obs` under `noise` with the same estimator shape (weights fixed to 1).
PECResult unmitigated_estimate(const Circuit& circuit, const NoiseModel& noise, const Observable& obs, int samples,
                               std::uint64_t seed, PECMode mode = PECMode::Exact);

// ---------------------------------------------------------------- measurement-error mitigation

/// Column y holds the measured distribution after preparing |y>.
RealMatrix mem_calibrate(const NoiseModel& noise, int m);

struct MEMResult {
    std::vector<double> probabilities;
    std::vector<double> raw;  // before clipping
    bool clipped = false;
    double condition_number = 1.0;
};

MEMResult mem_invert(const RealMatrix& response, const std::vector<double>& p_noisy);

/// Tensor-product response: one 2x2 column-stochastic factor per qubit (qubit 0 most significant).
class TPNResponse {
  public:
    /// p01[i] = P(read 1 | 0), p10[i] = P(read 0 | 1) on qubit i.
    TPNResponse(std::vector<double> p01, std::vector<double> p10);

    int n_qubits() const { return static_cast<int>(factors_.size()); }
    std::vector<double> apply(const std::vector<double>& p) const;
    std::vector<double> invert(const std::vector<double>& p) const;
    RealMatrix dense() const;

  private:
    std::vector<double> act(const std::vector<double>& p, bool inverse) const;
    std::vector<RealMatrix> factors_, inverses_;
};

TPNResponse mem_tpn(const std::vector<double>& p01, const std::vector<double>& p10);

// ---------------------------------------------------------------- state-level estimators

/// Tr(rho^M O) / Tr(rho^M).
double vd_estimate(const Matrix& rho, const Observable& obs, int copies);
double vd_estimate(const SquashedDensityState& state, const Observable& obs, int copies);

struct SymmetryResult {
    double estimate = 0.0;
    double sector_weight = 0.0;  // Tr(Pi_s rho)
    double overhead = 0.0;       // 1 / sector_weight
};

/// Tr(O Pi_s rho) / Tr(Pi_s rho) with Pi_s = (I + s S) / 2.
SymmetryResult symmetry_expand(const Matrix& rho, const Observable& obs, const PauliString& symmetry, int sector);
/// Projects rho onto the sector and renormalizes.
Matrix symmetry_project(const Matrix& rho, const PauliString& symmetry, int sector);

struct QSEResult {
    double energy = 0.0;
    std::vector<cplx> coefficients;
    int kept_dimension = 0;
};

/// Generalized eigenproblem H c = E B c with H_ij = Tr(rho P_i H P_j), B_ij = Tr(rho P_i P_j);
/// directions with B eigenvalue < 1e-10 are projected out.
QSEResult qse_solve(const Matrix& rho, const Observable& hamiltonian, const std::vector<PauliString>& expansion);

// ---------------------------------------------------------------- Clifford data regression

struct CDRModel {
    double slope = 1.0;
    double intercept = 0.0;
    double apply(double noisy) const { return slope * noisy + intercept; }
};

CDRModel cdr_fit(const std::vector<std::pair<double, double>>& noisy_ideal);

/// Training circuit: every rotation angle is moved to one of its two neighbouring multiples
/// of pi/2, chosen at random with probability proportional to proximity; T/Tdg become I or S/Sdg
/// the same way. Other gates are kept.
Circuit cdr_training_circuit(const Circuit& circuit, Rng& rng);

// ---------------------------------------------------------------- Pauli twirling

/// Sandwiches every CX/CZ/SWAP between a random Pauli pair and its conjugated compensation,
/// merging the inserted Paulis into neighbouring bound single-qubit gates.
Circuit pauli_twirl(const Circuit& circuit, Rng& rng);

}  // namespace nisq
