#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nisq/circuit.hpp"
#include "nisq/coupling.hpp"
#include "nisq/pauli.hpp"

namespace nisq {

enum class Backend { SV, MPS };

struct LossSpec {
    Circuit circuit;
    Observable hamiltonian;
    Backend backend = Backend::SV;
    int mps_max_bond = 64;
};

/// <0| C(theta)^dagger H C(theta) |0>.
double loss(const LossSpec& spec, std::span<const double> theta);

/// Count of loss() calls since the last reset (cost accounting in tests).
std::uint64_t loss_evaluations();
void reset_loss_evaluations();

/// Forward differences, m + 1 loss evaluations.
std::vector<double> grad_fd1(const LossSpec& spec, std::span<const double> theta, double delta);
/// Central differences, 2m loss evaluations.
std::vector<double> grad_fd2(const LossSpec& spec, std::span<const double> theta, double delta);
/// 1/2 [L(+pi/2) - L(-pi/2)] per rotation occurrence, chained through each occurrence's scale.
std::vector<double> grad_pshift(const LossSpec& spec, std::span<const double> theta);
/// Reverse sweep holding exactly two full state buffers. State-vector backend only.
std::vector<double> grad_adjoint(const LossSpec& spec, std::span<const double> theta);

enum class GradMethod { FD1, FD2, PShift, Adjoint };
GradMethod grad_method_from_name(const std::string& name);
std::vector<double> gradient(const LossSpec& spec, std::span<const double> theta, GradMethod method,
                             double delta = 1e-4);

struct OptimizerConfig {
    double eta = 0.1;
    int max_iterations = 200;
    GradMethod method = GradMethod::Adjoint;
    double delta = 1e-4;
    double tolerance = 1e-12;  // stop when |loss change| falls below this
};

struct OptimizeTrace {
    std::vector<std::vector<double>> thetas;  // iterate k before the k-th update
    std::vector<double> losses;
    bool converged = false;
};

/// Plain gradient descent theta <- theta - eta * grad. Throws NumericalError when the
/// loss rises for 10 consecutive steps.
OptimizeTrace optimize(const LossSpec& spec, std::vector<double> theta0, const OptimizerConfig& config);

/// Alternating rotation layers and a CX entangler over every coupling edge.
/// Parameters are named t0, t1, ... in layer-major, qubit, axis order.
Circuit hardware_efficient_ansatz(int n, int layers, const std::vector<GateKind>& axes, const CouplingGraph& graph);

struct MaxCutProblem {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    MaxCutProblem(int n_vertices, std::vector<std::pair<int, int>> edge_list);
    /// sum over edges of (1 - Z_j Z_k) / 2.
    Observable cost_hamiltonian() const;
    int cut_value(const std::string& bits) const;
    /// Exhaustive maximum; n <= 24.
    int max_cut() const;
};

MaxCutProblem parse_maxcut(std::string_view edge_list);
MaxCutProblem load_maxcut(const std::string& path);

/// |+>^n followed by p rounds of CX-Rz-CX per edge and an Rx mixer layer.
/// Slots: gamma_l = 2l, beta_l = 2l + 1.
Circuit qaoa_circuit(const MaxCutProblem& problem, int p);

struct QAOAResult {
    std::vector<double> gammas, betas;
    double expected_cut = 0.0;
    std::string best_bitstring;
    int best_cut = 0;
    OptimizeTrace trace;
};

/// Coarse grid start, gradient ascent on <H_C>, then `shots` samples of the final state.
QAOAResult qaoa_maxcut(const MaxCutProblem& problem, int p, const OptimizerConfig& config, int shots = 1000,
                       std::uint64_t seed = 1);

}  // namespace nisq
