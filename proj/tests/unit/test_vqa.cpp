#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <random>

#include "nisq/statevector.hpp"
#include "nisq/vqa.hpp"
#include "oracle.hpp"

using namespace nisq;

namespace {

LossSpec rx_z(bool with_param = true) {
    LossSpec s;
    s.circuit = Circuit(1);
    if (with_param) {
        const int slot = s.circuit.param_slot("theta");
        s.circuit.add(Gate::rotation(GateKind::Rx, 0, Param{0.0, slot, 1.0}));
    }
    s.hamiltonian = parse_observable("1 Z");
    return s;
}

// Random parametric circuit: rotations on fresh or reused slots (some scaled, some offset),
// interleaved with fixed Cliffords and random 2q unitaries.
LossSpec random_parametric(int n, int n_params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2, 2);
    LossSpec s;
    s.circuit = Circuit(n);
    for (int i = 0; i < n_params; ++i) s.circuit.param_slot("p" + std::to_string(i));
    const GateKind rot[] = {GateKind::Rx, GateKind::Ry, GateKind::Rz};
    for (int i = 0; i < n_params + n_params / 3; ++i) {
        const int slot = i < n_params ? i : static_cast<int>(rng() % n_params);
        const double scale = i < n_params ? 1.0 : u(rng);
        s.circuit.add(Gate::rotation(rot[rng() % 3], rng() % n, Param{u(rng) * (rng() % 2), slot, scale}));
        const int a = rng() % n;
        int b = rng() % n;
        if (n > 1) {
            while (b == a) b = rng() % n;
            switch (rng() % 4) {
                case 0: s.circuit.add(GateKind::CX, {a, b}); break;
                case 1: s.circuit.add(GateKind::CZ, {a, b}); break;
                case 2: s.circuit.add(Gate::raw(oracle::random_unitary(4, rng()), {a, b})); break;
                default: s.circuit.add(GateKind::H, {a});
            }
        }
    }
    s.hamiltonian = oracle::random_observable(n, 5, seed + 1);
    return s;
}

std::vector<double> random_theta(int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<double> t(m);
    for (auto& x : t) x = u(rng);
    return t;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST(Loss, Examples) {
    const LossSpec s = rx_z();
    for (double t : {0.0, 0.4, 1.3, kPi}) EXPECT_NEAR(loss(s, std::vector<double>{t}), std::cos(t), 1e-15);
    EXPECT_EQ(loss(s, std::vector<double>{0.0}), 1.0);
    EXPECT_NEAR(loss(s, std::vector<double>{kPi}), -1.0, 1e-15);
    EXPECT_THROW(loss(s, std::vector<double>{}), InputError);

    const LossSpec r = random_parametric(4, 10, 3);
    const auto th = random_theta(10, 4);
    const Vector psi = oracle::final_state(r.circuit, th);
    const double dense = (psi.adjoint() * oracle::observable_dense(r.hamiltonian) * psi)(0, 0).real();
    EXPECT_NEAR(loss(r, th), dense, 1e-12);
    LossSpec m = r;
    m.backend = Backend::MPS;
    EXPECT_NEAR(loss(m, th), dense, 1e-10);
}

TEST(Loss, IdentityGatesDoNotChangeLoss) {
    LossSpec r = random_parametric(3, 6, 8);
    const auto th = random_theta(6, 9);
    const double before = loss(r, th);
    r.circuit.add(GateKind::I, {1});
    r.circuit.add(Gate::raw(Matrix::Identity(4, 4), {0, 2}));
    EXPECT_EQ(loss(r, th), before);
}

TEST(GradFd1, Examples) {
    const LossSpec s = rx_z();
    const std::vector<double> t{kPi / 2};
    reset_loss_evaluations();
    EXPECT_NEAR(grad_fd1(s, t, 1e-5)[0], -1.0, 1e-4);
    EXPECT_EQ(loss_evaluations(), 2u);
    LossSpec c = random_parametric(3, 4, 2);
    c.hamiltonian = parse_observable("2 III");
    for (double g : grad_fd1(c, random_theta(4, 1), 1e-3)) EXPECT_NEAR(g, 0.0, 1e-10);  // norm rounding only
    // O(delta): halving delta halves the error.
    const std::vector<double> t2{0.7};
    const double e1 = std::abs(grad_fd1(s, t2, 1e-3)[0] + std::sin(0.7));
    const double e2 = std::abs(grad_fd1(s, t2, 5e-4)[0] + std::sin(0.7));
    EXPECT_NEAR(e1 / e2, 2.0, 0.4);
    EXPECT_THROW(grad_fd1(s, t, 0.0), InputError);
}

TEST(GradFd2, Examples) {
    const LossSpec s = rx_z();
    reset_loss_evaluations();
    EXPECT_NEAR(grad_fd2(s, std::vector<double>{kPi / 2}, 1e-3)[0], -1.0, 1e-6);
    EXPECT_EQ(loss_evaluations(), 2u);
    EXPECT_NEAR(grad_fd2(s, std::vector<double>{0.0}, 1e-3)[0], 0.0, 1e-15);
    const std::vector<double> t{0.7};
    const double e1 = std::abs(grad_fd2(s, t, 1e-2)[0] + std::sin(0.7));
    const double e2 = std::abs(grad_fd2(s, t, 2.5e-3)[0] + std::sin(0.7));
    EXPECT_NEAR(e1 / e2, 16.0, 1.0);
}

TEST(GradPshift, Examples) {
    const LossSpec s = rx_z();
    EXPECT_NEAR(grad_pshift(s, std::vector<double>{kPi / 2})[0], -1.0, 1e-12);
    EXPECT_NEAR(grad_pshift(s, std::vector<double>{0.0})[0], 0.0, 1e-15);
    const LossSpec r = random_parametric(5, 12, 77);
    const auto th = random_theta(12, 78);
    EXPECT_LT(max_diff(grad_pshift(r, th), grad_adjoint(r, th)), 1e-10);
}

TEST(GradAdjoint, Examples) {
    const LossSpec s = rx_z();
    for (double t : {0.0, 0.3, kPi / 2, 2.9}) EXPECT_NEAR(grad_adjoint(s, std::vector<double>{t})[0], -std::sin(t), 1e-12);
    EXPECT_TRUE(grad_adjoint(rx_z(false), std::vector<double>{}).empty());
    const LossSpec r = random_parametric(8, 50, 5);
    const auto th = random_theta(50, 6);
    const auto adj = grad_adjoint(r, th);
    EXPECT_LT(max_diff(adj, grad_pshift(r, th)), 1e-10);
    EXPECT_LT(max_diff(adj, grad_fd2(r, th, 1e-4)), 1e-6);
    LossSpec m = r;
    m.backend = Backend::MPS;
    EXPECT_THROW(grad_adjoint(m, th), InputError);
}

TEST(GradAdjoint, TwoLiveBuffers) {
    const LossSpec r = random_parametric(6, 20, 12);
    const auto th = random_theta(20, 13);
    ASSERT_EQ(StateVector::live_buffers(), 0);
    StateVector::reset_peak();
    grad_adjoint(r, th);
    EXPECT_EQ(StateVector::peak_buffers(), 2);
}

TEST(GradProperties, CrossMethodConsistency) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + rng() % 8;
        const int m = 1 + rng() % 45;  // up to 60 rotation gates with reuse
        const LossSpec r = random_parametric(n, m, rng());
        const auto th = random_theta(m, rng());
        const auto adj = grad_adjoint(r, th);
        ASSERT_LT(max_diff(adj, grad_pshift(r, th)), 1e-10) << trial;
        ASSERT_LT(max_diff(adj, grad_fd2(r, th, 1e-4)), 1e-6) << trial;
    }
}

TEST(Optimize, Examples) {
    OptimizerConfig cfg;
    cfg.eta = 0.1;
    cfg.max_iterations = 200;
    auto tr = optimize(rx_z(), {1.0}, cfg);
    EXPECT_NEAR(tr.losses.back(), -1.0, 1e-6);
    EXPECT_LE(tr.losses.size(), 202u);

    auto still = optimize(rx_z(), {0.0}, cfg);
    EXPECT_TRUE(still.converged);
    EXPECT_EQ(still.losses.size(), 1u);

    LossSpec zz;
    zz.circuit = hardware_efficient_ansatz(2, 2, {GateKind::Ry, GateKind::Rz}, CouplingGraph::line(2));
    zz.hamiltonian = parse_observable("1 ZZ");
    const Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::observable_dense(zz.hamiltonian));
    cfg.max_iterations = 2000;
    cfg.method = GradMethod::PShift;
    auto vqe = optimize(zz, random_theta(zz.circuit.n_params(), 3), cfg);
    EXPECT_NEAR(vqe.losses.back(), es.eigenvalues()(0), 1e-4);
}

TEST(Optimize, DivergenceDetected) {
    // Near the minimum of cos(theta) the update phi <- (1 - eta) phi grows for eta > 2,
    // so the loss rises on every step.
    OptimizerConfig cfg;
    cfg.eta = 2.5;
    cfg.tolerance = 0.0;
    EXPECT_THROW(optimize(rx_z(), {kPi + 1e-6}, cfg), NumericalError);
    cfg.eta = 0.0;
    EXPECT_THROW(optimize(rx_z(), {1.0}, cfg), InputError);
}

TEST(Ansatz, ParameterCount) {
    Circuit c = hardware_efficient_ansatz(4, 3, {GateKind::Ry, GateKind::Rz}, CouplingGraph::line(4));
    EXPECT_EQ(c.n_params(), 4 * 3 * 2);
}

TEST(MaxCut, Examples) {
    MaxCutProblem tri(3, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_EQ(tri.max_cut(), 2);
    EXPECT_EQ(tri.cost_hamiltonian().terms.size(), 4u);  // 3 ZZ terms + constant
    EXPECT_THROW(MaxCutProblem(3, {{0, 0}}), InputError);
    EXPECT_THROW(MaxCutProblem(3, {{0, 1}, {1, 0}}), InputError);
    // <H_C> equals the expected cut under the computational distribution.
    const Circuit c = qaoa_circuit(tri, 1);
    const std::vector<double> th{0.8, 0.3};
    const auto probs = simulate(c, th).probabilities();
    double expected = 0;
    for (int i = 0; i < 8; ++i) expected += probs[i] * tri.cut_value(index_to_bits(i, 3));
    LossSpec s{c, tri.cost_hamiltonian()};
    EXPECT_NEAR(loss(s, th), expected, 1e-12);
}

TEST(Qaoa, CircuitImplementsCostUnitary) {
    // exp(-i gamma H_C) exp(-i beta H_M) applied to |+>^n, up to global phase.
    MaxCutProblem g(3, {{0, 1}, {1, 2}});
    const double gamma = 0.37, beta = 0.81;
    const Circuit c = qaoa_circuit(g, 1);
    const Vector got = oracle::final_state(c, {gamma, beta});
    const Matrix hc = oracle::observable_dense(g.cost_hamiltonian());
    Matrix hm = Matrix::Zero(8, 8);
    for (int q = 0; q < 3; ++q) {
        std::string w(3, 'I');
        w[q] = 'X';
        hm += oracle::pauli_dense(w);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> ec(hc), em(hm);
    auto expm = [](const Eigen::SelfAdjointEigenSolver<Matrix>& es, double t) {
        Vector ph = (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp();
        return Matrix(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
    };
    const Vector plus = Vector::Constant(8, 1 / std::sqrt(8.0));
    const Vector want = expm(em, beta) * expm(ec, gamma) * plus;
    EXPECT_NEAR(std::abs(want.dot(got)), 1.0, 1e-12);
}

TEST(Qaoa, TriangleAndSquare) {
    OptimizerConfig cfg;
    cfg.eta = 0.05;
    cfg.max_iterations = 300;
    MaxCutProblem tri(3, {{0, 1}, {1, 2}, {0, 2}});
    const QAOAResult r = qaoa_maxcut(tri, 1, cfg, 500, 3);
    EXPECT_GE(r.expected_cut, 1.5);
    EXPECT_EQ(r.best_cut, 2);

    // Grid-search oracle: the optimum over a fine (gamma, beta) grid bounds what descent should reach.
    LossSpec s{qaoa_circuit(tri, 1), tri.cost_hamiltonian()};
    double grid_best = 0;
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 60; ++j) grid_best = std::max(grid_best, loss(s, std::vector<double>{kPi * i / 60, kPi / 2 * j / 60}));
    EXPECT_GE(r.expected_cut, grid_best - 1e-3);

    MaxCutProblem sq(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    const QAOAResult q = qaoa_maxcut(sq, 1, cfg, 500, 4);
    EXPECT_EQ(q.best_cut, 4);
}

TEST(Qaoa, RelabelingInvariance) {
    OptimizerConfig cfg;
    cfg.eta = 0.05;
    cfg.max_iterations = 100;
    MaxCutProblem g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
    const int perm[4] = {2, 0, 3, 1};
    std::vector<std::pair<int, int>> relabeled;
    for (auto [a, b] : g.edges) relabeled.emplace_back(perm[a], perm[b]);
    MaxCutProblem h(4, relabeled);
    const QAOAResult a = qaoa_maxcut(g, 1, cfg, 2000, 9);
    const QAOAResult b = qaoa_maxcut(h, 1, cfg, 2000, 9);
    EXPECT_NEAR(a.expected_cut, b.expected_cut, 1e-9);
    std::string mapped(4, '0');
    for (int v = 0; v < 4; ++v) mapped[perm[v]] = a.best_bitstring[v];
    EXPECT_EQ(h.cut_value(mapped), a.best_cut);
    EXPECT_EQ(a.best_cut, b.best_cut);
}
