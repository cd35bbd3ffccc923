#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nisq/peps.hpp"
#include "nisq/statevector.hpp"
#include "oracle.hpp"

using namespace nisq;

namespace {

// Random brickwork on an n_h x n_v grid: 1q rotations, then nearest-neighbour 2q gates
// on one of the four edge classes per layer.
Circuit grid_circuit(int n_h, int n_v, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(-3, 3);
    Circuit c(n_h * n_v);
    const GateKind one[] = {GateKind::Rx, GateKind::Ry, GateKind::Rz};
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < n_h * n_v; ++q) c.add(Gate::rotation(one[rng() % 3], q, Param{ang(rng)}));
        const int pattern = layer % 4;
        for (int row = 0; row < n_v; ++row)
            for (int col = 0; col < n_h; ++col) {
                const int q = row * n_h + col;
                if (pattern < 2 && col % 2 == pattern && col + 1 < n_h) {
                    if (rng() % 2)
                        c.add(GateKind::CZ, {q, q + 1});
                    else
                        c.add(Gate::raw(oracle::random_unitary(4, rng()), {q + 1, q}));
                }
                if (pattern >= 2 && row % 2 == pattern - 2 && row + 1 < n_v) {
                    if (rng() % 2)
                        c.add(GateKind::CX, {q + n_h, q});
                    else
                        c.add(Gate::raw(oracle::random_unitary(4, rng()), {q, q + n_h}));
                }
            }
    }
    return c;
}

double max_amp_err(const PEPSState& p, const StateVector& s, PEPSState::Order order = PEPSState::Order::Columns) {
    double e = 0;
    for (std::uint64_t i = 0; i < s.dim(); ++i)
        e = std::max(e, std::abs(p.amplitude(index_to_bits(i, s.n_qubits()), order) - s[i]));
    return e;
}

}  // namespace

TEST(PepsInit, ZeroGrid) {
    PEPSState p = init_zero_grid(2, 2);
    EXPECT_EQ(p.amplitude("0000"), cplx(1, 0));
    for (int i = 1; i < 16; ++i) EXPECT_EQ(p.amplitude(index_to_bits(i, 4)), cplx(0, 0));
    EXPECT_EQ(p.stored_elements(), 4u * 2u);
    EXPECT_EQ(p.max_bond_dim(), 1);
    EXPECT_THROW(init_zero_grid(1, 3), InputError);
}

TEST(Peps1q, Examples) {
    PEPSState p = init_zero_grid(2, 2);
    p.apply(Gate::make(GateKind::H, {0}));
    EXPECT_NEAR(p.amplitude("0000").real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(p.amplitude("1000").real(), 1 / std::sqrt(2.0), 1e-15);
    PEPSState z = init_zero_grid(2, 2);
    z.apply(Gate::make(GateKind::Z, {3}));
    EXPECT_EQ(z.amplitude("0000"), cplx(1, 0));

    Circuit layer(6);
    std::mt19937_64 rng(3);
    for (int q = 0; q < 6; ++q) layer.add(Gate::raw(oracle::random_unitary(2, rng()), {q}));
    PEPSState l = PEPSState::zero_grid(3, 2);
    l.apply_circuit(layer);
    EXPECT_LT(max_amp_err(l, simulate(layer)), 1e-12);
}

TEST(Peps2q, BondGrowth) {
    PEPSState p = init_zero_grid(2, 2);
    EXPECT_EQ(p.apply_2q(gate_matrix(Gate::make(GateKind::CZ, {0, 1})), 0, 1), 2);
    EXPECT_EQ(p.h_bond(0, 0), 2);
    EXPECT_EQ(p.apply_2q(Matrix::Identity(4, 4), 0, 2), 1);
    EXPECT_EQ(p.v_bond(0, 0), 1);
    // Bond is multiplied by the Schmidt rank, also on an already grown bond.
    EXPECT_EQ(p.apply_2q(gate_matrix(Gate::make(GateKind::SWAP, {0, 1})), 1, 0), 4);
    EXPECT_EQ(p.h_bond(0, 0), 8);
}

TEST(Peps2q, RejectsNonAdjacent) {
    PEPSState p = init_zero_grid(3, 3);
    EXPECT_THROW(p.apply(Gate::make(GateKind::CX, {0, 2})), InputError);
    EXPECT_THROW(p.apply(Gate::make(GateKind::CX, {0, 4})), InputError);
}

TEST(Peps2q, BudgetExceededThrows) {
    PEPSState p = PEPSState::zero_grid(3, 3, 1e3);
    Matrix swap = gate_matrix(Gate::make(GateKind::SWAP, {0, 1}));
    EXPECT_THROW(p.apply_2q(swap, 0, 1), BudgetError);
    EXPECT_EQ(p.h_bond(0, 0), 1);
}

TEST(Peps2q, ThreeByThreeDepthFourAllAmplitudes) {
    Circuit c = grid_circuit(3, 3, 4, 99);
    PEPSState p = init_zero_grid(3, 3);
    p.apply_circuit(c);
    EXPECT_LT(max_amp_err(p, simulate(c)), 1e-8);
}

TEST(PepsAmplitude, BellOnEdgeOf2x3) {
    Circuit c = parse_circuit("qreg q[6]; h q[1]; cx q[1],q[4];");
    PEPSState p = PEPSState::zero_grid(3, 2);
    p.apply_circuit(c);
    EXPECT_NEAR(p.amplitude("000000").real(), 1 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(p.amplitude("010010").real(), 1 / std::sqrt(2.0), 1e-14);
    EXPECT_EQ(p.amplitude("010000"), cplx(0, 0));
}

TEST(PepsProperties, ExactUpTo3x4Depth6) {
    for (auto [h, v] : {std::pair{3, 4}, std::pair{4, 3}, std::pair{2, 5}}) {
        Circuit c = grid_circuit(h, v, 6, 10 * h + v);
        PEPSState p = init_zero_grid(h, v);
        p.apply_circuit(c);
        const StateVector s = simulate(c);
        EXPECT_LT(max_amp_err(p, s), 1e-8) << h << "x" << v;
    }
}

TEST(PepsProperties, RowAndColumnOrderAgree) {
    Circuit c = grid_circuit(3, 4, 5, 5);
    PEPSState p = init_zero_grid(3, 4);
    p.apply_circuit(c);
    for (std::uint64_t i = 0; i < 4096; i += 37) {
        const std::string b = index_to_bits(i, 12);
        EXPECT_LT(std::abs(p.amplitude(b, PEPSState::Order::Columns) - p.amplitude(b, PEPSState::Order::Rows)),
                  1e-10);
    }
}

TEST(PepsCost, Formula) {
    EXPECT_DOUBLE_EQ(estimate_cost(5, 5, 2), 2304.0);
    EXPECT_DOUBLE_EQ(estimate_cost(3, 3, 2), 64.0);
    EXPECT_DOUBLE_EQ(estimate_cost(4, 6, 1), 8.0);
    EXPECT_THROW(estimate_cost(2, 5, 2), InputError);
}
