#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "nisq/noise.hpp"
#include "oracle.hpp"

using namespace nisq;

namespace {

Matrix dm(const Vector& psi) { return psi * psi.adjoint(); }

// Dense Kraus-chain reference for run_density.
Matrix oracle_density(const Circuit& c, const NoiseModel& noise) {
    const int n = c.n_qubits();
    Matrix rho = Matrix::Zero(1 << n, 1 << n);
    rho(0, 0) = 1;
    for (const Gate& g : c.ops()) {
        const Matrix u = oracle::embed(gate_matrix(g), g.targets, n);
        rho = u * rho * u.adjoint();
        for (const auto& [ch, t] : noise.after(g)) rho = oracle::apply_kraus(rho, ch->kraus, t, n);
    }
    return rho;
}

NoiseModel xflip_everywhere(double p) {
    NoiseModel m;
    m.add("*", bit_flip(p));
    return m;
}

}  // namespace

TEST(Channels, Constructors) {
    EXPECT_LT(oracle::max_abs(to_superop(depolarizing(0.0)) - Matrix::Identity(4, 4)), 1e-15);
    Channel bf = bit_flip(1.0);
    ASSERT_EQ(bf.kraus.size(), 1u);
    EXPECT_LT(oracle::max_abs(bf.kraus[0] - pauli_matrix(1)), 1e-15);
    for (double g : {0.0, 0.3, 1.0}) EXPECT_TRUE(amplitude_damping(g).trace_preserving());
    EXPECT_TRUE(depolarizing(0.2, 2).trace_preserving());
    EXPECT_EQ(depolarizing(0.2, 2).kraus.size(), 16u);
    EXPECT_THROW(bit_flip(1.5), InputError);
    EXPECT_THROW(depolarizing(-0.1), InputError);
    EXPECT_THROW(pauli_channel({0.5, 0.5, 0.5, 0.0}), InputError);
    Matrix bad = Matrix::Identity(2, 2) * 0.5;
    EXPECT_THROW(kraus_channel({bad}), InputError);
}

TEST(Superop, IdentityAndUnitary) {
    EXPECT_LT(oracle::max_abs(to_superop(identity_channel()) - Matrix::Identity(4, 4)), 1e-15);
    const Matrix u = oracle::random_unitary(2, 7);
    EXPECT_LT(oracle::max_abs(to_superop(unitary_channel(u)) - oracle::kron(u, u.conjugate())), 1e-14);
}

TEST(Superop, BitFlipOnZero) {
    SquashedDensityState s = SquashedDensityState::zero(1);
    const int t[1] = {0};
    s.apply_channel(bit_flip(0.3), t);
    EXPECT_NEAR(s.element(0, 0).real(), 0.7, 1e-15);
    EXPECT_NEAR(s.element(1, 1).real(), 0.3, 1e-15);
    EXPECT_EQ(s.element(0, 1), cplx(0, 0));
}

TEST(RunDensity, Examples) {
    Circuit bell = parse_circuit("qreg q[2]; h q[0]; cx q[0],q[1];");
    SquashedDensityState b = run_density(bell, {});
    EXPECT_LT(oracle::max_abs(b.density_matrix() - dm(oracle::final_state(bell))), 1e-15);

    Circuit id(1);
    id.add(GateKind::I, {0});
    NoiseModel half;
    half.add("id", bit_flip(0.5));
    auto p = run_density(id, half).probabilities();
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);

    Circuit x(1);
    x.add(GateKind::X, {0});
    NoiseModel damp;
    damp.add("x", amplitude_damping(0.3));
    auto q = run_density(x, damp).probabilities();
    EXPECT_NEAR(q[0], 0.3, 1e-15);
    EXPECT_NEAR(q[1], 0.7, 1e-15);
}

TEST(Probability, Examples) {
    SquashedDensityState z = SquashedDensityState::zero(1);
    EXPECT_EQ(z.probability("0"), 1.0);
    SquashedDensityState mixed = SquashedDensityState::from_matrix(Matrix::Identity(2, 2) * 0.5);
    EXPECT_EQ(mixed.probability("0"), 0.5);
    EXPECT_EQ(mixed.probability("1"), 0.5);
    EXPECT_THROW(mixed.probability("01"), InputError);

    Circuit c = oracle::random_circuit(3, 25, 11, false);
    NoiseModel m;
    m.add("*", depolarizing(0.05));
    m.add("cx", amplitude_damping(0.1));
    m.add("h", phase_flip(0.2));
    const Matrix ref = oracle_density(c, m);
    const SquashedDensityState s = run_density(c, m);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(s.probability(index_to_bits(i, 3)), ref(i, i).real(), 1e-12);
}

TEST(ExpectationDensity, Examples) {
    SquashedDensityState mixed = SquashedDensityState::from_matrix(Matrix::Identity(2, 2) * 0.5);
    EXPECT_EQ(mixed.expectation(parse_observable("1 Z")), 0.0);
    for (double p : {0.0, 0.1, 0.37}) {
        Circuit id(1);
        id.add(GateKind::I, {0});
        NoiseModel m;
        m.add("id", bit_flip(p));
        EXPECT_NEAR(run_density(id, m).expectation(parse_observable("1 Z")), 1 - 2 * p, 1e-15);
    }
    Circuit c = oracle::random_circuit(4, 40, 3);
    const Observable obs = oracle::random_observable(4, 6, 5);
    EXPECT_NEAR(run_density(c, {}).expectation(obs), simulate(c).expectation(obs), 1e-9);
    EXPECT_THROW(mixed.expectation(parse_observable("1 ZZ")), InputError);
}

TEST(NoiseProperties, TraceHermitianPsd) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const int n = 2 + seed % 4;
        Circuit c = oracle::random_circuit(n, 30, seed, n >= 3);
        NoiseModel m;
        m.add("*", depolarizing(0.03));
        m.add("cx", depolarizing(0.05, 2));
        m.add("rx", amplitude_damping(0.2));
        SquashedDensityState s = SquashedDensityState::zero(n);
        for (const Gate& g : c.ops()) {
            s.apply(g);
            for (const auto& [ch, t] : m.after(g)) {
                s.apply_channel(*ch, t);
                ASSERT_NEAR(s.trace(), 1.0, 1e-8);
            }
        }
        const Matrix rho = s.density_matrix();
        EXPECT_LT(oracle::max_abs(rho - rho.adjoint()), 1e-8);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
        EXPECT_LT(oracle::max_abs(rho - oracle_density(c, m)), 1e-10);
    }
}

TEST(NoiseProperties, UnitaryOnlyMatchesPure) {
    Circuit c = oracle::random_circuit(5, 60, 21);
    EXPECT_LT(oracle::max_abs(run_density(c, {}).density_matrix() - dm(oracle::final_state(c))), 1e-9);
}

TEST(NoiseModelJson, RoundTripAndErrors) {
    const std::string text = R"({"version":1,"gates":{"cx":[{"type":"depolarizing","p":0.02,"arity":2}],
        "*":[{"type":"bit_flip","p":0.01}],"x":[{"type":"amplitude_damping","gamma":0.1}]},
        "readout":{"p01":0.02,"p10":[0.03,0.04]}})";
    NoiseModel m = parse_noise_model(text);
    ASSERT_EQ(m.gates.size(), 3u);
    EXPECT_EQ(m.gates.at("cx")[0].arity, 2);
    EXPECT_TRUE(m.gates.count("x"));
    EXPECT_EQ(m.readout.p01_of(1), 0.02);
    EXPECT_EQ(m.readout.p10_of(1), 0.04);
    NoiseModel again = parse_noise_model(noise_model_to_json(m));
    EXPECT_EQ(again.gates.size(), 3u);
    EXPECT_LT(oracle::max_abs(to_superop(again.gates.at("cx")[0]) - to_superop(m.gates.at("cx")[0])), 1e-15);
    EXPECT_LT(oracle::max_abs(to_superop(again.gates.at("x")[0]) - to_superop(m.gates.at("x")[0])), 1e-15);
    EXPECT_THROW(parse_noise_model("{"), InputError);
    EXPECT_THROW(parse_noise_model(R"({"gates":{"foo":[]}})"), InputError);
    EXPECT_THROW(parse_noise_model(R"({"gates":{"x":[{"type":"warp"}]}})"), InputError);
    EXPECT_THROW(parse_noise_model(R"({"gates":{"x":[{"type":"bit_flip"}]}})"), InputError);
}

TEST(NoiseModelAttach, ArityMismatchThrows) {
    NoiseModel m;
    m.add("h", depolarizing(0.1, 2));
    EXPECT_THROW(run_density(parse_circuit("qreg q[2]; h q[0];"), m), InputError);
}

TEST(Readout, ExactAndSampled) {
    ReadoutError r{{0.1}, {0.2}};
    auto p = apply_readout(std::vector<double>{1, 0, 0, 0}, 2, r);
    EXPECT_NEAR(p[0], 0.81, 1e-15);
    EXPECT_NEAR(p[1], 0.09, 1e-15);
    EXPECT_NEAR(p[3], 0.01, 1e-15);
    Rng rng(1);
    int flips = 0;
    for (int i = 0; i < 100000; ++i) {
        std::string b = "1";
        apply_readout(b, r, rng);
        flips += b == "0";
    }
    EXPECT_NEAR(flips / 1e5, 0.2, 4 * std::sqrt(0.2 * 0.8 / 1e5));
}

TEST(PauliMC, IdentityRatesReproduceNoiseless) {
    Circuit c = parse_circuit("qreg q[2]; h q[0]; cx q[0],q[1];");
    NoiseModel m;
    m.add("*", pauli_channel({1, 0, 0, 0}));
    MCResult r = run_pauli_mc(c, m, 2000, 4, {parse_observable("1 ZZ")});
    EXPECT_NEAR(r.means[0], 1.0, 1e-14);
    for (const auto& b : r.bitstrings) EXPECT_TRUE(b == "00" || b == "11");
}

TEST(PauliMC, AgreesWithDensityWithinFourSigma) {
    Circuit c = parse_circuit("qreg q[2]; h q[0]; cx q[0],q[1]; rx(0.7) q[0]; ry(0.4) q[1]; cx q[1],q[0];");
    NoiseModel m = xflip_everywhere(0.1);
    const Observable z0 = parse_observable("1 ZI");
    const double exact = run_density(c, m).expectation(z0);
    MCResult r = run_pauli_mc(c, m, 100000, 17, {z0});
    EXPECT_LT(std::abs(r.means[0] - exact), 4 * r.std_errors[0]);
    // Sampled bits agree in distribution as well.
    double ones = 0;
    for (const auto& b : r.bitstrings) ones += b[0] == '1';
    const double p1 = run_density(c, m).probabilities()[2] + run_density(c, m).probabilities()[3];
    EXPECT_NEAR(ones / 1e5, p1, 4 * std::sqrt(p1 * (1 - p1) / 1e5));
}

TEST(PauliMC, DeterministicAcrossThreadCounts) {
    Circuit c = oracle::random_circuit(3, 20, 9, false);
    NoiseModel m;
    m.add("*", depolarizing(0.05));
    m.readout = {{0.02}, {0.03}};
    set_num_threads(1);
    MCResult a = run_pauli_mc(c, m, 500, 42, {parse_observable("1 ZZZ")});
    set_num_threads(4);
    MCResult b = run_pauli_mc(c, m, 500, 42, {parse_observable("1 ZZZ")});
    set_num_threads(1);
    EXPECT_EQ(a.bitstrings, b.bitstrings);
    EXPECT_EQ(a.means, b.means);
}

TEST(PauliMC, RejectsNonPauliChannels) {
    NoiseModel m;
    m.add("x", amplitude_damping(0.1));
    EXPECT_THROW(run_pauli_mc(parse_circuit("qreg q[1]; x q[0];"), m, 10, 1), InputError);
}
