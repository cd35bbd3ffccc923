#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "nisq/benchmarks.hpp"
#include "nisq/clifford.hpp"
#include "nisq/statevector.hpp"
#include "oracle.hpp"

using namespace nisq;

namespace {

// Depolarizing written as a Pauli channel with rate p/4 per non-identity Pauli, so the
// Bloch vector contracts by exactly 1 - p.
Channel contraction_channel(double p) { return pauli_channel({1 - 0.75 * p, p / 4, p / 4, p / 4}); }

double phase_free_distance(const Matrix& u, const Matrix& v) {
    return 1.0 - std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

Circuit random_clifford_circuit(int n, int gates, std::mt19937& rng) {
    Circuit c(n);
    std::uniform_int_distribution<int> kind(0, 6), q(0, n - 1);
    for (int i = 0; i < gates; ++i) {
        const int k = kind(rng), a = q(rng);
        int b = q(rng);
        while (b == a) b = q(rng);
        switch (k) {
            case 0: c.add(GateKind::H, {a}); break;
            case 1: c.add(GateKind::S, {a}); break;
            case 2: c.add(GateKind::Sdg, {a}); break;
            case 3: c.add(GateKind::X, {a}); break;
            case 4: c.add(GateKind::CX, {a, b}); break;
            case 5: c.add(GateKind::CZ, {a, b}); break;
            default: c.add(GateKind::SWAP, {a, b}); break;
        }
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------- Clifford group

TEST(Clifford, GroupSizesAndDistinctElements) {
    EXPECT_EQ(CliffordGroup::get(1).size(), 24);
    EXPECT_EQ(CliffordGroup::get(2).size(), 11520);
    EXPECT_THROW(CliffordGroup::get(3), InputError);
    Rng rng(1);
    EXPECT_THROW(clifford_sample(3, rng), InputError);
    // enumeration oracle: the 24 single-qubit words are pairwise distinct up to phase
    const auto& g = CliffordGroup::get(1);
    std::vector<Matrix> us;
    for (int i = 0; i < g.size(); ++i) {
        Circuit c(1);
        for (const Gate& op : g.word(i)) c.add(op);
        us.push_back(oracle::circuit_unitary(c));
    }
    for (int i = 0; i < 24; ++i)
        for (int j = i + 1; j < 24; ++j) EXPECT_GT(phase_free_distance(us[i], us[j]), 1e-6);
}

TEST(Clifford, InverseComposesToIdentity) {
    EXPECT_TRUE(clifford_inverse({}, 1).empty());
    EXPECT_TRUE(clifford_inverse({}, 2).empty());
    Rng rng(11);
    for (int n : {1, 2}) {
        for (int t = 0; t < 50; ++t) {
            std::vector<Gate> word;
            for (int k = 0; k < 5; ++k) {
                auto w = clifford_sample(n, rng);
                word.insert(word.end(), w.begin(), w.end());
            }
            Circuit c(n);
            for (const Gate& op : word) c.add(op);
            for (const Gate& op : clifford_inverse(word, n)) c.add(op);
            EXPECT_LT(phase_free_distance(oracle::circuit_unitary(c), oracle::identity(n)), 1e-10);
        }
    }
}

TEST(Clifford, SingleQubitSamplerChiSquare) {
    Rng rng(2024);
    const auto& g = CliffordGroup::get(1);
    std::vector<int> counts(24, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[g.index_of(clifford_sample(1, rng))];
    double chi2 = 0.0;
    const double e = draws / 24.0;
    for (int c : counts) {
        EXPECT_GT(c, 0);
        chi2 += (c - e) * (c - e) / e;
    }
    // 23 degrees of freedom: p = 0.001 at chi2 = 49.73
    EXPECT_LT(chi2, 49.73);
}

// ---------------------------------------------------------------- decay fit

TEST(DecayFitTest, ExactModelRecovered) {
    std::vector<double> m{1, 2, 4, 8, 16, 32, 64}, y;
    for (double x : m) y.push_back(0.5 * std::pow(0.9, x) + 0.5);
    DecayFit f = fit_exponential_decay(m, y);
    EXPECT_NEAR(f.A, 0.5, 1e-6);
    EXPECT_NEAR(f.p, 0.9, 1e-6);
    EXPECT_NEAR(f.B, 0.5, 1e-6);
    EXPECT_LT(f.residual, 1e-8);
    EXPECT_FALSE(f.degenerate);
}

TEST(DecayFitTest, ConstantDataFlagged) {
    DecayFit f = fit_exponential_decay({1, 2, 4, 8}, {0.7, 0.7, 0.7, 0.7});
    EXPECT_TRUE(f.degenerate);
    EXPECT_NEAR(f.A, 0.0, 1e-12);
    EXPECT_NEAR(f.B, 0.7, 1e-12);
    EXPECT_THROW(fit_exponential_decay({1, 2}, {0.9, 0.8}), InputError);
}

TEST(DecayFitTest, NoisyPointsWithinTwoPercent) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, 0.01);
    const std::vector<double> m{1, 2, 4, 8, 16, 32, 64, 128};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> y;
        for (double x : m) y.push_back(0.5 * std::pow(0.95, x) + 0.5 + noise(rng));
        DecayFit f = fit_exponential_decay(m, y);
        EXPECT_NEAR(f.p, 0.95, 0.02 * 0.95) << "trial " << trial;
        EXPECT_GE(f.p, 0.0);
        EXPECT_LE(f.p, 1.0 + 1e-6);
    }
}

// ---------------------------------------------------------------- RB

TEST(RB, SequenceIsIdentity) {
    Rng rng(3);
    for (int n : {1, 2}) {
        Circuit c = rb_sequence(n, 20, rng);
        EXPECT_EQ(c.size(), 21u);
        EXPECT_NEAR(std::norm(simulate(c)[0]), 1.0, 1e-10);
    }
}

TEST(RB, NoiselessHasNoDecay) {
    RBConfig cfg;
    cfg.lengths = {1, 4, 16, 64};
    cfg.sequences = 5;
    RBResult r = rb_run(cfg, NoiseModel{});
    EXPECT_NEAR(r.fit.p, 1.0, 1e-3);
    EXPECT_NEAR(r.error_rate, 0.0, 1e-3);
}

TEST(RB, DepolarizingMatchesClosedForm) {
    NoiseModel nm;
    nm.add("unitary", contraction_channel(0.01));
    RBConfig cfg;
    cfg.shots = 0;
    cfg.sequences = 10;
    RBResult r = rb_run(cfg, nm);
    // every sequence has m + 1 noisy Cliffords: survival = (1 + 0.99^{m+1}) / 2
    for (std::size_t li = 0; li < cfg.lengths.size(); ++li)
        for (double s : r.survivals[li]) EXPECT_NEAR(s, 0.5 + 0.5 * std::pow(0.99, cfg.lengths[li] + 1), 1e-10);
    EXPECT_NEAR(r.error_rate, 0.005, 0.1 * 0.005);
    EXPECT_NEAR(r.fit.p, 0.99, 1e-6);
}

TEST(RB, ReadoutBiasAbsorbedIntoSpam) {
    NoiseModel nm;
    nm.add("unitary", contraction_channel(0.01));
    RBConfig cfg;
    cfg.shots = 0;
    cfg.sequences = 5;
    const double p_clean = rb_run(cfg, nm).fit.p;
    nm.readout = ReadoutError{{0.0}, {0.05}};
    RBResult biased = rb_run(cfg, nm);
    EXPECT_NEAR(biased.fit.p, p_clean, 0.01 * p_clean);
    // P(read 0) = (1.05 + 0.95 * 0.99^{m+1}) / 2
    EXPECT_NEAR(biased.fit.A, 0.475 * 0.99, 1e-6);
    EXPECT_NEAR(biased.fit.B, 0.525, 1e-6);
}

TEST(RB, TwoQubitDepolarizingAndFullMixing) {
    NoiseModel nm;
    nm.add("unitary", depolarizing(0.02, 2));
    RBConfig cfg;
    cfg.n = 2;
    cfg.shots = 0;
    cfg.sequences = 3;
    cfg.lengths = {1, 2, 4, 8, 16, 32};
    RBResult r = rb_run(cfg, nm);
    const double lam = 1.0 - 16.0 / 15.0 * 0.02;
    EXPECT_NEAR(r.fit.p, lam, 1e-6);
    EXPECT_NEAR(r.error_rate, 0.75 * (1 - lam), 1e-6);

    NoiseModel full;
    full.add("unitary", depolarizing(15.0 / 16.0, 2));
    RBResult mixed = rb_run(cfg, full);
    EXPECT_NEAR(mixed.fit.B + mixed.fit.A * std::pow(mixed.fit.p, 32), 0.25, 1e-10);
    for (const auto& row : mixed.survivals)
        for (double s : row) EXPECT_NEAR(s, 0.25, 1e-10);
}

TEST(RB, ConfigValidation) {
    RBConfig cfg;
    cfg.lengths = {1, 2};
    EXPECT_THROW(rb_run(cfg, NoiseModel{}), InputError);
    cfg.lengths = {1, 2, 2};
    EXPECT_THROW(rb_run(cfg, NoiseModel{}), InputError);
    cfg.lengths = {0, 1, 2};
    EXPECT_THROW(rb_run(cfg, NoiseModel{}), InputError);
    cfg.lengths = {1, 2, 3};
    cfg.n = 3;
    EXPECT_THROW(rb_run(cfg, NoiseModel{}), InputError);
}

TEST(RB, DeterministicAcrossThreads) {
    NoiseModel nm;
    nm.add("unitary", contraction_channel(0.02));
    RBConfig cfg;
    cfg.lengths = {1, 8, 32};
    cfg.sequences = 8;
    cfg.shots = 200;
    set_num_threads(1);
    RBResult a = rb_run(cfg, nm);
    set_num_threads(4);
    RBResult b = rb_run(cfg, nm);
    set_num_threads(0);
    EXPECT_EQ(a.survivals, b.survivals);
}

// ---------------------------------------------------------------- XEB

TEST(XEB, GateSetAndEntropyDefinition) {
    // eight distinct pi/2 rotations; k and k+4 are mutual inverses
    for (int k = 0; k < 8; ++k) {
        Matrix u = gate_matrix(xeb_gate(k, 0));
        EXPECT_TRUE(is_unitary(u));
        Matrix v = gate_matrix(xeb_gate((k + 4) % 8, 0));
        EXPECT_LT(oracle::max_abs(u * v - Matrix::Identity(2, 2)), 1e-12);
    }
    EXPECT_LT(oracle::max_abs(gate_matrix(xeb_gate(0, 0)) -
                              gate_matrix(Gate::rotation(GateKind::Rx, 0, Param{kPi / 2}))), 1e-12);
    EXPECT_LT(oracle::max_abs(gate_matrix(xeb_gate(2, 0)) -
                              gate_matrix(Gate::rotation(GateKind::Ry, 0, Param{kPi / 2}))), 1e-12);

    const std::vector<double> q{0.1, 0.2, 0.3, 0.4};
    double h = 0.0;
    for (double x : q) h -= x * std::log(x);
    EXPECT_NEAR(cross_entropy(q, q), h, 1e-15);
    EXPECT_NEAR(xeb_alpha(q, q), 1.0, 1e-14);
    // global depolarizing mixture f * ideal + (1 - f) * uniform gives alpha = f
    std::vector<double> mix;
    for (double x : q) mix.push_back(0.6 * x + 0.4 * 0.25);
    EXPECT_NEAR(xeb_alpha(mix, q), 0.6, 1e-12);
    EXPECT_NEAR(xeb_alpha({0.25, 0.25, 0.25, 0.25}, q), 0.0, 1e-12);
}

TEST(XEB, NoiselessAlphaIsOne) {
    for (int n : {1, 2}) {
        XEBConfig cfg;
        cfg.n = n;
        cfg.lengths = {1, 4, 16, 64};
        cfg.sequences = 10;
        cfg.shots = 0;
        XEBResult r = xeb_run(cfg, NoiseModel{});
        for (double a : r.alphas) EXPECT_NEAR(a, 1.0, 1e-9);
        EXPECT_NEAR(r.p, 1.0, 1e-6);
    }
}

TEST(XEB, SingleQubitDepolarizingContraction) {
    const double p = 0.02;
    NoiseModel nm;
    nm.add("unitary", depolarizing(p));
    XEBConfig cfg;
    cfg.shots = 0;
    cfg.sequences = 20;
    XEBResult r = xeb_run(cfg, nm);
    const double lam = 1.0 - 4.0 / 3.0 * p;
    // each length runs m + 1 gates, so alpha = lam^{m+1} exactly
    for (std::size_t i = 0; i < r.lengths.size(); ++i) EXPECT_NEAR(r.alphas[i], std::pow(lam, r.lengths[i] + 1), 1e-9);
    EXPECT_NEAR(1.0 - r.p, 1.0 - lam, 0.1 * (1.0 - lam));
    EXPECT_NEAR(r.r, 0.5 * (1.0 - r.p), 1e-15);
    EXPECT_NEAR(r.r_pauli, 0.5 * r.r, 1e-15);
}

TEST(XEB, SampledAlphaNearExact) {
    const double p = 0.02;
    NoiseModel nm;
    nm.add("unitary", depolarizing(p));
    XEBConfig cfg;
    cfg.lengths = {2, 8, 32, 64};
    cfg.sequences = 30;
    cfg.shots = 2000;
    XEBResult r = xeb_run(cfg, nm);
    const double lam = 1.0 - 4.0 / 3.0 * p;
    EXPECT_NEAR(1.0 - r.p, 1.0 - lam, 0.25 * (1.0 - lam));
}

TEST(XEB, TwoQubitGateFidelityDividesOutSingleQubitLayers) {
    NoiseModel nm;
    nm.add("unitary", depolarizing(0.005));
    nm.add("cz", depolarizing(0.03, 2));
    XEBConfig cfg;
    cfg.n = 2;
    cfg.shots = 0;
    cfg.sequences = 20;
    cfg.lengths = {1, 2, 4, 8, 16, 32, 64};
    XEBResult r = xeb_run(cfg, nm);
    ASSERT_EQ(r.single_qubit_fits.size(), 2u);
    const double lam1 = 1.0 - 4.0 / 3.0 * 0.005;
    for (const auto& f : r.single_qubit_fits) EXPECT_NEAR(f.p, lam1, 1e-3);
    const double lam2 = 1.0 - 16.0 / 15.0 * 0.03;
    EXPECT_NEAR(1.0 - r.p, 1.0 - lam2, 0.1 * (1.0 - lam2));
}

// ---------------------------------------------------------------- RQC and linear XEB

TEST(RQC, StructureOnTwoByTwo) {
    Rng rng(4);
    Circuit c = rqc_generate(2, 2, 1, rng);
    ASSERT_EQ(c.size(), 10u);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(c.ops()[i].num_targets(), 1);
    EXPECT_EQ(c.ops()[4].kind, GateKind::CZ);
    EXPECT_EQ(c.ops()[4].targets, (std::vector<int>{0, 1}));
    EXPECT_EQ(c.ops()[5].targets, (std::vector<int>{2, 3}));
    for (int i = 6; i < 10; ++i) EXPECT_EQ(c.ops()[i].num_targets(), 1);
}

TEST(RQC, PatternsCoverGridOnce) {
    EXPECT_EQ(std::string("ABCDCDAB"), [] {
        std::string s;
        for (int i = 0; i < 8; ++i) s += rqc_pattern(i);
        return s;
    }());
    for (auto [rows, cols] : {std::pair{2, 2}, {3, 4}, {4, 5}}) {
        std::multiset<std::pair<int, int>> seen;
        for (char p : std::string("ABCD"))
            for (auto e : rqc_pattern_edges(rows, cols, p)) seen.insert(e);
        const auto grid = CouplingGraph::grid(rows, cols).edges();
        EXPECT_EQ(seen.size(), grid.size());
        for (auto e : grid) EXPECT_EQ(seen.count(e), 1u);
    }
}

TEST(RQC, NoRepeatsAndSeedsDiffer) {
    auto label = [](const Gate& g) {
        return g.kind == GateKind::Rx ? 0 : g.kind == GateKind::Ry ? 1 : 2;
    };
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(seed);
        Circuit c = rqc_generate(2, 3, 6, rng);
        std::vector<std::vector<int>> per_qubit(6);
        for (const Gate& g : c.ops())
            if (g.num_targets() == 1) per_qubit[g.targets[0]].push_back(label(g));
        for (const auto& seq : per_qubit) {
            ASSERT_EQ(seq.size(), 7u);
            for (std::size_t i = 1; i < seq.size(); ++i) ASSERT_NE(seq[i], seq[i - 1]) << "seed " << seed;
        }
    }
    Rng a(1), b(2);
    EXPECT_FALSE(rqc_generate(3, 3, 4, a) == rqc_generate(3, 3, 4, b));
}

TEST(LinearXEB, UniformIdealAndMixtureSamplers) {
    Rng gen(12);
    const Circuit c = rqc_generate(3, 4, 8, gen);
    const std::vector<double> ideal = simulate(c).probabilities();
    const int N = 100000;
    Rng rng(77);
    std::vector<std::uint64_t> uni, ide, mix;
    const std::vector<std::string> ideal_bits = simulate(c).sample(N, rng);
    for (int i = 0; i < N; ++i) {
        uni.push_back(uniform_index(rng, ideal.size()));
        ide.push_back(bits_to_index(ideal_bits[i]));
        mix.push_back(uniform01(rng) < 0.6 ? ide.back() : uni.back());
    }
    XEBFidelity fu = linear_xeb_fidelity(ideal, uni);
    XEBFidelity fi = linear_xeb_fidelity(ideal, ide);
    XEBFidelity fm = linear_xeb_fidelity(ideal, mix);
    // For a single circuit the ideal sampler's mean is 2^n sum p^2 - 1, which equals 1 only
    // up to finite-size fluctuation of the collision probability (a few percent at n = 12).
    double collision = 0.0;
    for (double p : ideal) collision += p * p;
    const double f_ideal = ideal.size() * collision - 1.0;
    EXPECT_LT(std::abs(fu.fidelity - 0.0), 5 * fu.std_error);
    EXPECT_LT(std::abs(fi.fidelity - f_ideal), 5 * fi.std_error);
    EXPECT_LT(std::abs(fm.fidelity - 0.6 * f_ideal), 5 * fm.std_error);
    EXPECT_NEAR(f_ideal, 1.0, 0.15);

    // string overload agrees
    std::vector<std::string> first(ideal_bits.begin(), ideal_bits.begin() + 1000);
    std::vector<std::uint64_t> first_idx(ide.begin(), ide.begin() + 1000);
    EXPECT_NEAR(linear_xeb_fidelity(c, first).fidelity, linear_xeb_fidelity(ideal, first_idx).fidelity, 1e-12);
}

TEST(LinearXEB, IdealSamplerConcentratesAtOneOverCircuits) {
    // Averaged over random circuits the collision term approaches the Porter-Thomas value.
    const int circuits = 20, N = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < circuits; ++s) {
        Rng rng(1000 + s);
        const Circuit c = rqc_generate(3, 4, 8, rng);
        const StateVector psi = simulate(c);
        const auto bits = psi.sample(N, rng);
        std::vector<std::uint64_t> idx;
        for (const auto& b : bits) idx.push_back(bits_to_index(b));
        const double f = linear_xeb_fidelity(psi.probabilities(), idx).fidelity;
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / circuits;
    const double se = std::sqrt((sum2 / circuits - mean * mean) / (circuits - 1));
    EXPECT_LT(std::abs(mean - 1.0), 5 * se);
}

// ---------------------------------------------------------------- QV

TEST(QV, HaarSecondMoment) {
    Rng rng(5);
    const int draws = 10000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        Matrix u = haar_su4(rng);
        ASSERT_TRUE(is_unitary(u));
        ASSERT_NEAR(std::abs(u.determinant() - 1.0), 0.0, 1e-10);
        const double t = std::norm(u.trace());
        s += t;
        s2 += t * t;
    }
    const double mean = s / draws, sd = std::sqrt((s2 / draws - mean * mean) / draws);
    EXPECT_LT(std::abs(mean - 1.0), 5 * sd);
}

TEST(QV, HeavySetSizeAndMedian) {
    EXPECT_NEAR(median_probability({0.1, 0.4, 0.2, 0.3}), 0.25, 1e-15);
    Rng rng(6);
    for (int m = 2; m <= 6; ++m) {
        const auto p = simulate(qv_circuit(m, rng)).probabilities();
        const auto h = heavy_set(p);
        const long k = std::count(h.begin(), h.end(), true);
        const long half = 1L << (m - 1);
        EXPECT_GE(k, half - 1);
        EXPECT_LE(k, half + 1);
    }
}

TEST(QV, NoiselessPassesUniformFails) {
    QVConfig cfg;
    cfg.min_width = 2;
    cfg.max_width = 5;
    cfg.circuits = 40;
    QVResult ok = qv_run(cfg, NoiseModel{});
    for (const auto& w : ok.widths) {
        EXPECT_GT(w.mean_heavy, 2.0 / 3.0) << "width " << w.width;
        EXPECT_TRUE(w.passed);
    }
    EXPECT_EQ(ok.log2_volume, 5);

    NoiseModel uniform;
    uniform.readout = ReadoutError{{0.5}, {0.5}};
    QVResult bad = qv_run(cfg, uniform);
    for (const auto& w : bad.widths) {
        EXPECT_LE(w.mean_heavy, 0.5 + 1e-12);
        EXPECT_FALSE(w.passed);
    }
    EXPECT_EQ(bad.log2_volume, 0);
}

TEST(QV, RoutedCircuitsAreEquivalent) {
    QVConfig cfg;
    cfg.min_width = 3;
    cfg.max_width = 4;
    cfg.circuits = 10;
    QVResult plain = qv_run(cfg, NoiseModel{});
    cfg.topology = [](int m) { return CouplingGraph::line(m); };
    QVResult routed = qv_run(cfg, NoiseModel{});
    int swaps = 0;
    for (std::size_t i = 0; i < plain.widths.size(); ++i) {
        swaps += routed.widths[i].swaps;
        for (std::size_t k = 0; k < plain.widths[i].heavy.size(); ++k)
            EXPECT_NEAR(routed.widths[i].heavy[k], plain.widths[i].heavy[k], 1e-10);
    }
    EXPECT_GT(swaps, 0);
    Rng rng(8);
    Matrix u = haar_unitary(8, rng);
    EXPECT_NEAR(average_gate_fidelity(u, u), 1.0, 1e-12);
    EXPECT_NEAR(average_gate_fidelity(u, u * std::exp(kI * 0.3)), 1.0, 1e-12);
}

// ---------------------------------------------------------------- mirror circuits

TEST(Mirror, PredictionMatchesSimulation) {
    std::mt19937 gen(9);
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        const Circuit base = random_clifford_circuit(4, 25, gen);
        const MirrorCircuit mc = mirror_circuit(base, rng);
        EXPECT_NEAR(std::norm(simulate(mc.circuit).amplitude(mc.expected)), 1.0, 1e-10) << "trial " << t;
    }
}

TEST(Mirror, PolarizationExamples) {
    EXPECT_NEAR(mirror_polarization(0.625, 2), 0.5, 1e-15);
    std::mt19937 gen(13);
    const Circuit base = random_clifford_circuit(3, 15, gen);
    MirrorConfig cfg;
    cfg.repetitions = 10;
    MirrorResult clean = mirror_run(base, NoiseModel{}, cfg);
    EXPECT_NEAR(clean.polarization, 1.0, 1e-10);
    for (double s : clean.success) EXPECT_NEAR(s, 1.0, 1e-10);

    NoiseModel scrambled;
    scrambled.readout = ReadoutError{{0.5}, {0.5}};
    MirrorResult dead = mirror_run(base, scrambled, cfg);
    for (double s : dead.success) EXPECT_NEAR(s, 1.0 / 8.0, 1e-10);
    EXPECT_NEAR(dead.polarization, 0.0, 1e-10);

    Circuit t(1);
    t.add(GateKind::T, {0});
    Rng rng(1);
    EXPECT_THROW(mirror_circuit(t, rng), InputError);
}
