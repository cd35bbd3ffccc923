#include "nisq/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "nisq/clifford.hpp"
#include "nisq/compile.hpp"
#include "nisq/pauli.hpp"
#include "nisq/statevector.hpp"

namespace nisq {

namespace {

// Runs body(i) for i in [0, n) across workers; the first exception is rethrown.
template <class F>
void parallel_for(int n, F&& body) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

void check_lengths(const std::vector<int>& lengths, std::size_t min_count) {
    if (lengths.size() < min_count)
        throw InputError("need at least " + std::to_string(min_count) + " sequence lengths");
    std::vector<int> s = lengths;
    std::sort(s.begin(), s.end());
    if (s.front() < 1) throw InputError("sequence lengths must be >= 1");
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InputError("sequence lengths must be distinct");
}

std::uint64_t stream_id(std::size_t a, std::size_t b) { return static_cast<std::uint64_t>(a) * 1000003ull + b; }

// Marginal distribution of one qubit.
std::vector<double> marginal(const std::vector<double>& p, int n, int q) {
    std::vector<double> m(2, 0.0);
    const std::uint64_t mask = std::uint64_t{1} << (n - 1 - q);
    for (std::uint64_t i = 0; i < p.size(); ++i) m[(i & mask) ? 1 : 0] += p[i];
    return m;
}

double normal(Rng& rng) {
    // Box-Muller on the portable uniform source
    const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

DecayFit fit_or_raw(const std::vector<double>& lengths, const std::vector<double>& means, bool* ok,
                    std::string* why) {
    try {
        return fit_exponential_decay(lengths, means);
    } catch (const NumericalError& e) {
        if (ok) *ok = false;
        if (why) *why = e.what();
        DecayFit raw;
        raw.lengths = lengths;
        raw.means = means;
        return raw;
    }
}

}  // namespace

std::vector<int> default_lengths() { return {2, 4, 8, 16, 32, 64, 128, 256}; }

std::vector<double> noisy_distribution(const Circuit& circuit, const NoiseModel& noise, int shots, Rng& rng) {
    const SquashedDensityState rho = run_density(circuit, noise);
    std::vector<double> p = apply_readout(rho.probabilities(), circuit.n_qubits(), noise.readout);
    if (shots <= 0) return p;
    std::vector<double> cdf(p.size());
    std::partial_sum(p.begin(), p.end(), cdf.begin());
    std::vector<long> counts(p.size(), 0);
    for (int s = 0; s < shots; ++s) {
        const double u = uniform01(rng) * cdf.back();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        ++counts[std::min<std::size_t>(it - cdf.begin(), p.size() - 1)];
    }
    std::vector<double> freq(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) freq[i] = static_cast<double>(counts[i]) / shots;
    return freq;
}

// ---------------------------------------------------------------- RB

Circuit rb_sequence(int n, int m, Rng& rng) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    Circuit c(n);
    std::vector<Gate> total;
    for (int i = 0; i < m; ++i) {
        const std::vector<Gate> w = clifford_sample(n, rng);
        c.add(Gate::raw(word_unitary(w, n), all));
        total.insert(total.end(), w.begin(), w.end());
    }
    c.add(Gate::raw(word_unitary(clifford_inverse(total, n), n), all));
    return c;
}

RBResult rb_run(const RBConfig& cfg, const NoiseModel& noise) {
    if (cfg.n < 1 || cfg.n > 2) throw InputError("RB supports 1 or 2 qubits");
    if (cfg.sequences < 1) throw InputError("RB needs at least one sequence per length");
    check_lengths(cfg.lengths, 3);
    const std::size_t L = cfg.lengths.size(), K = cfg.sequences;
    RBResult res;
    res.survivals.assign(L, std::vector<double>(K, 0.0));
    parallel_for(static_cast<int>(L * K), [&](int job) {
        const std::size_t li = job / K, k = job % K;
        Rng rng(derive_seed(cfg.seed, stream_id(li, k)));
        const Circuit seq = rb_sequence(cfg.n, cfg.lengths[li], rng);
        res.survivals[li][k] = noisy_distribution(seq, noise, cfg.shots, rng)[0];
    });
    std::vector<double> lengths, means;
    for (std::size_t li = 0; li < L; ++li) {
        lengths.push_back(cfg.lengths[li]);
        means.push_back(std::accumulate(res.survivals[li].begin(), res.survivals[li].end(), 0.0) / K);
    }
    res.fit = fit_or_raw(lengths, means, &res.fit_ok, &res.fit_error);
    res.error_rate = decay_to_error_rate(res.fit.p, cfg.n);
    return res;
}

// ---------------------------------------------------------------- XEB

Gate xeb_gate(int k, int qubit) {
    const double phi = k * kPi / 4.0, c = std::cos(kPi / 4.0), s = std::sin(kPi / 4.0);
    Matrix u(2, 2);
    // cos(pi/4) I - i sin(pi/4) (cos phi X + sin phi Y)
    u(0, 0) = c;
    u(1, 1) = c;
    u(0, 1) = -kI * s * std::exp(-kI * phi);
    u(1, 0) = -kI * s * std::exp(kI * phi);
    return Gate::raw(u, {qubit});
}

double cross_entropy(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw InputError("cross_entropy: size mismatch");
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != 0.0) h -= p[i] * std::log(std::max(q[i], 1e-300));
    return h;
}

namespace {

// Numerator and denominator of alpha; pooled over sequences so that sequences whose
// ideal distribution is uniform (zero denominator) contribute without dividing by zero.
std::pair<double, double> alpha_parts(const std::vector<double>& measured, const std::vector<double>& ideal) {
    const std::vector<double> u(ideal.size(), 1.0 / static_cast<double>(ideal.size()));
    const double hu = cross_entropy(u, ideal);
    return {hu - cross_entropy(measured, ideal), hu - cross_entropy(ideal, ideal)};
}

}  // namespace

double xeb_alpha(const std::vector<double>& measured, const std::vector<double>& ideal) {
    const auto [num, den] = alpha_parts(measured, ideal);
    if (std::abs(den) < 1e-14) throw NumericalError("xeb_alpha: ideal distribution is uniform");
    return num / den;
}

XEBResult xeb_run(const XEBConfig& cfg, const NoiseModel& noise) {
    if (cfg.n != 1 && cfg.n != 2) throw InputError("XEB supports single- or two-qubit mode");
    if (cfg.sequences < 1) throw InputError("XEB needs at least one sequence per length");
    check_lengths(cfg.lengths, 3);
    const std::size_t L = cfg.lengths.size(), K = cfg.sequences;
    const int n = cfg.n;

    // parts[kind][li][k] = (numerator, denominator); kind 0 = main, 1/2 = 1q references
    const int kinds = n == 1 ? 1 : 3;
    std::vector<std::vector<std::vector<std::pair<double, double>>>> parts(
        kinds, std::vector<std::vector<std::pair<double, double>>>(L, std::vector<std::pair<double, double>>(K)));

    parallel_for(static_cast<int>(L * K), [&](int job) {
        const std::size_t li = job / K, k = job % K;
        const int m = cfg.lengths[li];
        Rng rng(derive_seed(cfg.seed, stream_id(li, k)));
        auto layer = [&](Circuit& c) {
            for (int q = 0; q < n; ++q) c.add(xeb_gate(static_cast<int>(uniform_index(rng, 8)), q));
        };
        Circuit main(n);
        for (int i = 0; i < m; ++i) {
            layer(main);
            if (n == 2) main.add(GateKind::CZ, {0, 1});
        }
        layer(main);
        const std::vector<double> ideal = simulate(main).probabilities();
        parts[0][li][k] = alpha_parts(noisy_distribution(main, noise, cfg.shots, rng), ideal);
        if (n == 2) {
            // simultaneous single-qubit reference with the same layer structure, no CZ
            Circuit ref(n);
            for (int i = 0; i <= m; ++i) layer(ref);
            const std::vector<double> ref_ideal = simulate(ref).probabilities();
            const std::vector<double> ref_meas = noisy_distribution(ref, noise, cfg.shots, rng);
            for (int q = 0; q < 2; ++q)
                parts[1 + q][li][k] = alpha_parts(marginal(ref_meas, n, q), marginal(ref_ideal, n, q));
        }
    });

    auto pooled = [&](int kind) {
        std::vector<double> a(L);
        for (std::size_t li = 0; li < L; ++li) {
            double num = 0.0, den = 0.0;
            for (const auto& [x, y] : parts[kind][li]) {
                num += x;
                den += y;
            }
            if (std::abs(den) < 1e-14) throw NumericalError("XEB: all sequences at one length had uniform ideal output");
            a[li] = num / den;
        }
        return a;
    };

    XEBResult res;
    for (int m : cfg.lengths) res.lengths.push_back(m);
    res.alphas = pooled(0);
    res.fit = fit_or_raw(res.lengths, res.alphas, &res.fit_ok, &res.fit_error);
    res.p = res.fit.p;
    if (n == 2) {
        for (int q = 0; q < 2; ++q)
            res.single_qubit_fits.push_back(fit_or_raw(res.lengths, pooled(1 + q), &res.fit_ok, &res.fit_error));
        // cycle fidelity divided by the two single-qubit layer fidelities
        res.p = res.fit.p / (res.single_qubit_fits[0].p * res.single_qubit_fits[1].p);
    }
    const double N = std::ldexp(1.0, n);
    res.r = (N - 1.0) / N * (1.0 - res.p);
    res.r_pauli = (N - 1.0) / N * res.r;
    return res;
}

// ---------------------------------------------------------------- RQC

char rqc_pattern(int cycle) { return "ABCDCDAB"[cycle % 8]; }

std::vector<std::pair<int, int>> rqc_pattern_edges(int rows, int cols, char pattern) {
    std::vector<std::pair<int, int>> e;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int q = r * cols + c;
            if (pattern == 'A' && c % 2 == 0 && c + 1 < cols) e.emplace_back(q, q + 1);
            if (pattern == 'B' && c % 2 == 1 && c + 1 < cols) e.emplace_back(q, q + 1);
            if (pattern == 'C' && r % 2 == 0 && r + 1 < rows) e.emplace_back(q, q + cols);
            if (pattern == 'D' && r % 2 == 1 && r + 1 < rows) e.emplace_back(q, q + cols);
        }
    return e;
}

Circuit rqc_generate(int rows, int cols, int cycles, Rng& rng) {
    if (rows < 1 || cols < 1 || cycles < 0) throw InputError("rqc_generate: invalid grid or cycle count");
    const int n = rows * cols;
    Circuit c(n);
    // sqrt(W): pi/2 about (X + Y)/sqrt(2)
    Matrix w(2, 2);
    const double h = std::sqrt(0.5);
    w(0, 0) = h;
    w(1, 1) = h;
    w(0, 1) = -kI * h * std::exp(-kI * kPi / 4.0);
    w(1, 0) = -kI * h * std::exp(kI * kPi / 4.0);
    std::vector<int> last(n, -1);
    auto layer = [&] {
        for (int q = 0; q < n; ++q) {
            int g = static_cast<int>(uniform_index(rng, last[q] < 0 ? 3 : 2));
            if (last[q] >= 0 && g >= last[q]) ++g;  // skip the previous choice
            last[q] = g;
            if (g == 0) c.add(Gate::rotation(GateKind::Rx, q, Param{kPi / 2}));
            else if (g == 1) c.add(Gate::rotation(GateKind::Ry, q, Param{kPi / 2}));
            else c.add(Gate::raw(w, {q}));
        }
    };
    for (int i = 0; i < cycles; ++i) {
        layer();
        for (auto [a, b] : rqc_pattern_edges(rows, cols, rqc_pattern(i))) c.add(GateKind::CZ, {a, b});
    }
    layer();
    return c;
}

XEBFidelity linear_xeb_fidelity(const std::vector<double>& ideal, const std::vector<std::uint64_t>& samples) {
    if (samples.empty()) throw InputError("linear XEB needs at least one sample");
    const double d = static_cast<double>(ideal.size());
    double s = 0.0, s2 = 0.0;
    for (auto x : samples) {
        const double v = d * ideal.at(x);
        s += v;
        s2 += v * v;
    }
    const double N = static_cast<double>(samples.size());
    const double mean = s / N;
    const double var = samples.size() > 1 ? std::max(0.0, (s2 - N * mean * mean) / (N - 1.0)) : 0.0;
    return {mean - 1.0, std::sqrt(var / N)};
}

XEBFidelity linear_xeb_fidelity(const Circuit& circuit, const std::vector<std::string>& samples) {
    if (circuit.n_qubits() > 20)
        throw BudgetError("linear XEB needs ideal probabilities; width exceeds 20 qubits",
                          (std::uint64_t{16}) << circuit.n_qubits());
    const std::vector<double> ideal = simulate(circuit).probabilities();
    std::vector<std::uint64_t> idx;
    idx.reserve(samples.size());
    for (const auto& s : samples) {
        if (static_cast<int>(s.size()) != circuit.n_qubits()) throw InputError("sample width differs from circuit");
        idx.push_back(bits_to_index(s));
    }
    return linear_xeb_fidelity(ideal, idx);
}

// ---------------------------------------------------------------- QV

Matrix haar_unitary(int dim, Rng& rng) {
    Matrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = cplx(normal(rng), normal(rng)) / std::sqrt(2.0);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const cplx d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

Matrix haar_su4(Rng& rng) {
    Matrix u = haar_unitary(4, rng);
    const cplx det = u.determinant();
    return u * std::pow(det, -0.25);
}

double average_gate_fidelity(const Matrix& u, const Matrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols()) throw InputError("average_gate_fidelity: size mismatch");
    const double d = static_cast<double>(u.rows());
    const double t = std::norm((u.adjoint() * v).trace());
    return (t / d + 1.0) / (d + 1.0);
}

Circuit qv_circuit(int m, Rng& rng) {
    if (m < 1) throw InputError("qv_circuit: width must be >= 1");
    Circuit c(m);
    std::vector<int> perm(m);
    for (int layer = 0; layer < m; ++layer) {
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
        for (int k = 0; 2 * k + 1 < m; ++k) c.add(Gate::raw(haar_su4(rng), {perm[2 * k], perm[2 * k + 1]}));
    }
    return c;
}

double median_probability(std::vector<double> probs) {
    if (probs.empty()) throw InputError("median of an empty distribution");
    std::sort(probs.begin(), probs.end());
    const std::size_t h = probs.size() / 2;
    return probs.size() % 2 ? probs[h] : 0.5 * (probs[h] + probs[h - 1]);
}

std::vector<bool> heavy_set(const std::vector<double>& probs) {
    const double med = median_probability(probs);
    std::vector<bool> heavy(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) heavy[i] = probs[i] > med;
    return heavy;
}

QVResult qv_run(const QVConfig& cfg, const NoiseModel& noise) {
    if (cfg.min_width < 1 || cfg.max_width < cfg.min_width) throw InputError("qv_run: invalid width range");
    if (cfg.circuits < 1) throw InputError("qv_run: need at least one circuit per width");
    if (cfg.max_width > 12)
        throw BudgetError("quantum volume needs exact ideal and noisy simulation; width exceeds 12",
                          std::uint64_t{16} << (2 * cfg.max_width));
    QVResult res;
    for (int m = cfg.min_width; m <= cfg.max_width; ++m) {
        QVWidth w;
        w.width = m;
        w.heavy.assign(cfg.circuits, 0.0);
        std::vector<int> swaps(cfg.circuits, 0);
        parallel_for(cfg.circuits, [&](int i) {
            Rng rng(derive_seed(cfg.seed, stream_id(static_cast<std::size_t>(m), i)));
            const Circuit c = qv_circuit(m, rng);
            const std::vector<bool> heavy = heavy_set(simulate(c).probabilities());
            std::vector<double> q;
            if (cfg.topology) {
                const CouplingGraph g = cfg.topology(m);
                if (g.n_nodes() != m) throw InputError("qv_run: topology must have exactly m nodes");
                const RouteResult r = route(c, g);
                // P_final U must equal the routed unitary
                Matrix perm = Matrix::Zero(std::int64_t{1} << m, std::int64_t{1} << m);
                for (std::uint64_t x = 0; x < (1ull << m); ++x) {
                    std::uint64_t y = 0;
                    for (int l = 0; l < m; ++l)
                        if (x >> (m - 1 - l) & 1) y |= 1ull << (m - 1 - r.final.l2p[l]);
                    perm(y, x) = 1.0;
                }
                const double f = average_gate_fidelity(perm * circuit_unitary(c), circuit_unitary(r.circuit));
                if (1.0 - f > 1e-10) throw NumericalError("qv_run: routed circuit is not equivalent to the original");
                const std::vector<double> phys = noisy_distribution(r.circuit, noise, cfg.shots, rng);
                q.assign(phys.size(), 0.0);
                for (std::uint64_t x = 0; x < phys.size(); ++x) {
                    std::uint64_t y = 0;  // physical index -> logical index
                    for (int l = 0; l < m; ++l)
                        if (x >> (m - 1 - r.final.l2p[l]) & 1) y |= 1ull << (m - 1 - l);
                    q[y] += phys[x];
                }
                swaps[i] = r.swaps;
            } else {
                q = noisy_distribution(c, noise, cfg.shots, rng);
            }
            double h = 0.0;
            for (std::size_t x = 0; x < q.size(); ++x)
                if (heavy[x]) h += q[x];
            w.heavy[i] = std::clamp(h, 0.0, 1.0);
        });
        w.mean_heavy = std::accumulate(w.heavy.begin(), w.heavy.end(), 0.0) / cfg.circuits;
        w.passed = w.mean_heavy > 2.0 / 3.0;
        w.swaps = std::accumulate(swaps.begin(), swaps.end(), 0);
        if (w.passed) res.log2_volume = std::max(res.log2_volume, m);
        res.widths.push_back(std::move(w));
    }
    return res;
}

// ---------------------------------------------------------------- mirror circuits

MirrorCircuit mirror_circuit(const Circuit& base, Rng& rng) {
    for (const Gate& g : base.ops())
        if (!is_clifford_kind(g.kind))
            throw InputError("mirror circuits need a Clifford base; found '" + std::string(kind_name(g.kind)) + "'");
    const int n = base.n_qubits();
    // Pauli eigenstate preparation: |0>, |1>, |+>, |->, |+i>, |-i>
    Circuit prep(n);
    for (int q = 0; q < n; ++q) {
        const int s = static_cast<int>(uniform_index(rng, 6));
        if (s % 2 == 1) prep.add(GateKind::X, {q});
        if (s >= 2) prep.add(GateKind::H, {q});
        if (s >= 4) prep.add(GateKind::S, {q});
    }
    std::string word(n, 'I');
    for (int q = 0; q < n; ++q) word[q] = "IXYZ"[uniform_index(rng, 4)];

    MirrorCircuit out{Circuit(n), std::string(n, '0')};
    for (const Gate& g : prep.ops()) out.circuit.add(g);
    for (const Gate& g : base.ops()) out.circuit.add(g);
    static const GateKind kLetter[4] = {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z};
    for (int q = 0; q < n; ++q)
        if (word[q] != 'I') out.circuit.add(kLetter[std::string_view("IXYZ").find(word[q])], {q});
    const Circuit undo_base = inverse(base), undo_prep = inverse(prep);
    for (const Gate& g : undo_base.ops()) out.circuit.add(g);
    for (const Gate& g : undo_prep.ops()) out.circuit.add(g);

    // The whole circuit is D Q D^dagger with D = prep^dagger C^dagger, so |0> maps to
    // (D Q D^dagger)|0>; the X part of that Pauli is the outcome.
    PhasedPauli p{PauliString(word), 0};
    for (const Gate& g : undo_base.ops()) p = pauli_apply_conjugation(p, g);
    for (const Gate& g : undo_prep.ops()) p = pauli_apply_conjugation(p, g);
    for (int q = 0; q < n; ++q) {
        const auto l = p.pauli.letters[q];
        if (l == 1 || l == 2) out.expected[q] = '1';
    }
    return out;
}

double mirror_polarization(double success, int width) {
    const double u = std::ldexp(1.0, -width);
    return (success - u) / (1.0 - u);
}

MirrorResult mirror_run(const Circuit& base, const NoiseModel& noise, const MirrorConfig& cfg) {
    if (cfg.repetitions < 1) throw InputError("mirror_run: need at least one repetition");
    MirrorResult res;
    res.success.assign(cfg.repetitions, 0.0);
    res.polarizations.assign(cfg.repetitions, 0.0);
    parallel_for(cfg.repetitions, [&](int i) {
        Rng rng(derive_seed(cfg.seed, i));
        const MirrorCircuit mc = mirror_circuit(base, rng);
        const std::vector<double> q = noisy_distribution(mc.circuit, noise, cfg.shots, rng);
        res.success[i] = q[bits_to_index(mc.expected)];
        res.polarizations[i] = mirror_polarization(res.success[i], base.n_qubits());
    });
    res.polarization = std::accumulate(res.polarizations.begin(), res.polarizations.end(), 0.0) / cfg.repetitions;
    return res;
}

}  // namespace nisq
