#include "nisq/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#ifdef NISQ_HAVE_OPENMP
#include <omp.h>
#endif

namespace nisq {

namespace {

std::atomic<std::uint64_t> g_budget{std::uint64_t{4} << 30};
std::atomic<int> g_block{64};
std::atomic<int> g_live{0};
std::atomic<int> g_peak{0};
std::atomic<int> g_threads{0};

void count_alloc() {
    const int now = ++g_live;
    int peak = g_peak.load();
    while (now > peak && !g_peak.compare_exchange_weak(peak, now)) {
    }
}

// Partial sums over fixed-size chunks, combined in order, so reductions do not
// depend on the worker count.
constexpr std::uint64_t kReduceChunk = 1u << 12;

template <class T, class F>
T chunked_sum(std::uint64_t n, F&& term) {
    const std::uint64_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<T> partial(chunks, T{});
#ifdef NISQ_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (chunks > 4)
#endif
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        T acc{};
        const std::uint64_t lo = c * kReduceChunk, hi = std::min(n, lo + kReduceChunk);
        for (std::uint64_t i = lo; i < hi; ++i) acc += term(i);
        partial[c] = acc;
    }
    T total{};
    for (const T& p : partial) total += p;
    return total;
}

std::string human_bytes(std::uint64_t bytes) {
    const char* units[] = {"B", "KiB", "MiB", "GiB", "TiB", "PiB"};
    double v = static_cast<double>(bytes);
    int u = 0;
    while (v >= 1024.0 && u < 5) {
        v /= 1024.0;
        ++u;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g %s", v, units[u]);
    return buf;
}

}  // namespace

std::uint64_t memory_budget() { return g_budget.load(); }
void set_memory_budget(std::uint64_t bytes) { g_budget = bytes; }
int kernel_block_size() { return g_block.load(); }
void set_kernel_block_size(int block) { g_block = std::max(1, block); }

void set_num_threads(int threads) {
    g_threads = threads;
#ifdef NISQ_HAVE_OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
}

int num_threads() {
#ifdef NISQ_HAVE_OPENMP
    return g_threads > 0 ? g_threads.load() : omp_get_max_threads();
#else
    return 1;
#endif
}

// ---------------------------------------------------------------- kernel

void apply_matrix_inplace(std::span<cplx> amps, int n, const Matrix& m, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    const std::size_t local = std::size_t{1} << k;
    if (m.rows() != static_cast<Eigen::Index>(local) || m.cols() != m.rows())
        throw InputError("gate matrix size does not match target count");

    // Canonicalize targets ascending; permute the matrix to match.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return targets[x] < targets[y]; });
    std::vector<std::size_t> to_orig(local);
    for (std::size_t l = 0; l < local; ++l) {
        std::size_t o = 0;
        for (int j = 0; j < k; ++j) {
            const std::size_t bit = (l >> (k - 1 - j)) & 1U;
            o |= bit << (k - 1 - order[j]);
        }
        to_orig[l] = o;
    }
    Matrix pm(local, local);
    for (std::size_t r = 0; r < local; ++r)
        for (std::size_t c = 0; c < local; ++c) pm(r, c) = m(to_orig[r], to_orig[c]);

    // Bit positions of the sorted targets; offsets[l] places local index l in the global index.
    std::vector<int> pos(k);
    for (int j = 0; j < k; ++j) pos[j] = n - 1 - targets[order[j]];
    std::vector<std::uint64_t> offsets(local);
    for (std::size_t l = 0; l < local; ++l) {
        std::uint64_t off = 0;
        for (int j = 0; j < k; ++j)
            if ((l >> (k - 1 - j)) & 1U) off |= std::uint64_t{1} << pos[j];
        offsets[l] = off;
    }
    std::vector<int> ascending_pos(pos.rbegin(), pos.rend());
    auto base_index = [&](std::uint64_t b) {
        for (int p : ascending_pos) {
            const std::uint64_t low = b & ((std::uint64_t{1} << p) - 1);
            b = ((b >> p) << (p + 1)) | low;
        }
        return b;
    };

    const std::uint64_t bases = std::uint64_t{1} << (n - k);
    const std::uint64_t block = static_cast<std::uint64_t>(kernel_block_size());
    const std::uint64_t nblocks = (bases + block - 1) / block;

#ifdef NISQ_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (bases >= (1u << 14))
#endif
    for (std::int64_t blk = 0; blk < static_cast<std::int64_t>(nblocks); ++blk) {
        const std::uint64_t lo = blk * block, hi = std::min(bases, lo + block);
        const Eigen::Index width = static_cast<Eigen::Index>(hi - lo);
        // Scratch is O(2^k * block), independent of n.
        Matrix gathered(local, width);
        std::vector<std::uint64_t> base(width);
        for (Eigen::Index c = 0; c < width; ++c) {
            base[c] = base_index(lo + c);
            for (std::size_t l = 0; l < local; ++l) gathered(l, c) = amps[base[c] | offsets[l]];
        }
        Matrix out = pm * gathered;
        for (Eigen::Index c = 0; c < width; ++c)
            for (std::size_t l = 0; l < local; ++l) amps[base[c] | offsets[l]] = out(l, c);
    }
}

namespace {

void apply_ccz(std::span<cplx> amps, int n, std::span<const int> targets) {
    std::uint64_t mask = 0;
    for (int t : targets) mask |= std::uint64_t{1} << (n - 1 - t);
    const std::uint64_t dim = amps.size();
#ifdef NISQ_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (dim >= (1u << 16))
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(dim); ++i)
        if ((static_cast<std::uint64_t>(i) & mask) == mask) amps[i] = -amps[i];
}

}  // namespace

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(int n, std::vector<cplx> amps) : n_(n), amps_(std::move(amps)) { count_alloc(); }
StateVector::StateVector(const StateVector& other) : n_(other.n_), amps_(other.amps_) { count_alloc(); }
StateVector::StateVector(StateVector&& other) noexcept : n_(other.n_), amps_(std::move(other.amps_)) {
    count_alloc();
}
StateVector& StateVector::operator=(const StateVector& other) = default;
StateVector& StateVector::operator=(StateVector&& other) noexcept = default;
StateVector::~StateVector() { --g_live; }

int StateVector::live_buffers() { return g_live.load(); }
int StateVector::peak_buffers() { return g_peak.load(); }
void StateVector::reset_peak() { g_peak = g_live.load(); }

StateVector StateVector::zero(int n, std::uint64_t budget_bytes) {
    if (n < 1) throw InputError("state needs at least one qubit");
    if (n > 62) throw BudgetError("state of " + std::to_string(n) + " qubits is not addressable", ~0ULL);
    const std::uint64_t bytes = (std::uint64_t{1} << n) * sizeof(cplx);
    if (bytes > budget_bytes)
        throw BudgetError("state vector of " + std::to_string(n) + " qubits needs " + human_bytes(bytes) +
                              " (" + std::to_string(bytes) + " bytes), budget is " + human_bytes(budget_bytes),
                          bytes);
    std::vector<cplx> amps(std::size_t{1} << n, cplx{0.0, 0.0});
    amps[0] = 1.0;
    return StateVector(n, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || !std::has_single_bit(dim)) throw InputError("amplitude count must be a power of two >= 2");
    return StateVector(std::countr_zero(dim), std::move(amplitudes));
}

void StateVector::apply(const Gate& gate, std::span<const double> params) {
    for (int t : gate.targets)
        if (t < 0 || t >= n_) throw InputError("gate target outside state width");
    if (gate.kind == GateKind::CCZ) {
        apply_ccz(amps_, n_, gate.targets);
        return;
    }
    if (gate.kind == GateKind::I) return;
    apply_matrix_inplace(amps_, n_, gate_matrix(gate, params), gate.targets);
}

void StateVector::apply_matrix(const Matrix& m, std::span<const int> targets) {
    apply_matrix_inplace(amps_, n_, m, targets);
}

void StateVector::apply_circuit(const Circuit& circuit, std::span<const double> params) {
    if (circuit.n_qubits() != n_) throw InputError("circuit width does not match state width");
    for (const Gate& g : circuit.ops()) apply(g, params);
}

cplx StateVector::amplitude(const std::string& bits) const {
    if (static_cast<int>(bits.size()) != n_)
        throw InputError("bitstring length " + std::to_string(bits.size()) + " does not match " +
                         std::to_string(n_) + " qubits");
    return amps_[bits_to_index(bits)];
}

cplx StateVector::pauli_matrix_element(const PauliString& p, const StateVector& other) const {
    if (p.size() != n_ || other.n_ != n_) throw InputError("Pauli width does not match state width");
    const std::uint64_t x = p.x_mask(), z = p.z_mask();
    int ny = 0;
    for (auto l : p.letters) ny += l == 2;
    static constexpr cplx kPow[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx yphase = kPow[ny % 4];
    const auto& a = amps_;
    const auto& b = other.amps_;
    cplx s = chunked_sum<cplx>(dim(), [&](std::uint64_t i) {
        const std::uint64_t j = i ^ x;
        const double sign = (std::popcount(j & z) & 1) ? -1.0 : 1.0;
        return std::conj(a[i]) * b[j] * sign;
    });
    return s * yphase * p.coefficient;
}

double StateVector::expectation(const PauliString& p) const {
    return pauli_matrix_element(p, *this).real();
}

double StateVector::expectation(const Observable& obs) const {
    double total = 0.0;
    for (const auto& t : obs.terms) {
        if (t.size() != n_)
            throw InputError("observable width " + std::to_string(t.size()) + " does not match " +
                             std::to_string(n_) + " qubits");
        total += expectation(t);
    }
    return total;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(dim());
    for (std::uint64_t i = 0; i < dim(); ++i) p[i] = std::norm(amps_[i]);
    return p;
}

namespace {

std::vector<std::uint64_t> draw(const std::vector<double>& probs, int shots, Rng& rng) {
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    const double total = cdf.back();
    std::vector<std::uint64_t> out;
    out.reserve(shots);
    for (int s = 0; s < shots; ++s) {
        const double r = uniform01(rng) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        std::uint64_t idx = static_cast<std::uint64_t>(it - cdf.begin());
        if (idx >= probs.size()) idx = probs.size() - 1;
        while (probs[idx] == 0.0 && idx > 0) --idx;
        out.push_back(idx);
    }
    return out;
}

}  // namespace

std::vector<std::uint64_t> StateVector::sample_indices(int shots, Rng& rng) const {
    if (shots < 1) throw InputError("shots must be >= 1");
    return draw(probabilities(), shots, rng);
}

std::vector<std::string> StateVector::sample(int shots, Rng& rng) const {
    std::vector<std::string> out;
    for (auto idx : sample_indices(shots, rng)) out.push_back(index_to_bits(idx, n_));
    return out;
}

int StateVector::measure_qubit(int q, Rng& rng) {
    if (q < 0 || q >= n_) throw InputError("qubit index out of range");
    const std::uint64_t mask = std::uint64_t{1} << (n_ - 1 - q);
    const double p1 = chunked_sum<double>(dim(), [&](std::uint64_t i) {
        return (i & mask) ? std::norm(amps_[i]) : 0.0;
    });
    const int outcome = uniform01(rng) < p1 ? 1 : 0;
    const double p = outcome ? p1 : 1.0 - p1;
    if (p < 1e-12) throw NumericalError("measurement selected an outcome of probability below 1e-12");
    const double scale = 1.0 / std::sqrt(p);
    for (std::uint64_t i = 0; i < dim(); ++i) {
        const bool one = (i & mask) != 0;
        amps_[i] = (one == static_cast<bool>(outcome)) ? amps_[i] * scale : cplx{0.0, 0.0};
    }
    return outcome;
}

double StateVector::norm2() const {
    return chunked_sum<double>(dim(), [&](std::uint64_t i) { return std::norm(amps_[i]); });
}

cplx StateVector::inner(const StateVector& other) const {
    if (other.n_ != n_) throw InputError("state width mismatch");
    return chunked_sum<cplx>(dim(), [&](std::uint64_t i) { return std::conj(amps_[i]) * other.amps_[i]; });
}

StateVector simulate(const Circuit& circuit, std::span<const double> params) {
    StateVector s = StateVector::zero(circuit.n_qubits());
    s.apply_circuit(circuit, params);
    return s;
}

Matrix circuit_unitary(const Circuit& circuit, std::span<const double> params) {
    const int n = circuit.n_qubits();
    if (n > 12) throw BudgetError("circuit_unitary is limited to 12 qubits", std::uint64_t{1} << (2 * n));
    const std::uint64_t dim = std::uint64_t{1} << n;
    Matrix u(dim, dim);
    std::vector<cplx> col(dim);
    for (std::uint64_t j = 0; j < dim; ++j) {
        std::fill(col.begin(), col.end(), cplx{});
        col[j] = 1.0;
        for (const Gate& g : circuit.ops()) {
            if (g.kind == GateKind::CCZ) {
                apply_ccz(col, n, g.targets);
            } else if (g.kind != GateKind::I) {
                apply_matrix_inplace(col, n, gate_matrix(g, params), g.targets);
            }
        }
        for (std::uint64_t i = 0; i < dim; ++i) u(i, j) = col[i];
    }
    return u;
}

// ---------------------------------------------------------------- Schroedinger-Feynman

SplitGate split_gate(const Matrix& m, std::span<const int> targets, std::span<const int> left_qubits,
                     double cutoff) {
    const int k = static_cast<int>(targets.size());
    std::vector<int> li, ri;  // positions within the gate's target list
    for (int j = 0; j < k; ++j) {
        if (std::find(left_qubits.begin(), left_qubits.end(), targets[j]) != left_qubits.end())
            li.push_back(j);
        else
            ri.push_back(j);
    }
    const int ka = static_cast<int>(li.size()), kb = static_cast<int>(ri.size());
    const Eigen::Index da = Eigen::Index{1} << ka, db = Eigen::Index{1} << kb;
    auto local_index = [&](Eigen::Index a, Eigen::Index b) {
        Eigen::Index idx = 0;
        for (int j = 0; j < ka; ++j)
            if ((a >> (ka - 1 - j)) & 1) idx |= Eigen::Index{1} << (k - 1 - li[j]);
        for (int j = 0; j < kb; ++j)
            if ((b >> (kb - 1 - j)) & 1) idx |= Eigen::Index{1} << (k - 1 - ri[j]);
        return idx;
    };
    // R[(a',a),(b',b)] = M[(a',b'),(a,b)]
    Matrix r(da * da, db * db);
    for (Eigen::Index ao = 0; ao < da; ++ao)
        for (Eigen::Index ai = 0; ai < da; ++ai)
            for (Eigen::Index bo = 0; bo < db; ++bo)
                for (Eigen::Index bi = 0; bi < db; ++bi)
                    r(ao * da + ai, bo * db + bi) = m(local_index(ao, bo), local_index(ai, bi));
    Eigen::BDCSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SplitGate out;
    for (int j : li) out.left_targets.push_back(targets[j]);
    for (int j : ri) out.right_targets.push_back(targets[j]);
    const auto& sv = svd.singularValues();
    for (Eigen::Index s = 0; s < sv.size(); ++s) {
        if (sv(s) < cutoff) continue;
        const double w = std::sqrt(sv(s));
        Matrix u(da, da), v(db, db);
        for (Eigen::Index ao = 0; ao < da; ++ao)
            for (Eigen::Index ai = 0; ai < da; ++ai) u(ao, ai) = w * svd.matrixU()(ao * da + ai, s);
        for (Eigen::Index bo = 0; bo < db; ++bo)
            for (Eigen::Index bi = 0; bi < db; ++bi) v(bo, bi) = w * std::conj(svd.matrixV()(bo * db + bi, s));
        out.left.push_back(std::move(u));
        out.right.push_back(std::move(v));
    }
    return out;
}

namespace {

struct SideOp {
    Matrix m;
    std::vector<int> targets;  // local indices within the side
};

struct Segment {
    std::vector<SideOp> a_ops, b_ops;
    bool cross = false;
    SplitGate split;  // targets already mapped to local indices
};

}  // namespace

SFResult sf_amplitude(const Circuit& circuit, const std::string& bits, const Bipartition& part,
                      std::span<const double> params, std::uint64_t path_budget) {
    const int n = circuit.n_qubits();
    if (static_cast<int>(bits.size()) != n) throw InputError("bitstring length does not match circuit width");
    std::vector<int> side(n, -1), local(n, -1);
    auto assign = [&](const std::vector<int>& qs, int s) {
        std::vector<int> sorted = qs;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const int q = sorted[i];
            if (q < 0 || q >= n || side[q] != -1) throw InputError("bipartition is not a partition of the qubits");
            side[q] = s;
            local[q] = static_cast<int>(i);
        }
        return sorted;
    };
    const auto qa = assign(part.a, 0);
    const auto qb = assign(part.b, 1);
    if (qa.empty() || qb.empty() || std::count(side.begin(), side.end(), -1))
        throw InputError("bipartition must cover all qubits with two non-empty groups");

    std::vector<Segment> segs(1);
    SFResult result;
    result.path_count = 1;
    for (const Gate& g : circuit.ops()) {
        if (g.kind == GateKind::I) continue;
        const Matrix m = gate_matrix(g, params);
        bool in_a = true, in_b = true;
        for (int t : g.targets) {
            in_a &= side[t] == 0;
            in_b &= side[t] == 1;
        }
        if (in_a || in_b) {
            SideOp op{m, {}};
            for (int t : g.targets) op.targets.push_back(local[t]);
            (in_a ? segs.back().a_ops : segs.back().b_ops).push_back(std::move(op));
            continue;
        }
        SplitGate split = split_gate(m, g.targets, qa);
        for (int& t : split.left_targets) t = local[t];
        for (int& t : split.right_targets) t = local[t];
        result.path_count *= static_cast<std::uint64_t>(split.rank());
        ++result.cross_gates;
        if (result.path_count > path_budget)
            throw BudgetError("Schroedinger-Feynman path count " + std::to_string(result.path_count) +
                                  " exceeds budget " + std::to_string(path_budget),
                              result.path_count);
        Segment s;
        s.cross = true;
        s.split = std::move(split);
        segs.push_back(std::move(s));
        segs.emplace_back();
    }

    std::string bits_a, bits_b;
    for (int q : qa) bits_a.push_back(bits[q]);
    for (int q : qb) bits_b.push_back(bits[q]);

    std::function<cplx(std::size_t, StateVector&, StateVector&)> walk =
        [&](std::size_t si, StateVector& sa, StateVector& sb) -> cplx {
        for (; si < segs.size(); ++si) {
            const Segment& seg = segs[si];
            if (!seg.cross) {
                for (const auto& op : seg.a_ops) sa.apply_matrix(op.m, op.targets);
                for (const auto& op : seg.b_ops) sb.apply_matrix(op.m, op.targets);
                continue;
            }
            cplx total{0.0, 0.0};
            for (int s = 0; s < seg.split.rank(); ++s) {
                StateVector ca = sa, cb = sb;
                ca.apply_matrix(seg.split.left[s], seg.split.left_targets);
                cb.apply_matrix(seg.split.right[s], seg.split.right_targets);
                total += walk(si + 1, ca, cb);
            }
            return total;
        }
        return sa.amplitude(bits_a) * sb.amplitude(bits_b);
    };
    StateVector sa = StateVector::zero(static_cast<int>(qa.size()));
    StateVector sb = StateVector::zero(static_cast<int>(qb.size()));
    result.amplitude = walk(0, sa, sb);
    return result;
}

}  // namespace nisq
