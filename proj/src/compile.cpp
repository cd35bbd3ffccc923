#include "nisq/compile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>

#include "nisq/common.hpp"

namespace nisq {

// ---------------------------------------------------------------- GF(2)

F2Matrix F2Matrix::identity(int n) {
    F2Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

F2Matrix F2Matrix::from_rows(const std::vector<std::vector<int>>& rows) {
    const int n = static_cast<int>(rows.size());
    F2Matrix m(n);
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n) throw InputError("F2 matrix must be square");
        for (int c = 0; c < n; ++c) m(r, c) = static_cast<std::uint8_t>(rows[r][c] & 1);
    }
    return m;
}

void F2Matrix::add_row(int dst, int src) {
    for (int c = 0; c < n_; ++c) (*this)(dst, c) ^= (*this)(src, c);
}

F2Matrix F2Matrix::operator*(const F2Matrix& rhs) const {
    if (rhs.n_ != n_) throw InputError("F2 matrix size mismatch");
    F2Matrix out(n_);
    for (int r = 0; r < n_; ++r)
        for (int k = 0; k < n_; ++k)
            if ((*this)(r, k))
                for (int c = 0; c < n_; ++c) out(r, c) ^= rhs(k, c);
    return out;
}

bool F2Matrix::invertible() const {
    F2Matrix m = *this;
    for (int j = 0; j < n_; ++j) {
        int p = j;
        while (p < n_ && !m(p, j)) ++p;
        if (p == n_) return false;
        if (p != j) m.add_row(j, p);
        for (int r = 0; r < n_; ++r)
            if (r != j && m(r, j)) m.add_row(r, j);
    }
    return true;
}

F2Matrix cnot_to_matrix(const Circuit& circuit) {
    F2Matrix m = F2Matrix::identity(circuit.n_qubits());
    for (const Gate& g : circuit.ops()) {
        if (g.kind != GateKind::CX)
            throw InputError("cnot_to_matrix: non-CNOT gate '" + std::string(kind_name(g.kind)) + "'");
        m.add_row(g.targets[1], g.targets[0]);
    }
    return m;
}

Circuit matrix_to_cnot(const F2Matrix& input) {
    const int n = input.size();
    F2Matrix m = input;
    // Row operations E_k ... E_1 M = I; since each E is an involution, M = E_1 ... E_k,
    // and a circuit's matrix is the product in reverse gate order.
    std::vector<std::pair<int, int>> ops;  // (control, target) = row target ^= row control
    for (int j = 0; j < n; ++j) {
        if (!m(j, j)) {
            int p = j + 1;
            while (p < n && !m(p, j)) ++p;
            if (p == n) throw InputError("matrix_to_cnot: matrix is singular over GF(2)");
            m.add_row(j, p);
            ops.emplace_back(p, j);
        }
        for (int r = 0; r < n; ++r) {
            if (r != j && m(r, j)) {
                m.add_row(r, j);
                ops.emplace_back(j, r);
            }
        }
    }
    Circuit c(n);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) c.add(GateKind::CX, {it->first, it->second});
    return c;
}

// ---------------------------------------------------------------- fusion

namespace {

bool identity_up_to_phase(const Matrix& u) {
    const double d = static_cast<double>(u.rows());
    return std::abs(std::abs(u.trace()) / d - 1.0) < 1e-12;
}

// Matrix of a gate as it acts on the ordered qubit list `on` (1 or 2 entries).
Matrix embed(const Gate& g, const std::vector<int>& on) {
    const Matrix u = gate_matrix(g);
    if (g.targets == on) return u;
    if (on.size() == 2 && g.targets.size() == 2) {  // reversed order
        Matrix swap = Matrix::Zero(4, 4);
        swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
        return swap * u * swap;
    }
    // single-qubit gate on one of two wires
    const Matrix id = Matrix::Identity(2, 2);
    Matrix out(4, 4);
    const bool first = g.targets[0] == on[0];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const int hi_a = a >> 1, lo_a = a & 1, hi_b = b >> 1, lo_b = b & 1;
            out(a, b) = first ? u(hi_a, hi_b) * id(lo_a, lo_b) : id(hi_a, hi_b) * u(lo_a, lo_b);
        }
    return out;
}

Circuit fuse_single(const Circuit& circuit) {
    Circuit out(circuit.n_qubits());
    std::vector<std::vector<Gate>> pending(circuit.n_qubits());
    auto flush = [&](int q) {
        auto& run = pending[q];
        if (run.empty()) return;
        if (run.size() == 1) {
            if (!identity_up_to_phase(gate_matrix(run[0]))) out.add(run[0]);
        } else {
            Matrix u = Matrix::Identity(2, 2);
            for (const Gate& g : run) u = gate_matrix(g) * u;
            if (!identity_up_to_phase(u)) out.add(Gate::raw(u, {q}));
        }
        run.clear();
    };
    for (const Gate& g : circuit.ops()) {
        if (g.num_targets() == 1) {
            pending[g.targets[0]].push_back(g);
            continue;
        }
        for (int q : g.targets) flush(q);
        out.add(g);
    }
    for (int q = 0; q < circuit.n_qubits(); ++q) flush(q);
    return out;
}

// One absorption sweep; returns true when something changed.
bool absorb_once(std::vector<Gate>& ops) {
    bool changed = false;
    // single-qubit gates into the next (else previous) two-qubit gate on the wire
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].num_targets() != 1) continue;
        const int q = ops[i].targets[0];
        std::ptrdiff_t host = -1;
        bool after = true;
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const auto& t = ops[j].targets;
            if (std::find(t.begin(), t.end(), q) == t.end()) continue;
            if (ops[j].num_targets() == 2) host = static_cast<std::ptrdiff_t>(j);
            break;
        }
        if (host < 0) {
            after = false;
            for (std::size_t j = i; j-- > 0;) {
                const auto& t = ops[j].targets;
                if (std::find(t.begin(), t.end(), q) == t.end()) continue;
                if (ops[j].num_targets() == 2) host = static_cast<std::ptrdiff_t>(j);
                break;
            }
        }
        if (host < 0) continue;
        Gate& h = ops[host];
        const Matrix one = embed(ops[i], h.targets);
        const Matrix u = after ? Matrix(gate_matrix(h) * one) : Matrix(one * gate_matrix(h));
        h = Gate::raw(u, h.targets);
        ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(i));
        --i;
        changed = true;
    }
    // consecutive two-qubit gates on the same pair
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].num_targets() != 2) continue;
        const auto& t = ops[i].targets;
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const auto& s = ops[j].targets;
            const bool touches = std::find(s.begin(), s.end(), t[0]) != s.end() ||
                                 std::find(s.begin(), s.end(), t[1]) != s.end();
            if (!touches) continue;
            const bool same = s.size() == 2 && ((s[0] == t[0] && s[1] == t[1]) || (s[0] == t[1] && s[1] == t[0]));
            if (same) {
                const Matrix u = embed(ops[j], t) * gate_matrix(ops[i]);
                ops[i] = Gate::raw(u, t);
                ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(j));
                changed = true;
            }
            break;
        }
        if (ops[i].num_targets() == 2 && identity_up_to_phase(gate_matrix(ops[i]))) {
            ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(i));
            --i;
            changed = true;
        }
    }
    return changed;
}

}  // namespace

Circuit fuse_gates(const Circuit& circuit, FuseOptions options) {
    for (const Gate& g : circuit.ops())
        if (g.param && g.param->symbolic()) throw InputError("fuse_gates: parameters must be bound");
    Circuit out = fuse_single(circuit);
    if (!options.absorb_into_two_qubit) return out;
    std::vector<Gate> ops = out.ops();
    while (absorb_once(ops)) {
    }
    Circuit merged(circuit.n_qubits());
    for (Gate& g : ops) merged.add(std::move(g));
    return merged;
}

// ---------------------------------------------------------------- routing

Layout Layout::identity(int n) {
    Layout l;
    l.l2p.resize(n);
    for (int i = 0; i < n; ++i) l.l2p[i] = i;
    return l;
}

std::vector<int> Layout::p2l() const {
    std::vector<int> inv(l2p.size(), -1);
    for (std::size_t l = 0; l < l2p.size(); ++l) inv.at(l2p[l]) = static_cast<int>(l);
    return inv;
}

void Layout::validate() const {
    std::vector<char> seen(l2p.size(), 0);
    for (int p : l2p) {
        if (p < 0 || p >= size() || seen[p]) throw InputError("layout is not a bijection");
        seen[p] = 1;
    }
}

Circuit relabel_qubits(const Circuit& circuit, const std::vector<int>& map, int width) {
    Circuit out(width);
    out.set_param_names(circuit.param_names());
    for (Gate g : circuit.ops()) {
        for (int& t : g.targets) t = map.at(t);
        out.add(std::move(g));
    }
    return out;
}

RouteResult route(const Circuit& circuit, const CouplingGraph& graph) {
    return route(circuit, graph, Layout::identity(graph.n_nodes()), {});
}

RouteResult route(const Circuit& circuit, const CouplingGraph& graph, const Layout& initial) {
    return route(circuit, graph, initial, {});
}

RouteResult route(const Circuit& circuit, const CouplingGraph& graph, const Layout& initial, RouteOptions options) {
    const int n_phys = graph.n_nodes();
    if (circuit.n_qubits() > n_phys) throw InputError("route: circuit wider than the coupling graph");
    if (initial.size() != n_phys) throw InputError("route: layout size must equal the graph node count");
    initial.validate();

    const auto& ops = circuit.ops();
    for (const Gate& g : ops)
        if (g.num_targets() > 2) throw InputError("route: gates on more than two qubits must be decomposed first");

    // per-wire gate queues
    std::vector<std::vector<int>> wire(circuit.n_qubits());
    for (int i = 0; i < static_cast<int>(ops.size()); ++i)
        for (int q : ops[i].targets) wire[q].push_back(i);
    std::vector<std::size_t> head(circuit.n_qubits(), 0);
    auto ready = [&](int i) {
        for (int q : ops[i].targets)
            if (head[q] >= wire[q].size() || wire[q][head[q]] != i) return false;
        return true;
    };

    RouteResult res{Circuit(n_phys), initial, initial, 0};
    res.circuit.set_param_names(circuit.param_names());
    std::vector<int>& l2p = res.final.l2p;
    std::vector<int> p2l = res.final.p2l();

    auto emit = [&](const Gate& g) {
        Gate pg = g;
        for (int& t : pg.targets) t = l2p[t];
        res.circuit.add(std::move(pg));
        for (int q : g.targets) ++head[q];
    };
    auto do_swap = [&](int pa, int pb) {
        res.circuit.add(GateKind::SWAP, {pa, pb});
        const int la = p2l[pa], lb = p2l[pb];
        std::swap(p2l[pa], p2l[pb]);
        l2p[la] = pb;
        l2p[lb] = pa;
        ++res.swaps;
    };

    std::list<int> pending;
    for (int i = 0; i < static_cast<int>(ops.size()); ++i) pending.push_back(i);
    std::size_t executed = 0;
    while (executed < ops.size()) {
        // execute everything runnable; one ascending pass keeps the source order
        for (auto it = pending.begin(); it != pending.end();) {
            const int i = *it;
            const Gate& g = ops[i];
            if (!ready(i) || (g.num_targets() == 2 && !graph.adjacent(l2p[g.targets[0]], l2p[g.targets[1]]))) {
                ++it;
                continue;
            }
            emit(g);
            ++executed;
            it = pending.erase(it);
        }
        if (executed == ops.size()) break;

        // blocked front layer, in op order
        std::vector<int> front;
        for (int q = 0; q < circuit.n_qubits(); ++q) {
            if (head[q] >= wire[q].size()) continue;
            const int i = wire[q][head[q]];
            if (ready(i) && std::find(front.begin(), front.end(), i) == front.end()) front.push_back(i);
        }
        std::sort(front.begin(), front.end());
        // next two-qubit gate on each front wire, for the optional look-ahead term
        std::vector<int> next;
        if (options.lookahead_weight != 0.0) {
            for (int i : front)
                for (int q : ops[i].targets)
                    if (head[q] + 1 < wire[q].size()) {
                        const int j = wire[q][head[q] + 1];
                        if (ops[j].num_targets() == 2 && std::find(next.begin(), next.end(), j) == next.end())
                            next.push_back(j);
                    }
        }
        auto dist_sum = [&](const std::vector<int>& gates, const std::vector<int>& map) {
            double s = 0.0;
            for (int i : gates) s += graph.distance(map[ops[i].targets[0]], map[ops[i].targets[1]]);
            return s;
        };
        const double current = dist_sum(front, l2p);

        int best_edge = -1;
        double best_score = std::numeric_limits<double>::infinity(), best_front = current;
        const auto& edges = graph.edges();
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            const auto [pa, pb] = edges[e];
            bool touches = false;
            for (int i : front)
                for (int q : ops[i].targets) touches |= (l2p[q] == pa || l2p[q] == pb);
            if (!touches) continue;
            std::vector<int> trial = l2p;
            for (auto& p : trial) p = p == pa ? pb : (p == pb ? pa : p);
            const double f = dist_sum(front, trial);
            double score = f;
            if (!next.empty()) score += options.lookahead_weight * dist_sum(next, trial) / next.size();
            // strict comparison keeps the lowest edge index among ties
            if (score < best_score) {
                best_score = score;
                best_front = f;
                best_edge = e;
            }
        }
        if (best_edge >= 0 && best_front < current) {
            do_swap(edges[best_edge].first, edges[best_edge].second);
            continue;
        }
        // fallback: step the first front gate's first qubit along a shortest path
        const Gate& g = ops[front.front()];
        const int pa = l2p[g.targets[0]], pb = l2p[g.targets[1]];
        for (int v : graph.neighbors(pa)) {
            if (graph.distance(v, pb) == graph.distance(pa, pb) - 1) {
                do_swap(pa, v);
                break;
            }
        }
    }
    return res;
}

}  // namespace nisq
