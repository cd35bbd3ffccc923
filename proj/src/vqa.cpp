#include "nisq/vqa.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nisq/mps.hpp"
#include "nisq/statevector.hpp"

namespace nisq {

namespace {

std::atomic<std::uint64_t> g_loss_evals{0};

void check_theta(const LossSpec& spec, std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != spec.circuit.n_params())
        throw InputError("parameter vector has " + std::to_string(theta.size()) + " entries, circuit expects " +
                         std::to_string(spec.circuit.n_params()));
    if (spec.hamiltonian.width() != spec.circuit.n_qubits())
        throw InputError("Hamiltonian width does not match circuit width");
}

// Loss with gate `index` shifted by `shift` in its own angle.
double shifted_loss(const LossSpec& spec, std::span<const double> theta, std::size_t index, double shift) {
    LossSpec s = spec;
    s.circuit.mutable_ops()[index].param->value += shift;
    return loss(s, theta);
}

}  // namespace

std::uint64_t loss_evaluations() { return g_loss_evals.load(); }
void reset_loss_evaluations() { g_loss_evals = 0; }

double loss(const LossSpec& spec, std::span<const double> theta) {
    check_theta(spec, theta);
    ++g_loss_evals;
    if (spec.backend == Backend::MPS && spec.circuit.n_qubits() >= 2) {
        MPSState m = MPSState::product_zero(spec.circuit.n_qubits(), spec.mps_max_bond);
        m.apply_circuit(spec.circuit, theta);
        return m.expectation(spec.hamiltonian);
    }
    return simulate(spec.circuit, theta).expectation(spec.hamiltonian);
}

std::vector<double> grad_fd1(const LossSpec& spec, std::span<const double> theta, double delta) {
    if (!(delta > 0)) throw InputError("finite-difference step must be positive");
    const double base = loss(spec, theta);
    std::vector<double> g(theta.size()), t(theta.begin(), theta.end());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        t[i] = theta[i] + delta;
        g[i] = (loss(spec, t) - base) / delta;
        t[i] = theta[i];
    }
    return g;
}

std::vector<double> grad_fd2(const LossSpec& spec, std::span<const double> theta, double delta) {
    if (!(delta > 0)) throw InputError("finite-difference step must be positive");
    check_theta(spec, theta);
    std::vector<double> g(theta.size()), t(theta.begin(), theta.end());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        t[i] = theta[i] + delta;
        const double up = loss(spec, t);
        t[i] = theta[i] - delta;
        const double down = loss(spec, t);
        t[i] = theta[i];
        g[i] = (up - down) / (2 * delta);
    }
    return g;
}

std::vector<double> grad_pshift(const LossSpec& spec, std::span<const double> theta) {
    check_theta(spec, theta);
    std::vector<double> g(theta.size(), 0.0);
    const auto& ops = spec.circuit.ops();
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const Gate& gate = ops[k];
        if (!gate.param || !gate.param->symbolic()) continue;
        if (gate.kind != GateKind::Rx && gate.kind != GateKind::Ry && gate.kind != GateKind::Rz)
            throw InputError("parameter shift needs Pauli rotations, found '" + std::string(kind_name(gate.kind)) + "'");
        const double d = 0.5 * (shifted_loss(spec, theta, k, kPi / 2) - shifted_loss(spec, theta, k, -kPi / 2));
        g[gate.param->slot] += gate.param->scale * d;
    }
    return g;
}

std::vector<double> grad_adjoint(const LossSpec& spec, std::span<const double> theta) {
    check_theta(spec, theta);
    if (spec.backend != Backend::SV) throw InputError("adjoint gradient needs the state-vector backend");
    const int n = spec.circuit.n_qubits();
    StateVector phi = simulate(spec.circuit, theta);

    // psi = H phi, accumulated term by term: (P phi)[s] = i^{nY} (-1)^{|t & z|} phi[t], t = s ^ x.
    StateVector psi = StateVector::zero(n);
    psi.data()[0] = 0.0;
    {
        static constexpr cplx kPow[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        auto out = psi.data();
        for (const PauliString& p : spec.hamiltonian.terms) {
            const std::uint64_t x = p.x_mask(), z = p.z_mask();
            int ny = 0;
            for (auto l : p.letters) ny += l == 2;
            const cplx c = p.coefficient * kPow[ny % 4];
#ifdef NISQ_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (out.size() > 4096)
#endif
            for (std::int64_t s = 0; s < static_cast<std::int64_t>(out.size()); ++s) {
                const std::uint64_t t = static_cast<std::uint64_t>(s) ^ x;
                const double sign = (std::popcount(t & z) & 1) ? -1.0 : 1.0;
                out[s] += c * sign * phi[t];
            }
        }
    }

    std::vector<double> g(theta.size(), 0.0);
    const auto& ops = spec.circuit.ops();
    for (std::size_t k = ops.size(); k-- > 0;) {
        const Gate& gate = ops[k];
        if (gate.kind == GateKind::I) continue;
        if (gate.param && gate.param->symbolic()) {
            int letter = 0;
            switch (gate.kind) {
                case GateKind::Rx: letter = 1; break;
                case GateKind::Ry: letter = 2; break;
                case GateKind::Rz: letter = 3; break;
                default: throw InputError("adjoint gradient needs Pauli rotations");
            }
            PauliString p(std::string(n, 'I'));
            p.letters[gate.targets[0]] = static_cast<std::uint8_t>(letter);
            // d/dtheta Q = -i/2 scale P Q, so the term is 2 Re <psi| (-i/2) P |phi> scale.
            const cplx m = psi.pauli_matrix_element(p, phi);
            g[gate.param->slot] += gate.param->scale * (m * cplx(0, -0.5)).real() * 2.0;
        }
        const Matrix udag = gate_matrix(gate, theta).adjoint();
        phi.apply_matrix(udag, gate.targets);
        psi.apply_matrix(udag, gate.targets);
    }
    return g;
}

GradMethod grad_method_from_name(const std::string& name) {
    if (name == "fd1") return GradMethod::FD1;
    if (name == "fd2") return GradMethod::FD2;
    if (name == "pshift") return GradMethod::PShift;
    if (name == "adjoint") return GradMethod::Adjoint;
    throw InputError("unknown gradient method '" + name + "'");
}

std::vector<double> gradient(const LossSpec& spec, std::span<const double> theta, GradMethod method, double delta) {
    switch (method) {
        case GradMethod::FD1: return grad_fd1(spec, theta, delta);
        case GradMethod::FD2: return grad_fd2(spec, theta, delta);
        case GradMethod::PShift: return grad_pshift(spec, theta);
        case GradMethod::Adjoint: return grad_adjoint(spec, theta);
    }
    throw InputError("unknown gradient method");
}

OptimizeTrace optimize(const LossSpec& spec, std::vector<double> theta, const OptimizerConfig& config) {
    if (!(config.eta > 0)) throw InputError("step size must be positive");
    if (!(config.delta > 0)) throw InputError("finite-difference step must be positive");
    if (config.max_iterations < 0) throw InputError("max iterations must be nonnegative");
    OptimizeTrace tr;
    double current = loss(spec, theta);
    int rising = 0;
    for (int it = 0; it < config.max_iterations; ++it) {
        tr.thetas.push_back(theta);
        tr.losses.push_back(current);
        const std::vector<double> g = gradient(spec, theta, config.method, config.delta);
        double gmax = 0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax == 0.0) {
            tr.converged = true;
            return tr;
        }
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= config.eta * g[i];
        const double next = loss(spec, theta);
        if (!std::isfinite(next)) throw NumericalError("loss became non-finite during optimization");
        rising = next > current ? rising + 1 : 0;
        if (rising >= 10) throw NumericalError("optimizer diverged: loss rose for 10 consecutive steps");
        const bool small = std::abs(next - current) < config.tolerance;
        current = next;
        if (small) {
            tr.thetas.push_back(theta);
            tr.losses.push_back(current);
            tr.converged = true;
            return tr;
        }
    }
    tr.thetas.push_back(theta);
    tr.losses.push_back(current);
    return tr;
}

Circuit hardware_efficient_ansatz(int n, int layers, const std::vector<GateKind>& axes, const CouplingGraph& graph) {
    if (n < 1 || layers < 1 || axes.empty()) throw InputError("ansatz needs n, layers >= 1 and at least one axis");
    if (graph.n_nodes() != n) throw InputError("coupling graph size does not match ansatz width");
    for (GateKind k : axes)
        if (k != GateKind::Rx && k != GateKind::Ry && k != GateKind::Rz) throw InputError("ansatz axes must be rotations");
    Circuit c(n);
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < n; ++q)
            for (GateKind k : axes) {
                const int slot = c.param_slot("t" + std::to_string(c.n_params()));
                c.add(Gate::rotation(k, q, Param{0.0, slot, 1.0}));
            }
        for (const auto& [a, b] : graph.edges()) c.add(GateKind::CX, {a, b});
    }
    return c;
}

MaxCutProblem::MaxCutProblem(int n_vertices, std::vector<std::pair<int, int>> edge_list)
    : n(n_vertices), edges(std::move(edge_list)) {
    if (n < 1) throw InputError("graph needs at least one vertex");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [a, b] = edges[i];
        if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw InputError("invalid MaxCut edge");
        for (std::size_t j = 0; j < i; ++j)
            if ((edges[j].first == a && edges[j].second == b) || (edges[j].first == b && edges[j].second == a))
                throw InputError("duplicate MaxCut edge");
    }
}

Observable MaxCutProblem::cost_hamiltonian() const {
    Observable h;
    for (const auto& [a, b] : edges) {
        PauliString zz(std::string(n, 'I'), -0.5);
        zz.letters[a] = zz.letters[b] = 3;
        h.terms.push_back(zz);
    }
    h.terms.push_back(PauliString(std::string(n, 'I'), 0.5 * double(edges.size())));
    return h;
}

int MaxCutProblem::cut_value(const std::string& bits) const {
    if (static_cast<int>(bits.size()) != n) throw InputError("assignment length does not match vertex count");
    int cut = 0;
    for (const auto& [a, b] : edges) cut += bits[a] != bits[b];
    return cut;
}

int MaxCutProblem::max_cut() const {
    if (n > 24) throw InputError("exhaustive MaxCut limited to 24 vertices");
    int best = 0;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) best = std::max(best, cut_value(index_to_bits(i, n)));
    return best;
}

MaxCutProblem parse_maxcut(std::string_view text) {
    auto edges = parse_edge_pairs(text);
    int n = 0;
    for (const auto& [a, b] : edges) n = std::max({n, a + 1, b + 1});
    return MaxCutProblem(n, std::move(edges));
}

MaxCutProblem load_maxcut(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_maxcut(ss.str());
}

Circuit qaoa_circuit(const MaxCutProblem& problem, int p) {
    if (p < 1) throw InputError("QAOA needs p >= 1");
    Circuit c(problem.n);
    for (int l = 0; l < p; ++l) {
        c.param_slot("gamma" + std::to_string(l));
        c.param_slot("beta" + std::to_string(l));
    }
    for (int q = 0; q < problem.n; ++q) c.add(GateKind::H, {q});
    for (int l = 0; l < p; ++l) {
        // exp(-i gamma (1 - ZZ)/2) equals CX . Rz(-gamma) . CX up to a global phase.
        for (const auto& [a, b] : problem.edges) {
            c.add(GateKind::CX, {a, b});
            c.add(Gate::rotation(GateKind::Rz, b, Param{0.0, 2 * l, -1.0}));
            c.add(GateKind::CX, {a, b});
        }
        for (int q = 0; q < problem.n; ++q) c.add(Gate::rotation(GateKind::Rx, q, Param{0.0, 2 * l + 1, 2.0}));
    }
    return c;
}

QAOAResult qaoa_maxcut(const MaxCutProblem& problem, int p, const OptimizerConfig& config, int shots,
                       std::uint64_t seed) {
    if (shots < 1) throw InputError("shots must be >= 1");
    LossSpec spec;
    spec.circuit = qaoa_circuit(problem, p);
    spec.hamiltonian = problem.cost_hamiltonian();
    for (auto& t : spec.hamiltonian.terms) t.coefficient = -t.coefficient;  // maximize <H_C>

    // Coarse grid over one (gamma, beta) pair, repeated across layers as the starting point.
    std::vector<double> theta(2 * p);
    double best = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 12;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j) {
            std::vector<double> t(2 * p);
            for (int l = 0; l < p; ++l) {
                t[2 * l] = kPi * (i + 0.5) / kGrid;
                t[2 * l + 1] = 0.5 * kPi * (j + 0.5) / kGrid;
            }
            const double v = loss(spec, t);
            if (v < best) {
                best = v;
                theta = t;
            }
        }

    QAOAResult r;
    r.trace = optimize(spec, theta, config);
    theta = r.trace.thetas.back();
    for (int l = 0; l < p; ++l) {
        r.gammas.push_back(theta[2 * l]);
        r.betas.push_back(theta[2 * l + 1]);
    }
    r.expected_cut = -r.trace.losses.back();
    Rng rng(seed);
    const StateVector psi = simulate(spec.circuit, theta);
    for (const std::string& b : psi.sample(shots, rng)) {
        const int cut = problem.cut_value(b);
        if (cut > r.best_cut || r.best_bitstring.empty()) {
            r.best_cut = cut;
            r.best_bitstring = b;
        }
    }
    return r;
}

}  // namespace nisq
