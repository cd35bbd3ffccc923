#include "nisq/peps.hpp"

#include <algorithm>
#include <cmath>

#include "nisq/statevector.hpp"

namespace nisq {

double estimate_cost(int n_h, int n_v, int bond_dim) {
    if (n_h < 3 || n_v < 3) throw InputError("cost formula requires n_h, n_v >= 3");
    if (bond_dim < 1) throw InputError("bond dimension must be >= 1");
    return double(n_h - 2) * double(n_v - 2) * std::pow(double(bond_dim), std::min(n_h, n_v) + 3);
}

PEPSState PEPSState::zero_grid(int n_h, int n_v, double cost_budget) {
    if (n_h < 2 || n_v < 2) throw InputError("PEPS grid needs n_h, n_v >= 2");
    PEPSState s;
    s.n_h_ = n_h;
    s.n_v_ = n_v;
    s.budget_ = cost_budget;
    s.sites_.resize(n_h * n_v);
    for (auto& site : s.sites_) {
        site.a = Matrix::Zero(2, 1);
        site.a(0, 0) = 1.0;
    }
    s.h_.assign((n_h - 1) * n_v, 1);
    s.v_.assign(n_h * (n_v - 1), 1);
    return s;
}

int PEPSState::max_bond_dim() const {
    int d = 1;
    for (int b : h_) d = std::max(d, b);
    for (int b : v_) d = std::max(d, b);
    return d;
}

std::size_t PEPSState::stored_elements() const {
    std::size_t n = 0;
    for (const auto& s : sites_) n += static_cast<std::size_t>(s.a.size());
    return n;
}

double PEPSState::current_cost(int bond_dim) const {
    // Outside the formula's domain, fall back to one boundary step per site.
    if (n_h_ >= 3 && n_v_ >= 3) return estimate_cost(n_h_, n_v_, bond_dim);
    return double(n_qubits()) * std::pow(double(bond_dim), std::min(n_h_, n_v_) + 3);
}

int& PEPSState::bond_between(int qa, int qb) {
    const int ra = qa / n_h_, ca = qa % n_h_, rb = qb / n_h_, cb = qb % n_h_;
    if (ra == rb && std::abs(ca - cb) == 1) return h_[ra * (n_h_ - 1) + std::min(ca, cb)];
    if (ca == cb && std::abs(ra - rb) == 1) return v_[std::min(ra, rb) * n_h_ + ca];
    throw InputError("PEPS two-qubit gates must act on grid neighbours (" + std::to_string(qa) + ", " +
                     std::to_string(qb) + ")");
}

void PEPSState::apply_1q(const Matrix& u, int q) {
    if (q < 0 || q >= n_qubits()) throw InputError("site out of range");
    if (u.rows() != 2 || u.cols() != 2) throw InputError("single-site gate must be 2x2");
    Site& s = site(q);
    s.a = u * s.a;
}

namespace {

// Widens one leg of a site tensor from `old` to old*chi, writing factor k's contribution
// into slot (o, k). `leg` is 0..3 for l, r, u, d.
Matrix widen(const Matrix& a, const int dims[4], int leg, const std::vector<Matrix>& factors) {
    const int chi = static_cast<int>(factors.size());
    int nd[4] = {dims[0], dims[1], dims[2], dims[3]};
    nd[leg] *= chi;
    const Eigen::Index total = Eigen::Index{nd[0]} * nd[1] * nd[2] * nd[3];
    Matrix out = Matrix::Zero(2, total);
    for (int k = 0; k < chi; ++k) {
        const Matrix fa = factors[k] * a;  // 2 x (old legs)
        for (int l = 0; l < dims[0]; ++l)
            for (int r = 0; r < dims[1]; ++r)
                for (int u = 0; u < dims[2]; ++u)
                    for (int d = 0; d < dims[3]; ++d) {
                        int idx[4] = {l, r, u, d};
                        idx[leg] = idx[leg] * chi + k;
                        const Eigen::Index src = ((Eigen::Index{l} * dims[1] + r) * dims[2] + u) * dims[3] + d;
                        const Eigen::Index dst = ((Eigen::Index{idx[0]} * nd[1] + idx[1]) * nd[2] + idx[2]) * nd[3] + idx[3];
                        out.col(dst) = fa.col(src);
                    }
    }
    return out;
}

}  // namespace

int PEPSState::apply_2q(const Matrix& u, int qa, int qb) {
    if (qa < 0 || qb < 0 || qa >= n_qubits() || qb >= n_qubits() || qa == qb)
        throw InputError("invalid site pair");
    if (u.rows() != 4 || u.cols() != 4) throw InputError("two-site gate must be 4x4");
    int& bond = bond_between(qa, qb);
    const int targets[2] = {qa, qb};
    const int left[1] = {qa};
    const SplitGate split = split_gate(u, targets, left, 1e-12);
    const int chi = split.rank();
    const int new_bond = bond * chi;
    const int prospective = std::max(max_bond_dim(), new_bond);
    const double cost = current_cost(prospective);
    if (cost > budget_)
        throw BudgetError("PEPS bond " + std::to_string(new_bond) + " raises contraction cost to " +
                              std::to_string(cost) + ", budget " + std::to_string(budget_),
                          static_cast<std::uint64_t>(std::min(cost, 1.8e19)));

    const int ra = qa / n_h_, ca = qa % n_h_, rb = qb / n_h_, cb = qb % n_h_;
    int leg_a, leg_b;
    if (ra == rb) {
        leg_a = cb > ca ? 1 : 0;
        leg_b = cb > ca ? 0 : 1;
    } else {
        leg_a = rb > ra ? 3 : 2;
        leg_b = rb > ra ? 2 : 3;
    }
    Site& sa = site(qa);
    Site& sb = site(qb);
    const int da[4] = {sa.l, sa.r, sa.u, sa.d};
    const int db[4] = {sb.l, sb.r, sb.u, sb.d};
    sa.a = widen(sa.a, da, leg_a, split.left);
    sb.a = widen(sb.a, db, leg_b, split.right);
    int* la[4] = {&sa.l, &sa.r, &sa.u, &sa.d};
    int* lb[4] = {&sb.l, &sb.r, &sb.u, &sb.d};
    *la[leg_a] *= chi;
    *lb[leg_b] *= chi;
    bond = new_bond;
    return chi;
}

void PEPSState::apply(const Gate& gate, std::span<const double> params) {
    if (gate.kind == GateKind::I) return;
    const Matrix u = gate_matrix(gate, params);
    if (gate.num_targets() == 1) return apply_1q(u, gate.targets[0]);
    if (gate.num_targets() == 2) {
        apply_2q(u, gate.targets[0], gate.targets[1]);
        return;
    }
    throw InputError("PEPS backend supports one- and two-qubit gates only");
}

void PEPSState::apply_circuit(const Circuit& circuit, std::span<const double> params) {
    if (circuit.n_qubits() != n_qubits()) throw InputError("circuit width does not match grid size");
    for (const Gate& g : circuit.ops()) apply(g, params);
}

namespace {

struct Projected {
    int l, r, u, d;
    std::vector<cplx> t;  // index ((l*R + r)*U + u)*D + d
};

// Exact boundary contraction, column by column. Boundary axes while absorbing
// row k of column c: [r_0..r_{k-1}, v, l_k..l_{rows-1}].
cplx contract_columns(const std::vector<Projected>& grid, int rows, int cols, double budget) {
    std::vector<cplx> b{cplx{1.0, 0.0}};
    std::vector<int> ldims(rows, 1);
    for (int c = 0; c < cols; ++c) {
        std::vector<int> rdims;
        int vdim = 1;
        for (int k = 0; k < rows; ++k) {
            const Projected& t = grid[k * cols + c];
            std::size_t p = 1, s = 1;
            for (int i = 0; i < k; ++i) p *= rdims[i];
            for (int i = k + 1; i < rows; ++i) s *= ldims[i];
            const int V = vdim, L = ldims[k], R = t.r, D = t.d;
            const double next_size = double(p) * R * D * s;
            if (next_size > budget)
                throw BudgetError("PEPS boundary of " + std::to_string(next_size) + " elements exceeds budget",
                                  static_cast<std::uint64_t>(next_size));
            Matrix m(R * D, V * L);
            for (int r = 0; r < R; ++r)
                for (int d = 0; d < D; ++d)
                    for (int v = 0; v < V; ++v)
                        for (int l = 0; l < L; ++l)
                            m(r * D + d, v * L + l) = t.t[((std::size_t(l) * R + r) * V + v) * D + d];
            std::vector<cplx> nb(p * R * D * s);
            using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
            for (std::size_t pi = 0; pi < p; ++pi) {
                Eigen::Map<const RowMat> in(b.data() + pi * V * L * s, V * L, s);
                Eigen::Map<RowMat> out(nb.data() + pi * R * D * s, R * D, s);
                out.noalias() = m * in;
            }
            b.swap(nb);
            rdims.push_back(R);
            vdim = D;
        }
        ldims = rdims;
    }
    return b.at(0);
}

}  // namespace

cplx PEPSState::amplitude(const std::string& bits, Order order) const {
    if (static_cast<int>(bits.size()) != n_qubits()) throw InputError("bitstring length does not match grid size");
    std::vector<Projected> grid(n_qubits());
    for (int q = 0; q < n_qubits(); ++q) {
        if (bits[q] != '0' && bits[q] != '1') throw InputError("bitstring must contain only 0 and 1");
        const Site& s = sites_[q];
        Projected p{s.l, s.r, s.u, s.d, {}};
        const int sigma = bits[q] - '0';
        p.t.resize(s.a.cols());
        for (Eigen::Index i = 0; i < s.a.cols(); ++i) p.t[i] = s.a(sigma, i);
        grid[q] = std::move(p);
    }
    if (order == Order::Columns) return contract_columns(grid, n_v_, n_h_, budget_);
    // Rows: transpose the grid so rows become columns, mapping legs (l,r,u,d) -> (u,d,l,r).
    std::vector<Projected> tg(n_qubits());
    for (int row = 0; row < n_v_; ++row)
        for (int col = 0; col < n_h_; ++col) {
            const Projected& s = grid[row * n_h_ + col];
            Projected t{s.u, s.d, s.l, s.r, std::vector<cplx>(s.t.size())};
            for (int l = 0; l < s.l; ++l)
                for (int r = 0; r < s.r; ++r)
                    for (int u = 0; u < s.u; ++u)
                        for (int d = 0; d < s.d; ++d)
                            t.t[((std::size_t(u) * t.r + d) * t.u + l) * t.d + r] =
                                s.t[((std::size_t(l) * s.r + r) * s.u + u) * s.d + d];
            tg[col * n_v_ + row] = std::move(t);
        }
    return contract_columns(tg, n_h_, n_v_, budget_);
}

}  // namespace nisq
