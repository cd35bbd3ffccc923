#include "nisq/mps.hpp"

#include <algorithm>
#include <cmath>

namespace nisq {

namespace {

// Singular values at or below this are treated as exact zeros regardless of trunc_eps.
constexpr double kZeroSingular = 1e-13;

Matrix swap_targets(const Matrix& u) {
    static const int perm[4] = {0, 2, 1, 3};
    Matrix out(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out(perm[r], perm[c]) = u(r, c);
    return out;
}

const Matrix& swap_matrix() {
    static const Matrix m = gate_matrix(Gate::make(GateKind::SWAP, {0, 1}));
    return m;
}

}  // namespace

MPSState MPSState::product_zero(int n, int max_bond, double trunc_eps) {
    if (n < 2) throw InputError("MPS needs at least two sites; use the state-vector simulator for n=1");
    if (max_bond < 1) throw InputError("max bond dimension must be >= 1");
    if (trunc_eps < 0) throw InputError("truncation threshold must be >= 0");
    MPSState s;
    s.d_cap_ = max_bond;
    s.eps_ = trunc_eps;
    s.sites_.resize(n);
    for (auto& site : s.sites_) {
        site[0] = Matrix::Ones(1, 1);
        site[1] = Matrix::Zero(1, 1);
    }
    s.lambda_.assign(n - 1, RealVector::Ones(1));
    return s;
}

int MPSState::max_bond_dim() const {
    int d = 1;
    for (const auto& l : lambda_) d = std::max(d, static_cast<int>(l.size()));
    return d;
}

void MPSState::apply_1q(const Matrix& u, int j) {
    if (j < 0 || j >= n_qubits()) throw InputError("site out of range");
    if (u.rows() != 2 || u.cols() != 2) throw InputError("single-site gate must be 2x2");
    auto& b = sites_[j];
    Matrix b0 = u(0, 0) * b[0] + u(0, 1) * b[1];
    Matrix b1 = u(1, 0) * b[0] + u(1, 1) * b[1];
    b[0] = std::move(b0);
    b[1] = std::move(b1);
}

TruncationReport MPSState::apply_2q(const Matrix& u, int j) {
    if (j < 0 || j + 1 >= n_qubits()) throw InputError("bond out of range");
    if (u.rows() != 4 || u.cols() != 4) throw InputError("two-site gate must be 4x4");
    auto& bl = sites_[j];
    auto& br = sites_[j + 1];
    const Eigen::Index dl = bl[0].rows(), dr = br[0].cols();

    // C^{s0 s1} = sum Q[(s0 s1),(t0 t1)] B_j^{t0} B_{j+1}^{t1}
    Matrix theta[2][2];
    for (int t0 = 0; t0 < 2; ++t0)
        for (int t1 = 0; t1 < 2; ++t1) theta[t0][t1] = bl[t0] * br[t1];
    Matrix c(2 * dl, 2 * dr);  // rows (s0, a_{j-1}), cols (s1, a_{j+1})
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1) {
            Matrix blk = Matrix::Zero(dl, dr);
            for (int t0 = 0; t0 < 2; ++t0)
                for (int t1 = 0; t1 < 2; ++t1) {
                    const cplx q = u(2 * s0 + s1, 2 * t0 + t1);
                    if (q != cplx{0.0, 0.0}) blk += q * theta[t0][t1];
                }
            c.block(s0 * dl, s1 * dr, dl, dr) = blk;
        }

    Matrix ct = c;
    if (j > 0) {
        const RealVector& lam = lambda_[j - 1];
        for (int s0 = 0; s0 < 2; ++s0) ct.middleRows(s0 * dl, dl) = lam.asDiagonal() * c.middleRows(s0 * dl, dl);
    }

    Eigen::BDCSVD<Matrix> svd(ct, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double total = sv.squaredNorm();
    const double smax = sv.size() ? sv(0) : 0.0;
    int keep = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > eps_ && sv(k) > kZeroSingular * std::max(1.0, smax)) ++keep;
    keep = std::max(1, std::min(keep, d_cap_));
    double kept = sv.head(keep).squaredNorm();
    TruncationReport report;
    report.discarded_weight = total > 0 ? std::max(0.0, (total - kept) / total) : 0.0;
    report.bond_dim = keep;
    discarded_ += report.discarded_weight;

    const Matrix v = svd.matrixV().leftCols(keep);  // (s1, a_{j+1}) x k
    const Matrix vh = v.adjoint();
    const Matrix left = c * v;  // (s0, a_{j-1}) x k
    const double renorm = kept > 0 ? 1.0 / std::sqrt(kept) : 1.0;
    for (int s = 0; s < 2; ++s) {
        bl[s] = left.middleRows(s * dl, dl) * renorm;
        br[s] = vh.middleCols(s * dr, dr);
    }
    lambda_[j] = sv.head(keep) / std::sqrt(kept);
    return report;
}

TruncationReport MPSState::apply_2q_nonadjacent(const Matrix& u, int q0, int q1) {
    const int n = n_qubits();
    if (q0 < 0 || q1 < 0 || q0 >= n || q1 >= n || q0 == q1) throw InputError("invalid qubit pair");
    Matrix m = u;
    int i = q0, j = q1;
    if (i > j) {
        std::swap(i, j);
        m = swap_targets(u);
    }
    if (j == i + 1) return apply_2q(m, i);
    TruncationReport worst;
    auto track = [&](const TruncationReport& r) {
        worst.discarded_weight = std::max(worst.discarded_weight, r.discarded_weight);
        worst.bond_dim = std::max(worst.bond_dim, r.bond_dim);
    };
    // Move qubit i rightwards until it sits at j-1.
    for (int k = i; k < j - 1; ++k) track(apply_2q(swap_matrix(), k));
    track(apply_2q(m, j - 1));
    for (int k = j - 2; k >= i; --k) track(apply_2q(swap_matrix(), k));
    return worst;
}

TruncationReport MPSState::apply(const Gate& gate, std::span<const double> params) {
    if (gate.kind == GateKind::I) return {};
    const Matrix u = gate_matrix(gate, params);
    if (gate.num_targets() == 1) {
        apply_1q(u, gate.targets[0]);
        return {};
    }
    if (gate.num_targets() == 2) return apply_2q_nonadjacent(u, gate.targets[0], gate.targets[1]);
    throw InputError("MPS backend supports one- and two-qubit gates only");
}

double MPSState::apply_circuit(const Circuit& circuit, std::span<const double> params) {
    if (circuit.n_qubits() != n_qubits()) throw InputError("circuit width does not match MPS width");
    double worst = 0.0;
    for (const Gate& g : circuit.ops()) worst = std::max(worst, apply(g, params).discarded_weight);
    return worst;
}

cplx MPSState::amplitude(const std::string& bits) const {
    if (static_cast<int>(bits.size()) != n_qubits())
        throw InputError("bitstring length does not match MPS width");
    Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(1);
    for (int j = 0; j < n_qubits(); ++j) {
        if (bits[j] != '0' && bits[j] != '1') throw InputError("bitstring must contain only 0 and 1");
        v = v * sites_[j][bits[j] - '0'];
    }
    return v(0);
}

double MPSState::expectation(const PauliString& p) const {
    if (p.size() != n_qubits()) throw InputError("Pauli width does not match MPS width");
    int first = -1, last = -1;
    for (int j = 0; j < p.size(); ++j)
        if (p.letters[j]) {
            if (first < 0) first = j;
            last = j;
        }
    if (first < 0) return p.coefficient;
    Matrix e;
    if (first == 0) {
        e = Matrix::Ones(1, 1);
    } else {
        const RealVector l2 = lambda_[first - 1].array().square();
        e = l2.cast<cplx>().asDiagonal();
    }
    for (int j = first; j <= last; ++j) {
        const Matrix& o = pauli_matrix(p.letters[j]);
        const auto& b = sites_[j];
        Matrix next = Matrix::Zero(b[0].cols(), b[0].cols());
        for (int sb = 0; sb < 2; ++sb)
            for (int sk = 0; sk < 2; ++sk)
                if (o(sb, sk) != cplx{0.0, 0.0}) next += o(sb, sk) * (b[sb].adjoint() * e * b[sk]);
        e = std::move(next);
    }
    return (e.trace() * p.coefficient).real();
}

double MPSState::expectation(const Observable& obs) const {
    double total = 0.0;
    for (const auto& t : obs.terms) total += expectation(t);
    return total;
}

std::vector<std::string> MPSState::sample(int shots, Rng& rng) const {
    if (shots < 1) throw InputError("shots must be >= 1");
    const int n = n_qubits();
    std::vector<std::string> out;
    out.reserve(shots);
    int restarts = 0;
    while (static_cast<int>(out.size()) < shots) {
        std::string bits(n, '0');
        Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(1);
        bool ok = true;
        for (int j = 0; j < n && ok; ++j) {
            Eigen::RowVectorXcd w0 = v * sites_[j][0];
            Eigen::RowVectorXcd w1 = v * sites_[j][1];
            const double p0 = w0.squaredNorm(), p1 = w1.squaredNorm();
            const double tot = p0 + p1;
            if (tot < 1e-14) {
                ok = false;
                break;
            }
            const int bit = uniform01(rng) * tot < p0 ? 0 : 1;
            const double pb = bit ? p1 : p0;
            if (pb < 1e-14 * tot) {
                ok = false;
                break;
            }
            bits[j] = static_cast<char>('0' + bit);
            v = (bit ? w1 : w0) / std::sqrt(pb);
        }
        if (!ok) {
            if (++restarts > 1000 + 10 * shots) throw NumericalError("MPS sampling keeps underflowing");
            continue;
        }
        out.push_back(std::move(bits));
    }
    return out;
}

double MPSState::right_canonical_error() const {
    double err = 0.0;
    for (const auto& b : sites_) {
        Matrix s = b[0] * b[0].adjoint() + b[1] * b[1].adjoint();
        s -= Matrix::Identity(s.rows(), s.cols());
        err = std::max(err, s.cwiseAbs().maxCoeff());
    }
    return err;
}

std::vector<cplx> MPSState::to_dense() const {
    const int n = n_qubits();
    if (n > 24) throw BudgetError("to_dense is limited to 24 qubits", std::uint64_t{16} << n);
    // Row-major accumulation: rows are the prefix basis index, cols the open bond.
    Matrix acc = Matrix::Ones(1, 1);
    for (int j = 0; j < n; ++j) {
        const auto& b = sites_[j];
        Matrix next(acc.rows() * 2, b[0].cols());
        for (Eigen::Index r = 0; r < acc.rows(); ++r) {
            next.row(2 * r) = acc.row(r) * b[0];
            next.row(2 * r + 1) = acc.row(r) * b[1];
        }
        acc = std::move(next);
    }
    return std::vector<cplx>(acc.data(), acc.data() + acc.size());
}

}  // namespace nisq
