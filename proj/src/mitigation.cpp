#include "nisq/mitigation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "nisq/statevector.hpp"

namespace nisq {

// ---------------------------------------------------------------- ZNE

RichardsonResult zne_richardson(const std::vector<double>& lambdas, const std::vector<double>& values) {
    if (lambdas.empty() || lambdas.size() != values.size())
        throw InputError("Richardson needs matching, nonempty noise scales and values");
    const std::size_t n = lambdas.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (lambdas[i] == lambdas[j]) throw InputError("Richardson noise scales must be distinct");
    RichardsonResult r;
    r.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double g = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) g *= lambdas[j] / (lambdas[j] - lambdas[i]);
        r.gamma[i] = g;
        r.estimate += g * values[i];
        r.variance_amplification += g * g;
    }
    return r;
}

double zne_exponential(double v_mu, double v_lmu, double lambda) {
    if (!(lambda > 1.0)) throw InputError("exponential extrapolation needs lambda > 1");
    if (v_mu == 0.0 || v_lmu == 0.0 || (v_mu > 0) != (v_lmu > 0))
        throw InputError("exponential extrapolation needs two nonzero values of one sign");
    const double sign = v_mu > 0 ? 1.0 : -1.0;
    const double a = std::abs(v_mu), b = std::abs(v_lmu);
    // Work in logs: A = exp((lambda ln a - ln b) / (lambda - 1)).
    return sign * std::exp((lambda * std::log(a) - std::log(b)) / (lambda - 1.0));
}

double zne_polyexp(const std::vector<double>& lambdas, const std::vector<double>& values, int degree) {
    if (degree < 0) throw InputError("degree must be nonnegative");
    if (lambdas.size() != values.size()) throw InputError("noise scales and values differ in length");
    if (static_cast<int>(values.size()) < degree + 1) throw InputError("poly-exponential fit is underdetermined");
    const double sign = values.front() > 0 ? 1.0 : -1.0;
    for (double v : values)
        if (v == 0.0 || (v > 0) != (sign > 0)) throw InputError("poly-exponential fit needs nonzero values of one sign");
    RealMatrix a(values.size(), degree + 1);
    RealVector y(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double p = 1.0;
        for (int d = 0; d <= degree; ++d) {
            a(i, d) = p;
            p *= lambdas[i];
        }
        y(i) = std::log(std::abs(values[i]));
    }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(a);
    if (qr.rank() < degree + 1) throw NumericalError("poly-exponential design matrix is rank deficient");
    const RealVector c = qr.solve(y);
    return sign * std::exp(c(0));
}

namespace {

void monomials_of_degree(int k, int degree, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
    if (pos == k - 1) {
        cur[pos] = degree;
        out.push_back(cur);
        return;
    }
    for (int e = degree; e >= 0; --e) {
        cur[pos] = e;
        monomials_of_degree(k, degree - e, cur, pos + 1, out);
    }
}

}  // namespace

LeastSquaresZNE zne_least_squares(const std::vector<std::vector<double>>& x, const std::vector<double>& values,
                                  int order) {
    if (x.empty() || x.size() != values.size()) throw InputError("least-squares ZNE needs matching points and values");
    if (order < 0) throw InputError("order must be nonnegative");
    const int k = static_cast<int>(x.front().size());
    if (k < 1) throw InputError("noise parameter vectors must be nonempty");
    for (const auto& p : x)
        if (static_cast<int>(p.size()) != k) throw InputError("noise parameter vectors differ in length");
    LeastSquaresZNE r;
    std::vector<int> cur(k);
    for (int d = 0; d <= order; ++d) monomials_of_degree(k, d, cur, 0, r.monomials);
    const int m = static_cast<int>(r.monomials.size());
    if (static_cast<int>(x.size()) < m)
        throw InputError("least-squares ZNE needs at least " + std::to_string(m) + " points");
    RealMatrix a(x.size(), m);
    RealVector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (int j = 0; j < m; ++j) {
            double v = 1.0;
            for (int t = 0; t < k; ++t) v *= std::pow(x[i][t], r.monomials[j][t]);
            a(i, j) = v;
        }
        y(i) = values[i];
    }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(a);
    if (qr.rank() < m) throw NumericalError("least-squares ZNE design matrix is rank deficient");
    const RealVector c = qr.solve(y);
    r.alpha.assign(c.data(), c.data() + m);
    r.estimate = r.alpha[0];
    return r;
}

namespace {

Gate gate_dagger(const Gate& g, int n) {
    Circuit tmp(n);
    tmp.add(g);
    return inverse(tmp).ops().front();
}

}  // namespace

Circuit scale_noise_identity_insertion(const Circuit& circuit, int factor) {
    if (factor < 1 || factor % 2 == 0) throw InputError("identity-insertion factor must be odd and >= 1");
    Circuit out(circuit.n_qubits());
    out.set_param_names(circuit.param_names());
    for (const Gate& g : circuit.ops()) {
        if (g.param && g.param->symbolic()) throw InputError("bind all parameters before noise scaling");
        out.add(g);
        if (g.num_targets() != 2) continue;
        const Gate inv = gate_dagger(g, circuit.n_qubits());
        for (int i = 0; i < (factor - 1) / 2; ++i) {
            out.add(inv);
            out.add(g);
        }
    }
    return out;
}

// ---------------------------------------------------------------- PEC

namespace {

bool letters_commute(int a, int b) { return a == 0 || b == 0 || a == b; }

// +1 when Pauli words a and b (as word indices of `arity` letters) commute.
int word_commutation(int a, int b, int arity) {
    int anti = 0;
    for (int j = 0; j < arity; ++j) anti += !letters_commute((a >> (2 * j)) & 3, (b >> (2 * j)) & 3);
    return anti % 2 ? -1 : 1;
}

void apply_word(StateVector& psi, int word, int arity, const std::vector<int>& targets) {
    for (int j = 0; j < arity; ++j) {
        const int letter = (word >> (2 * (arity - 1 - j))) & 3;
        if (letter) psi.apply_matrix(pauli_matrix(letter), std::vector<int>{targets[j]});
    }
}

void apply_word(SquashedDensityState& rho, int word, int arity, const std::vector<int>& targets) {
    for (int j = 0; j < arity; ++j) {
        const int letter = (word >> (2 * (arity - 1 - j))) & 3;
        if (letter) rho.apply_unitary(pauli_matrix(letter), std::vector<int>{targets[j]});
    }
}

int draw(const std::vector<double>& weights, double total, Rng& rng) {
    const double r = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace

std::vector<double> pauli_transfer_eigenvalues(const Channel& channel) {
    if (!channel.pauli_rates) throw InputError("channel '" + channel.name + "' is not a Pauli channel");
    const auto& r = *channel.pauli_rates;
    std::vector<double> f(r.size(), 0.0);
    for (std::size_t s = 0; s < r.size(); ++s)
        for (std::size_t p = 0; p < r.size(); ++p)
            f[s] += r[p] * word_commutation(static_cast<int>(p), static_cast<int>(s), channel.arity);
    return f;
}

QuasiProbDecomposition pec_decompose(const Channel& channel) {
    const std::vector<double> f = pauli_transfer_eigenvalues(channel);
    for (double v : f)
        if (std::abs(v) < 1e-12) throw NumericalError("Pauli channel has a vanishing transfer eigenvalue");
    // q_P = 4^{-k} sum_sigma chi(P, sigma) / f_sigma
    QuasiProbDecomposition d;
    d.arity = channel.arity;
    d.one_norm = 0.0;
    const double norm = 1.0 / double(f.size());
    for (std::size_t p = 0; p < f.size(); ++p) {
        double q = 0.0;
        for (std::size_t s = 0; s < f.size(); ++s)
            q += word_commutation(static_cast<int>(p), static_cast<int>(s), channel.arity) / f[s];
        q *= norm;
        if (std::abs(q) < 1e-15) continue;
        d.paulis.push_back(static_cast<int>(p));
        d.q.push_back(q);
        d.one_norm += std::abs(q);
    }
    return d;
}

namespace {

struct Insertion {
    const Channel* channel;
    std::vector<int> targets;
    const QuasiProbDecomposition* decomposition;  // null when unmitigated
};

struct PreparedCircuit {
    std::vector<Matrix> mats;
    std::vector<std::vector<Insertion>> after;
};

double sample_estimate(const Circuit& c, const PreparedCircuit& prep, const Observable& obs, PECMode mode, Rng& rng) {
    const int n = c.n_qubits();
    double weight = 1.0;
    if (mode == PECMode::Exact) {
        SquashedDensityState rho = SquashedDensityState::zero(n);
        for (std::size_t gi = 0; gi < c.ops().size(); ++gi) {
            const Gate& g = c.ops()[gi];
            if (g.kind != GateKind::I) rho.apply_unitary(prep.mats[gi], g.targets);
            for (const Insertion& ins : prep.after[gi]) {
                rho.apply_channel(*ins.channel, ins.targets);
                if (!ins.decomposition) continue;
                const auto& d = *ins.decomposition;
                std::vector<double> w(d.q.size());
                for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::abs(d.q[k]);
                const int k = draw(w, d.one_norm, rng);
                apply_word(rho, d.paulis[k], d.arity, ins.targets);
                weight *= (d.q[k] > 0 ? 1.0 : -1.0) * d.one_norm;
            }
        }
        return weight * rho.expectation(obs);
    }
    StateVector psi = StateVector::zero(n);
    for (std::size_t gi = 0; gi < c.ops().size(); ++gi) {
        const Gate& g = c.ops()[gi];
        if (g.kind != GateKind::I) psi.apply_matrix(prep.mats[gi], g.targets);
        for (const Insertion& ins : prep.after[gi]) {
            const auto& rates = *ins.channel->pauli_rates;
            apply_word(psi, draw(rates, 1.0, rng), ins.channel->arity, ins.targets);
            if (!ins.decomposition) continue;
            const auto& d = *ins.decomposition;
            std::vector<double> w(d.q.size());
            for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::abs(d.q[k]);
            const int k = draw(w, d.one_norm, rng);
            apply_word(psi, d.paulis[k], d.arity, ins.targets);
            weight *= (d.q[k] > 0 ? 1.0 : -1.0) * d.one_norm;
        }
    }
    // One measured outcome per term: +-1 with probability (1 +- <P>) / 2.
    double value = 0.0;
    for (const PauliString& p : obs.terms) {
        if (p.is_identity()) {
            value += p.coefficient;
            continue;
        }
        PauliString unit = p;
        unit.coefficient = 1.0;
        const double e = std::clamp(psi.expectation(unit), -1.0, 1.0);
        value += p.coefficient * (uniform01(rng) < 0.5 * (1 + e) ? 1.0 : -1.0);
    }
    return weight * value;
}

PECResult run_estimator(const Circuit& circuit, const NoiseModel& noise, const Observable& obs, int samples,
                        std::uint64_t seed, PECMode mode, bool mitigate) {
    if (samples < 2) throw InputError("estimator needs at least two samples");
    if (obs.width() != circuit.n_qubits()) throw InputError("observable width does not match circuit width");
    for (const auto& g : circuit.ops())
        if (g.param && g.param->symbolic()) throw InputError("bind all parameters before PEC");
    std::map<const Channel*, QuasiProbDecomposition> decomps;
    PreparedCircuit prep;
    PECResult res;
    res.samples = samples;
    for (const Gate& g : circuit.ops()) {
        prep.mats.push_back(gate_matrix(g));
        std::vector<Insertion> list;
        for (auto& [ch, t] : noise.after(g)) {
            if (!ch->pauli_rates) throw InputError("PEC needs Pauli channels; '" + ch->name + "' is not one");
            const QuasiProbDecomposition* d = nullptr;
            if (mitigate) {
                auto it = decomps.find(ch);
                if (it == decomps.end()) it = decomps.emplace(ch, pec_decompose(*ch)).first;
                d = &it->second;
                res.one_norm *= d->one_norm;
            }
            list.push_back({ch, t, d});
        }
        prep.after.push_back(std::move(list));
    }
    std::vector<double> v(samples);
#ifdef NISQ_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (int s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        v[s] = sample_estimate(circuit, prep, obs, mode, rng);
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= samples;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= samples - 1;
    res.estimate = mean;
    res.std_error = std::sqrt(var / samples);
    return res;
}

}  // namespace

PECResult pec_estimate(const Circuit& circuit, const NoiseModel& noise, const Observable& obs, int samples,
                       std::uint64_t seed, PECMode mode) {
    return run_estimator(circuit, noise, obs, samples, seed, mode, true);
}

PECResult unmitigated_estimate(const Circuit& circuit, const NoiseModel& noise, const Observable& obs, int samples,
                               std::uint64_t seed, PECMode mode) {
    return run_estimator(circuit, noise, obs, samples, seed, mode, false);
}

// ---------------------------------------------------------------- MEM

RealMatrix mem_calibrate(const NoiseModel& noise, int m) {
    if (m < 1 || m > 12) throw InputError("response calibration supports 1..12 qubits");
    const std::size_t d = std::size_t{1} << m;
    RealMatrix lam(d, d);
    for (std::size_t y = 0; y < d; ++y) {
        Circuit prep(m);
        const std::string bits = index_to_bits(y, m);
        for (int q = 0; q < m; ++q)
            if (bits[q] == '1') prep.add(GateKind::X, {q});
        const auto probs = apply_readout(run_density(prep, noise).probabilities(), m, noise.readout);
        for (std::size_t x = 0; x < d; ++x) lam(x, y) = probs[x];
    }
    return lam;
}

MEMResult mem_invert(const RealMatrix& response, const std::vector<double>& p_noisy) {
    if (response.rows() != response.cols() || response.rows() != static_cast<Eigen::Index>(p_noisy.size()))
        throw InputError("response matrix and distribution sizes differ");
    Eigen::JacobiSVD<RealMatrix> svd(response);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-14 * s(0)) throw NumericalError("response matrix is singular");
    MEMResult r;
    r.condition_number = s(0) / s(s.size() - 1);
    const RealVector p = Eigen::FullPivLU<RealMatrix>(response).solve(
        Eigen::Map<const RealVector>(p_noisy.data(), static_cast<Eigen::Index>(p_noisy.size())));
    r.raw.assign(p.data(), p.data() + p.size());
    r.probabilities = r.raw;
    double total = 0.0;
    for (double& x : r.probabilities) {
        if (x < 0) {
            x = 0.0;
            r.clipped = true;
        }
        total += x;
    }
    if (r.clipped) {
        if (total <= 0) throw NumericalError("clipped distribution has no mass");
        for (double& x : r.probabilities) x /= total;
    }
    return r;
}

TPNResponse::TPNResponse(std::vector<double> p01, std::vector<double> p10) {
    if (p01.empty() || p01.size() != p10.size()) throw InputError("TPN rates must be nonempty and paired");
    for (std::size_t i = 0; i < p01.size(); ++i) {
        if (p01[i] < 0 || p01[i] > 1 || p10[i] < 0 || p10[i] > 1) throw InputError("TPN rates must lie in [0, 1]");
        RealMatrix f(2, 2);
        f << 1 - p01[i], p10[i], p01[i], 1 - p10[i];
        if (std::abs(1 - p01[i] - p10[i]) < 1e-14) throw NumericalError("TPN factor is singular");
        factors_.push_back(f);
        inverses_.push_back(f.inverse());
    }
}

std::vector<double> TPNResponse::act(const std::vector<double>& p, bool inverse) const {
    const int n = n_qubits();
    if (p.size() != (std::size_t{1} << n)) throw InputError("distribution size does not match TPN width");
    std::vector<double> out = p;
    for (int q = 0; q < n; ++q) {
        const RealMatrix& f = inverse ? inverses_[q] : factors_[q];
        const std::size_t mask = std::size_t{1} << (n - 1 - q);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (i & mask) continue;
            const double a = out[i], b = out[i | mask];
            out[i] = f(0, 0) * a + f(0, 1) * b;
            out[i | mask] = f(1, 0) * a + f(1, 1) * b;
        }
    }
    return out;
}

std::vector<double> TPNResponse::apply(const std::vector<double>& p) const { return act(p, false); }
std::vector<double> TPNResponse::invert(const std::vector<double>& p) const { return act(p, true); }

RealMatrix TPNResponse::dense() const {
    RealMatrix m = factors_[0];
    for (int q = 1; q < n_qubits(); ++q) {
        RealMatrix next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) next.block<2, 2>(2 * r, 2 * c) = m(r, c) * factors_[q];
        m = std::move(next);
    }
    return m;
}

TPNResponse mem_tpn(const std::vector<double>& p01, const std::vector<double>& p10) { return TPNResponse(p01, p10); }

// ---------------------------------------------------------------- VD, symmetry, QSE

namespace {

int width_of(const Matrix& rho) {
    const auto d = static_cast<std::uint64_t>(rho.rows());
    if (rho.rows() != rho.cols() || d < 2 || !std::has_single_bit(d)) throw InputError("density matrix must be 2^n square");
    return std::countr_zero(d);
}

}  // namespace

double vd_estimate(const Matrix& rho, const Observable& obs, int copies) {
    if (copies < 1) throw InputError("copy count must be >= 1");
    if (obs.width() != width_of(rho)) throw InputError("observable width does not match state");
    Matrix pw = rho;
    for (int i = 1; i < copies; ++i) pw = pw * rho;
    const double tr = pw.trace().real();
    if (tr < 1e-12) throw NumericalError("Tr(rho^M) vanishes");
    return (pw * obs.dense()).trace().real() / tr;
}

double vd_estimate(const SquashedDensityState& state, const Observable& obs, int copies) {
    return vd_estimate(state.density_matrix(), obs, copies);
}

namespace {

Matrix projector(const PauliString& s, int sector, int n) {
    if (sector != 1 && sector != -1) throw InputError("symmetry sector must be +1 or -1");
    if (s.size() != n) throw InputError("symmetry width does not match state");
    PauliString unit = s;
    unit.coefficient = 1.0;
    const Eigen::Index d = Eigen::Index{1} << n;
    return 0.5 * (Matrix::Identity(d, d) + double(sector) * unit.dense());
}

}  // namespace

SymmetryResult symmetry_expand(const Matrix& rho, const Observable& obs, const PauliString& symmetry, int sector) {
    const int n = width_of(rho);
    if (obs.width() != n) throw InputError("observable width does not match state");
    for (const auto& t : obs.terms)
        if (!t.commutes_with(symmetry)) throw InputError("observable term " + t.word() + " does not commute with symmetry");
    const Matrix pr = projector(symmetry, sector, n) * rho;
    SymmetryResult r;
    r.sector_weight = pr.trace().real();
    if (r.sector_weight < 1e-12) throw NumericalError("symmetry sector has vanishing weight");
    r.estimate = (obs.dense() * pr).trace().real() / r.sector_weight;
    r.overhead = 1.0 / r.sector_weight;
    return r;
}

Matrix symmetry_project(const Matrix& rho, const PauliString& symmetry, int sector) {
    const Matrix p = projector(symmetry, sector, width_of(rho));
    const Matrix out = p * rho * p;
    const double w = out.trace().real();
    if (w < 1e-12) throw NumericalError("symmetry sector has vanishing weight");
    return out / w;
}

QSEResult qse_solve(const Matrix& rho, const Observable& hamiltonian, const std::vector<PauliString>& expansion) {
    const int n = width_of(rho);
    if (hamiltonian.width() != n) throw InputError("Hamiltonian width does not match state");
    if (expansion.empty()) throw InputError("expansion set is empty");
    const int m = static_cast<int>(expansion.size());
    std::vector<Matrix> p;
    for (const auto& e : expansion) {
        if (e.size() != n) throw InputError("expansion operator width does not match state");
        PauliString unit = e;
        unit.coefficient = 1.0;
        p.push_back(unit.dense());
    }
    const Matrix h = hamiltonian.dense();
    Matrix hm(m, m), bm(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            hm(i, j) = (rho * p[i] * h * p[j]).trace();
            bm(i, j) = (rho * p[i] * p[j]).trace();
        }
    hm = 0.5 * (hm + hm.adjoint()).eval();
    bm = 0.5 * (bm + bm.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eb(bm);
    std::vector<int> keep;
    for (int i = 0; i < m; ++i)
        if (eb.eigenvalues()(i) > 1e-10) keep.push_back(i);
    if (keep.empty()) throw NumericalError("QSE overlap matrix is numerically zero");
    Matrix x(m, keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k)
        x.col(k) = eb.eigenvectors().col(keep[k]) / std::sqrt(eb.eigenvalues()(keep[k]));
    Matrix hr = x.adjoint() * hm * x;
    hr = 0.5 * (hr + hr.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eh(hr);
    QSEResult r;
    r.energy = eh.eigenvalues()(0);
    const Vector c = x * eh.eigenvectors().col(0);
    r.coefficients.assign(c.data(), c.data() + c.size());
    r.kept_dimension = static_cast<int>(keep.size());
    return r;
}

// ---------------------------------------------------------------- CDR

CDRModel cdr_fit(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2) throw InputError("CDR needs at least two training pairs");
    double mx = 0, my = 0;
    for (auto [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= pairs.size();
    my /= pairs.size();
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx <= 1e-300) throw InputError("CDR training data has no spread in noisy values");
    CDRModel m;
    m.slope = sxy / sxx;
    m.intercept = my - m.slope * mx;
    return m;
}

Circuit cdr_training_circuit(const Circuit& circuit, Rng& rng) {
    Circuit out(circuit.n_qubits());
    for (const Gate& g : circuit.ops()) {
        if (g.param) {
            if (g.param->symbolic()) throw InputError("bind all parameters before building training circuits");
            const double k = g.param->value / (kPi / 2);
            const double lo = std::floor(k);
            const double snapped = (uniform01(rng) < k - lo ? lo + 1 : lo) * (kPi / 2);
            out.add(Gate::rotation(g.kind, g.targets[0], Param{snapped}));
        } else if (g.kind == GateKind::T || g.kind == GateKind::Tdg) {
            const bool up = uniform01(rng) < 0.5;
            if (up) out.add(g.kind == GateKind::T ? GateKind::S : GateKind::Sdg, g.targets);
        } else {
            out.add(g);
        }
    }
    return out;
}

// ---------------------------------------------------------------- twirling

Circuit pauli_twirl(const Circuit& circuit, Rng& rng) {
    const int n = circuit.n_qubits();
    struct Op {
        Gate gate;
        bool inserted = false;
        bool removed = false;
    };
    std::vector<Op> ops;
    for (const Gate& g : circuit.ops()) {
        if (g.num_targets() >= 2 && g.kind != GateKind::CX && g.kind != GateKind::CZ && g.kind != GateKind::SWAP)
            throw InputError("Pauli twirling needs Clifford two-qubit gates, found '" + std::string(kind_name(g.kind)) + "'");
        if (g.num_targets() != 2) {
            ops.push_back({g});
            continue;
        }
        PauliString p(std::string(n, 'I'));
        const int la = static_cast<int>(uniform_index(rng, 4)), lb = static_cast<int>(uniform_index(rng, 4));
        p.letters[g.targets[0]] = static_cast<std::uint8_t>(la);
        p.letters[g.targets[1]] = static_cast<std::uint8_t>(lb);
        static constexpr GateKind kLetter[] = {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z};
        for (int t : g.targets)
            if (p.letters[t]) ops.push_back({Gate::make(kLetter[p.letters[t]], {t}), true});
        ops.push_back({g});
        // G P = (G P G^dagger) G, so following G with the conjugated Pauli restores G up to phase.
        const PhasedPauli comp = pauli_apply_conjugation(p, g);
        for (int t : g.targets)
            if (comp.pauli.letters[t]) ops.push_back({Gate::make(kLetter[comp.pauli.letters[t]], {t}), true});
    }

    // Fuse runs of bound single-qubit gates that contain an inserted Pauli.
    std::vector<std::vector<std::size_t>> run(n);
    auto flush = [&](int q) {
        auto& r = run[q];
        bool has_inserted = false;
        for (std::size_t i : r) has_inserted |= ops[i].inserted;
        if (has_inserted && r.size() >= 2) {
            Matrix m = Matrix::Identity(2, 2);
            for (std::size_t i : r) m = gate_matrix(ops[i].gate) * m;
            for (std::size_t i = 0; i + 1 < r.size(); ++i) ops[r[i]].removed = true;
            ops[r.back()].gate = Gate::raw(m, {q});
        }
        r.clear();
    };
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const Gate& g = ops[i].gate;
        const bool bound_1q = g.num_targets() == 1 && !(g.param && g.param->symbolic());
        if (bound_1q) {
            run[g.targets[0]].push_back(i);
        } else {
            for (int t : g.targets) flush(t);
        }
    }
    for (int q = 0; q < n; ++q) flush(q);

    Circuit out(n);
    out.set_param_names(circuit.param_names());
    for (const Op& op : ops)
        if (!op.removed) out.add(op.gate);
    return out;
}

}  // namespace nisq
