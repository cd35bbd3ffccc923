#include "nisq/noise.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nisq {

namespace {

void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError(std::string(what) + " must lie in [0, 1]");
}

Matrix pauli_word_matrix(int index, int arity) {
    // First target is the most significant letter.
    Matrix m = Matrix::Ones(1, 1);
    for (int j = 0; j < arity; ++j) {
        const int letter = (index >> (2 * (arity - 1 - j))) & 3;
        const Matrix& p = pauli_matrix(letter);
        Matrix next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) next.block<2, 2>(2 * r, 2 * c) = m(r, c) * p;
        m = std::move(next);
    }
    return m;
}

}  // namespace

bool Channel::trace_preserving(double tol) const {
    const Eigen::Index d = Eigen::Index{1} << arity;
    Matrix s = Matrix::Zero(d, d);
    for (const auto& k : kraus) s += k.adjoint() * k;
    return (s - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < tol;
}

Channel identity_channel(int arity) {
    std::vector<double> rates(std::size_t{1} << (2 * arity), 0.0);
    rates[0] = 1.0;
    Channel c = pauli_channel(rates);
    c.name = "identity";
    return c;
}

Channel depolarizing(double p, int arity) {
    check_prob(p, "depolarizing probability");
    if (arity < 1 || arity > 2) throw InputError("depolarizing arity must be 1 or 2");
    const std::size_t terms = std::size_t{1} << (2 * arity);
    std::vector<double> rates(terms, p / double(terms - 1));
    rates[0] = 1.0 - p;
    Channel c = pauli_channel(rates);
    c.name = "depolarizing";
    return c;
}

Channel bit_flip(double p) {
    check_prob(p, "bit-flip probability");
    Channel c = pauli_channel({1.0 - p, p, 0.0, 0.0});
    c.name = "bit_flip";
    return c;
}

Channel phase_flip(double p) {
    check_prob(p, "phase-flip probability");
    Channel c = pauli_channel({1.0 - p, 0.0, 0.0, p});
    c.name = "phase_flip";
    return c;
}

Channel amplitude_damping(double gamma) {
    check_prob(gamma, "damping rate");
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    Channel c;
    c.name = "amplitude_damping";
    c.arity = 1;
    c.kraus = {k0, k1};
    return c;
}

Channel pauli_channel(std::vector<double> rates) {
    int arity = 0;
    if (rates.size() == 4)
        arity = 1;
    else if (rates.size() == 16)
        arity = 2;
    else
        throw InputError("Pauli channel needs 4 or 16 rates");
    double sum = 0.0;
    for (double r : rates) {
        if (r < 0.0) throw InputError("Pauli rates must be nonnegative");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw InputError("Pauli rates must sum to 1");
    Channel c;
    c.name = "pauli";
    c.arity = arity;
    for (std::size_t i = 0; i < rates.size(); ++i)
        if (rates[i] > 0.0) c.kraus.push_back(std::sqrt(rates[i]) * pauli_word_matrix(static_cast<int>(i), arity));
    c.pauli_rates = std::move(rates);
    return c;
}

Channel unitary_channel(const Matrix& u) {
    if (!is_unitary(u)) throw InputError("unitary channel payload is not unitary");
    Channel c;
    c.name = "unitary";
    c.arity = std::countr_zero(static_cast<std::uint64_t>(u.rows()));
    c.kraus = {u};
    return c;
}

Channel kraus_channel(std::vector<Matrix> kraus, std::string name) {
    if (kraus.empty()) throw InputError("channel needs at least one Kraus operator");
    const Eigen::Index d = kraus.front().rows();
    if (d < 2 || !std::has_single_bit(static_cast<std::uint64_t>(d))) throw InputError("Kraus dimension must be 2^k");
    for (const auto& k : kraus)
        if (k.rows() != d || k.cols() != d) throw InputError("Kraus operators must share one square shape");
    Channel c;
    c.name = std::move(name);
    c.arity = std::countr_zero(static_cast<std::uint64_t>(d));
    c.kraus = std::move(kraus);
    if (!c.trace_preserving(1e-10)) throw InputError("Kraus operators are not trace preserving");
    return c;
}

Matrix to_superop(const Channel& channel) {
    const Eigen::Index d = Eigen::Index{1} << channel.arity;
    Matrix m = Matrix::Zero(d * d, d * d);
    for (const auto& k : channel.kraus) {
        const Matrix kc = k.conjugate();
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c)
                if (k(r, c) != cplx{0.0, 0.0}) m.block(r * d, c * d, d, d) += k(r, c) * kc;
    }
    return m;
}

std::vector<std::pair<const Channel*, std::vector<int>>> NoiseModel::after(const Gate& gate) const {
    std::vector<std::pair<const Channel*, std::vector<int>>> out;
    auto attach = [&](const std::vector<Channel>& list) {
        for (const Channel& ch : list) {
            if (ch.arity == 1) {
                for (int t : gate.targets) out.emplace_back(&ch, std::vector<int>{t});
            } else if (ch.arity == gate.num_targets()) {
                out.emplace_back(&ch, gate.targets);
            } else {
                throw InputError("channel '" + ch.name + "' of arity " + std::to_string(ch.arity) +
                                 " cannot attach to a " + std::to_string(gate.num_targets()) + "-qubit gate");
            }
        }
    };
    if (auto it = gates.find(std::string(kind_name(gate.kind))); it != gates.end()) attach(it->second);
    if (auto it = gates.find("*"); it != gates.end()) attach(it->second);
    return out;
}

// ---------------------------------------------------------------- JSON

namespace {

using nlohmann::json;

Channel channel_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) throw InputError("noise channel needs a \"type\" field");
    const std::string type = j.at("type").get<std::string>();
    auto num = [&](const char* key) {
        if (!j.contains(key)) throw InputError("channel '" + type + "' needs \"" + key + "\"");
        return j.at(key).get<double>();
    };
    if (type == "depolarizing") return depolarizing(num("p"), j.value("arity", 1));
    if (type == "bit_flip") return bit_flip(num("p"));
    if (type == "phase_flip") return phase_flip(num("p"));
    if (type == "amplitude_damping") return amplitude_damping(num("gamma"));
    if (type == "pauli") return pauli_channel(j.at("rates").get<std::vector<double>>());
    if (type == "identity") return identity_channel(j.value("arity", 1));
    throw InputError("unknown channel type '" + type + "'");
}

json channel_to_json(const Channel& c) {
    if (c.pauli_rates) return json{{"type", "pauli"}, {"rates", *c.pauli_rates}};
    if (c.name == "amplitude_damping") {
        const double g = std::norm(c.kraus.at(1)(0, 1));
        return json{{"type", "amplitude_damping"}, {"gamma", g}};
    }
    throw InputError("channel '" + c.name + "' has no JSON form");
}

}  // namespace

NoiseModel parse_noise_model(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("noise model: ") + e.what());
    }
    try {
        if (!j.is_object()) throw InputError("noise model must be a JSON object");
        if (j.value("version", 1) != 1) throw InputError("unsupported noise model version");
        NoiseModel m;
        if (j.contains("gates")) {
            for (const auto& [key, list] : j.at("gates").items()) {
                if (key != "*" && !kind_from_name(key)) throw InputError("unknown gate kind '" + key + "' in noise model");
                const std::string k = key == "*" ? key : std::string(kind_name(*kind_from_name(key)));
                if (!list.is_array()) throw InputError("noise entry for '" + key + "' must be an array");
                for (const auto& ch : list) m.add(k, channel_from_json(ch));
            }
        }
        if (j.contains("readout")) {
            const auto& r = j.at("readout");
            auto vec = [&](const char* key) {
                std::vector<double> v;
                if (!r.contains(key)) return std::vector<double>{0.0};
                if (r.at(key).is_array())
                    v = r.at(key).get<std::vector<double>>();
                else
                    v = {r.at(key).get<double>()};
                for (double x : v) check_prob(x, key);
                return v;
            };
            m.readout.p01 = vec("p01");
            m.readout.p10 = vec("p10");
        }
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("noise model: ") + e.what());
    }
}

NoiseModel load_noise_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open noise model '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_noise_model(ss.str());
}

std::string noise_model_to_json(const NoiseModel& model) {
    json j{{"version", 1}, {"gates", json::object()}};
    for (const auto& [k, list] : model.gates) {
        json arr = json::array();
        for (const auto& c : list) arr.push_back(channel_to_json(c));
        j["gates"][k] = arr;
    }
    if (!model.readout.empty()) j["readout"] = json{{"p01", model.readout.p01}, {"p10", model.readout.p10}};
    return j.dump(2);
}

// ---------------------------------------------------------------- density state

SquashedDensityState SquashedDensityState::zero(int n, std::uint64_t budget_bytes) {
    if (n < 1) throw InputError("density state needs at least one qubit");
    return SquashedDensityState(n, StateVector::zero(2 * n, budget_bytes));
}

SquashedDensityState SquashedDensityState::from_pure(const StateVector& psi) {
    const int n = psi.n_qubits();
    const std::uint64_t d = psi.dim();
    std::vector<cplx> v(d * d);
    for (std::uint64_t a = 0; a < d; ++a)
        for (std::uint64_t b = 0; b < d; ++b) v[(a << n) | b] = psi[a] * std::conj(psi[b]);
    return SquashedDensityState(n, StateVector::from_amplitudes(std::move(v)));
}

SquashedDensityState SquashedDensityState::from_matrix(const Matrix& rho) {
    const std::uint64_t d = rho.rows();
    if (rho.cols() != rho.rows() || d < 2 || !std::has_single_bit(d)) throw InputError("density matrix must be 2^n square");
    const int n = std::countr_zero(d);
    std::vector<cplx> v(d * d);
    for (std::uint64_t a = 0; a < d; ++a)
        for (std::uint64_t b = 0; b < d; ++b) v[(a << n) | b] = rho(a, b);
    return SquashedDensityState(n, StateVector::from_amplitudes(std::move(v)));
}

cplx SquashedDensityState::element(std::uint64_t row, std::uint64_t col) const {
    return vec_[(row << n_) | col];
}

void SquashedDensityState::apply_unitary(const Matrix& u, std::span<const int> targets) {
    std::vector<int> primed;
    for (int t : targets) {
        if (t < 0 || t >= n_) throw InputError("gate target outside state width");
        primed.push_back(t + n_);
    }
    auto amps = vec_.data();
    apply_matrix_inplace(amps, 2 * n_, u, targets);
    apply_matrix_inplace(amps, 2 * n_, u.conjugate(), primed);
}

void SquashedDensityState::apply(const Gate& gate, std::span<const double> params) {
    if (gate.kind == GateKind::I) return;
    apply_unitary(gate_matrix(gate, params), gate.targets);
}

void SquashedDensityState::apply_channel(const Channel& channel, std::span<const int> targets) {
    if (static_cast<int>(targets.size()) != channel.arity) throw InputError("channel arity does not match targets");
    std::vector<int> both(targets.begin(), targets.end());
    for (int t : targets) {
        if (t < 0 || t >= n_) throw InputError("channel target outside state width");
        both.push_back(t + n_);
    }
    vec_.apply_matrix(to_superop(channel), both);
}

double SquashedDensityState::trace() const {
    double t = 0.0;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n_); ++i) t += element(i, i).real();
    return t;
}

namespace {

double clamp_probability(cplx v) {
    if (std::abs(v.imag()) > 1e-10) throw NumericalError("density diagonal has imaginary part " + std::to_string(v.imag()));
    return std::clamp(v.real(), 0.0, 1.0);
}

}  // namespace

double SquashedDensityState::probability(const std::string& bits) const {
    if (static_cast<int>(bits.size()) != n_) throw InputError("bitstring length does not match state width");
    const std::uint64_t i = bits_to_index(bits);
    return clamp_probability(element(i, i));
}

std::vector<double> SquashedDensityState::probabilities() const {
    std::vector<double> p(std::size_t{1} << n_);
    for (std::uint64_t i = 0; i < p.size(); ++i) p[i] = clamp_probability(element(i, i));
    return p;
}

double SquashedDensityState::expectation(const PauliString& p) const {
    if (p.size() != n_) throw InputError("Pauli width does not match state width");
    // tr(P rho) = sum_s i^{nY} (-1)^{|s & z|} rho[s, s ^ x]
    const std::uint64_t x = p.x_mask(), z = p.z_mask();
    int ny = 0;
    for (auto l : p.letters) ny += l == 2;
    static constexpr cplx kPow[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    cplx acc{0.0, 0.0};
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n_); ++s) {
        const double sign = (std::popcount(s & z) & 1) ? -1.0 : 1.0;
        acc += sign * element(s, s ^ x);
    }
    return (acc * kPow[ny % 4]).real() * p.coefficient;
}

double SquashedDensityState::expectation(const Observable& obs) const {
    double total = 0.0;
    for (const auto& t : obs.terms) total += expectation(t);
    return total;
}

Matrix SquashedDensityState::density_matrix() const {
    const Eigen::Index d = Eigen::Index{1} << n_;
    Matrix rho(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) rho(a, b) = element(a, b);
    return rho;
}

SquashedDensityState run_density(const Circuit& circuit, const NoiseModel& noise, std::span<const double> params) {
    SquashedDensityState s = SquashedDensityState::zero(circuit.n_qubits());
    for (const Gate& g : circuit.ops()) {
        s.apply(g, params);
        for (const auto& [ch, targets] : noise.after(g)) s.apply_channel(*ch, targets);
    }
    return s;
}

std::vector<double> apply_readout(std::span<const double> probs, int n, const ReadoutError& readout) {
    std::vector<double> p(probs.begin(), probs.end());
    if (readout.empty()) return p;
    for (int q = 0; q < n; ++q) {
        const double p01 = readout.p01_of(q), p10 = readout.p10_of(q);
        const std::uint64_t mask = std::uint64_t{1} << (n - 1 - q);
        for (std::uint64_t i = 0; i < p.size(); ++i) {
            if (i & mask) continue;
            const double a = p[i], b = p[i | mask];
            p[i] = (1 - p01) * a + p10 * b;
            p[i | mask] = p01 * a + (1 - p10) * b;
        }
    }
    return p;
}

void apply_readout(std::string& bits, const ReadoutError& readout, Rng& rng) {
    if (readout.empty()) return;
    for (std::size_t q = 0; q < bits.size(); ++q) {
        const double flip = bits[q] == '0' ? readout.p01_of(static_cast<int>(q)) : readout.p10_of(static_cast<int>(q));
        if (uniform01(rng) < flip) bits[q] = bits[q] == '0' ? '1' : '0';
    }
}

MCResult run_pauli_mc(const Circuit& circuit, const NoiseModel& noise, int shots, std::uint64_t seed,
                      const std::vector<Observable>& observables, std::span<const double> params) {
    if (shots < 1) throw InputError("shots must be >= 1");
    for (const auto& [k, list] : noise.gates)
        for (const auto& ch : list)
            if (!ch.pauli_rates) throw InputError("Monte Carlo mode needs Pauli channels; '" + ch.name + "' is not one");
    const int n = circuit.n_qubits();
    // Pre-bind gate matrices and per-gate channel lists.
    std::vector<Matrix> mats;
    std::vector<std::vector<std::pair<const Channel*, std::vector<int>>>> attached;
    for (const Gate& g : circuit.ops()) {
        mats.push_back(gate_matrix(g, params));
        attached.push_back(noise.after(g));
    }
    MCResult res;
    res.bitstrings.resize(shots);
    std::vector<std::vector<double>> values(observables.size(), std::vector<double>(shots));

#ifdef NISQ_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (int s = 0; s < shots; ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        StateVector psi = StateVector::zero(n);
        for (std::size_t gi = 0; gi < circuit.ops().size(); ++gi) {
            const Gate& g = circuit.ops()[gi];
            if (g.kind == GateKind::CCZ)
                psi.apply(g);
            else if (g.kind != GateKind::I)
                psi.apply_matrix(mats[gi], g.targets);
            for (const auto& [ch, targets] : attached[gi]) {
                const auto& rates = *ch->pauli_rates;
                double r = uniform01(rng), acc = 0.0;
                std::size_t pick = rates.size() - 1;
                for (std::size_t i = 0; i < rates.size(); ++i) {
                    acc += rates[i];
                    if (r < acc) {
                        pick = i;
                        break;
                    }
                }
                for (int j = 0; j < ch->arity; ++j) {
                    const int letter = static_cast<int>(pick >> (2 * (ch->arity - 1 - j))) & 3;
                    if (letter) psi.apply_matrix(pauli_matrix(letter), std::vector<int>{targets[j]});
                }
            }
        }
        std::string bits = psi.sample(1, rng).front();
        apply_readout(bits, noise.readout, rng);
        res.bitstrings[s] = std::move(bits);
        for (std::size_t o = 0; o < observables.size(); ++o) values[o][s] = psi.expectation(observables[o]);
    }
    for (const auto& v : values) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= shots;
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var = shots > 1 ? var / (shots - 1) : 0.0;
        res.means.push_back(mean);
        res.std_errors.push_back(std::sqrt(var / shots));
    }
    return res;
}

}  // namespace nisq
