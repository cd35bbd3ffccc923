#include "nisq/pauli.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace nisq {

namespace {

std::uint8_t letter_code(char c) {
    switch (c) {
        case 'I': return 0;
        case 'X': return 1;
        case 'Y': return 2;
        case 'Z': return 3;
        default: throw InputError(std::string("invalid Pauli letter '") + c + "'");
    }
}

// Phase (power of i) of the single-qubit product a*b.
int product_phase(int a, int b) {
    static constexpr std::array<std::array<int, 4>, 4> table{{
        {0, 0, 0, 0},
        {0, 0, 1, 3},  // X*Y = iZ, X*Z = -iY
        {0, 3, 0, 1},  // Y*X = -iZ, Y*Z = iX
        {0, 1, 3, 0},  // Z*X = iY, Z*Y = -iX
    }};
    return table[a][b];
}

int product_letter(int a, int b) {
    if (a == 0) return b;
    if (b == 0) return a;
    if (a == b) return 0;
    return 6 - a - b;
}

PhasedPauli local(std::string_view word, int phase = 0) {
    return PhasedPauli{PauliString(word), phase};
}

}  // namespace

PauliString::PauliString(std::string_view word, double coeff) : coefficient(coeff) {
    letters.reserve(word.size());
    for (char c : word) letters.push_back(letter_code(c));
}

std::string PauliString::word() const {
    static constexpr char kChars[] = {'I', 'X', 'Y', 'Z'};
    std::string s;
    for (auto l : letters) s.push_back(kChars[l]);
    return s;
}

bool PauliString::is_identity() const {
    for (auto l : letters)
        if (l) return false;
    return true;
}

std::uint64_t PauliString::x_mask() const {
    std::uint64_t m = 0;
    const int n = size();
    for (int q = 0; q < n; ++q)
        if (letters[q] == 1 || letters[q] == 2) m |= std::uint64_t{1} << (n - 1 - q);
    return m;
}

std::uint64_t PauliString::z_mask() const {
    std::uint64_t m = 0;
    const int n = size();
    for (int q = 0; q < n; ++q)
        if (letters[q] == 2 || letters[q] == 3) m |= std::uint64_t{1} << (n - 1 - q);
    return m;
}

bool PauliString::commutes_with(const PauliString& other) const {
    if (other.size() != size()) throw InputError("Pauli width mismatch");
    int anti = 0;
    for (int q = 0; q < size(); ++q) {
        const auto a = letters[q], b = other.letters[q];
        if (a && b && a != b) ++anti;
    }
    return anti % 2 == 0;
}

Matrix PauliString::dense() const {
    Matrix m = Matrix::Constant(1, 1, coefficient);
    for (auto l : letters) {
        const Matrix& p = pauli_matrix(l);
        Matrix next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) next.block<2, 2>(2 * r, 2 * c) = m(r, c) * p;
        m = std::move(next);
    }
    return m;
}

cplx PhasedPauli::phase() const {
    static constexpr std::array<cplx, 4> kPhases{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
    return kPhases[((phase_power % 4) + 4) % 4];
}

Matrix Observable::dense() const {
    if (terms.empty()) throw InputError("empty observable");
    const Eigen::Index dim = Eigen::Index{1} << width();
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& t : terms) m += t.dense();
    return m;
}

Observable parse_observable(std::string_view text) {
    Observable obs;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
        std::istringstream ls(line);
        std::string coeff_tok, word;
        if (!(ls >> coeff_tok)) continue;
        if (!(ls >> word)) throw ParseError("expected 'coeff WORD'", lineno, 1);
        double coeff = 0.0;
        try {
            coeff = std::stod(coeff_tok);
        } catch (const std::exception&) {
            throw ParseError("invalid coefficient '" + coeff_tok + "'", lineno, 1);
        }
        try {
            obs.terms.emplace_back(word, coeff);
        } catch (const InputError& e) {
            throw ParseError(e.what(), lineno, static_cast<int>(coeff_tok.size()) + 2);
        }
        if (obs.terms.back().size() != obs.terms.front().size())
            throw ParseError("Pauli words must share one width", lineno, 1);
    }
    if (obs.terms.empty()) throw InputError("observable has no terms");
    return obs;
}

Observable load_observable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open observable file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_observable(ss.str());
}

PhasedPauli multiply(const PhasedPauli& a, const PhasedPauli& b) {
    if (a.pauli.size() != b.pauli.size()) throw InputError("Pauli width mismatch");
    PhasedPauli out;
    out.pauli.letters.resize(a.pauli.letters.size());
    out.pauli.coefficient = a.pauli.coefficient * b.pauli.coefficient;
    int phase = a.phase_power + b.phase_power;
    for (std::size_t q = 0; q < a.pauli.letters.size(); ++q) {
        const int la = a.pauli.letters[q], lb = b.pauli.letters[q];
        phase += product_phase(la, lb);
        out.pauli.letters[q] = static_cast<std::uint8_t>(product_letter(la, lb));
    }
    out.phase_power = ((phase % 4) + 4) % 4;
    return out;
}

bool is_clifford_kind(GateKind kind) {
    switch (kind) {
        case GateKind::I:
        case GateKind::H:
        case GateKind::S:
        case GateKind::Sdg:
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
        case GateKind::CX:
        case GateKind::CZ:
        case GateKind::SWAP: return true;
        default: return false;
    }
}

namespace {

// Images (X_0, Z_0[, X_1, Z_1]) of the local generators under conjugation.
std::vector<PhasedPauli> generator_images(GateKind kind) {
    switch (kind) {
        case GateKind::I: return {local("X"), local("Z")};
        case GateKind::H: return {local("Z"), local("X")};
        case GateKind::S: return {local("Y"), local("Z")};
        case GateKind::Sdg: return {local("Y", 2), local("Z")};
        case GateKind::X: return {local("X"), local("Z", 2)};
        case GateKind::Y: return {local("X", 2), local("Z", 2)};
        case GateKind::Z: return {local("X", 2), local("Z")};
        case GateKind::CX: return {local("XX"), local("ZI"), local("IX"), local("ZZ")};
        case GateKind::CZ: return {local("XZ"), local("ZI"), local("ZX"), local("IZ")};
        case GateKind::SWAP: return {local("IX"), local("IZ"), local("XI"), local("ZI")};
        default: throw InputError(std::string("gate '") + std::string(kind_name(kind)) + "' is not Clifford");
    }
}

}  // namespace

PhasedPauli pauli_apply_conjugation(const PhasedPauli& p, const Gate& clifford) {
    if (!is_clifford_kind(clifford.kind))
        throw InputError(std::string("gate '") + std::string(kind_name(clifford.kind)) + "' is not Clifford");
    const auto images = generator_images(clifford.kind);
    const int k = clifford.num_targets();
    // Local factor written as i^{xz} X^x Z^z per target, conjugated generator by generator.
    PhasedPauli acc{PauliString(std::string(k, 'I')), 0};
    int phase = 0;
    for (int j = 0; j < k; ++j) {
        const int l = p.pauli.letters.at(clifford.targets[j]);
        const bool x = l == 1 || l == 2, z = l == 2 || l == 3;
        if (x && z) phase += 1;
        if (x) acc = multiply(acc, images[2 * j]);
        if (z) acc = multiply(acc, images[2 * j + 1]);
    }
    PhasedPauli out = p;
    for (int j = 0; j < k; ++j) out.pauli.letters[clifford.targets[j]] = acc.pauli.letters[j];
    out.phase_power = (((p.phase_power + phase + acc.phase_power) % 4) + 4) % 4;
    return out;
}

PhasedPauli pauli_apply_conjugation(const PauliString& p, const Gate& clifford) {
    return pauli_apply_conjugation(PhasedPauli{p, 0}, clifford);
}

}  // namespace nisq
