#include "nisq/circuit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nisq {

namespace {

struct KindInfo {
    GateKind kind;
    std::string_view name;
    int arity;
    bool parametric;
};

constexpr std::array<KindInfo, 17> kKinds{{
    {GateKind::I, "id", 1, false},
    {GateKind::X, "x", 1, false},
    {GateKind::Y, "y", 1, false},
    {GateKind::Z, "z", 1, false},
    {GateKind::H, "h", 1, false},
    {GateKind::S, "s", 1, false},
    {GateKind::Sdg, "sdg", 1, false},
    {GateKind::T, "t", 1, false},
    {GateKind::Tdg, "tdg", 1, false},
    {GateKind::Rx, "rx", 1, true},
    {GateKind::Ry, "ry", 1, true},
    {GateKind::Rz, "rz", 1, true},
    {GateKind::CX, "cx", 2, false},
    {GateKind::CZ, "cz", 2, false},
    {GateKind::SWAP, "swap", 2, false},
    {GateKind::CCZ, "ccz", 3, false},
    {GateKind::RawMatrix, "unitary", 0, false},
}};

const KindInfo& info(GateKind kind) {
    return kKinds[static_cast<std::size_t>(kind)];
}

}  // namespace

int arity(GateKind kind) { return info(kind).arity; }
bool is_parametric(GateKind kind) { return info(kind).parametric; }
std::string_view kind_name(GateKind kind) { return info(kind).name; }

std::optional<GateKind> kind_from_name(std::string_view name) {
    for (const auto& k : kKinds) {
        if (k.name == name) return k.kind;
    }
    if (name == "i") return GateKind::I;
    if (name == "cnot") return GateKind::CX;
    return std::nullopt;
}

double Param::resolve(std::span<const double> theta) const {
    if (!symbolic()) return value;
    if (slot >= static_cast<int>(theta.size()))
        throw InputError("missing value for parameter slot " + std::to_string(slot));
    return value + scale * theta[slot];
}

Gate Gate::make(GateKind kind, std::vector<int> targets) {
    Gate g;
    g.kind = kind;
    g.targets = std::move(targets);
    return g;
}

Gate Gate::rotation(GateKind kind, int target, Param param) {
    Gate g;
    g.kind = kind;
    g.targets = {target};
    g.param = param;
    return g;
}

Gate Gate::raw(Matrix unitary, std::vector<int> targets) {
    Gate g;
    g.kind = GateKind::RawMatrix;
    g.targets = std::move(targets);
    g.matrix = std::make_shared<const Matrix>(std::move(unitary));
    return g;
}

bool Gate::operator==(const Gate& other) const {
    if (kind != other.kind || targets != other.targets || param != other.param) return false;
    if (static_cast<bool>(matrix) != static_cast<bool>(other.matrix)) return false;
    return !matrix || *matrix == *other.matrix;
}

bool is_unitary(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    Matrix d = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff() < tol;
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) throw InputError("circuit needs at least one qubit");
}

Circuit& Circuit::add(Gate gate) {
    const int k = gate.num_targets();
    if (gate.kind == GateKind::RawMatrix) {
        if (!gate.matrix || gate.matrix->rows() != (1 << k) || gate.matrix->cols() != (1 << k))
            throw InputError("unitary payload does not match its target count");
        if (!is_unitary(*gate.matrix, 1e-10)) throw InputError("unitary payload is not unitary");
    } else if (k != arity(gate.kind)) {
        throw InputError(std::string(kind_name(gate.kind)) + " expects " +
                         std::to_string(arity(gate.kind)) + " qubit(s)");
    }
    if (is_parametric(gate.kind) != gate.param.has_value())
        throw InputError(std::string(kind_name(gate.kind)) +
                         (gate.param ? " takes no parameter" : " requires a parameter"));
    std::set<int> seen;
    for (int t : gate.targets) {
        if (t < 0 || t >= n_qubits_)
            throw InputError("qubit index " + std::to_string(t) + " out of range for width " +
                             std::to_string(n_qubits_));
        if (!seen.insert(t).second) throw InputError("repeated target qubit " + std::to_string(t));
    }
    if (gate.param && gate.param->slot >= n_params())
        throw InputError("parameter slot " + std::to_string(gate.param->slot) + " not declared");
    ops_.push_back(std::move(gate));
    return *this;
}

int Circuit::param_slot(const std::string& name) {
    auto it = std::find(param_names_.begin(), param_names_.end(), name);
    if (it != param_names_.end()) return static_cast<int>(it - param_names_.begin());
    param_names_.push_back(name);
    return n_params() - 1;
}

bool Circuit::operator==(const Circuit& other) const {
    return n_qubits_ == other.n_qubits_ && ops_ == other.ops_ && param_names_ == other.param_names_;
}

const Matrix& pauli_matrix(int letter) {
    static const std::array<Matrix, 4> paulis = [] {
        std::array<Matrix, 4> p;
        p[0] = Matrix::Identity(2, 2);
        p[1] = Matrix::Zero(2, 2);
        p[1](0, 1) = p[1](1, 0) = 1.0;
        p[2] = Matrix::Zero(2, 2);
        p[2](0, 1) = -kI;
        p[2](1, 0) = kI;
        p[3] = Matrix::Zero(2, 2);
        p[3](0, 0) = 1.0;
        p[3](1, 1) = -1.0;
        return p;
    }();
    return paulis.at(letter);
}

Matrix gate_matrix(const Gate& gate, std::span<const double> params) {
    const double s2 = std::sqrt(0.5);
    Matrix m;
    switch (gate.kind) {
        case GateKind::I: return Matrix::Identity(2, 2);
        case GateKind::X: return pauli_matrix(1);
        case GateKind::Y: return pauli_matrix(2);
        case GateKind::Z: return pauli_matrix(3);
        case GateKind::H:
            m.resize(2, 2);
            m << s2, s2, s2, -s2;
            return m;
        case GateKind::S:
        case GateKind::Sdg:
            m = Matrix::Identity(2, 2);
            m(1, 1) = gate.kind == GateKind::S ? kI : -kI;
            return m;
        case GateKind::T:
        case GateKind::Tdg:
            m = Matrix::Identity(2, 2);
            m(1, 1) = std::polar(1.0, gate.kind == GateKind::T ? kPi / 4 : -kPi / 4);
            return m;
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rz: {
            if (!gate.param) throw InputError("rotation without parameter");
            const double theta = gate.param->resolve(params);
            const double c = std::cos(theta / 2), s = std::sin(theta / 2);
            m.resize(2, 2);
            if (gate.kind == GateKind::Rx) {
                m << c, -kI * s, -kI * s, c;
            } else if (gate.kind == GateKind::Ry) {
                m << c, -s, s, c;
            } else {
                m << std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2);
            }
            return m;
        }
        case GateKind::CX:
            m = Matrix::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
            return m;
        case GateKind::CZ:
            m = Matrix::Identity(4, 4);
            m(3, 3) = -1.0;
            return m;
        case GateKind::SWAP:
            m = Matrix::Zero(4, 4);
            m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
            return m;
        case GateKind::CCZ:
            m = Matrix::Identity(8, 8);
            m(7, 7) = -1.0;
            return m;
        case GateKind::RawMatrix:
            if (!gate.matrix) throw InputError("unitary gate without payload");
            return *gate.matrix;
    }
    throw InputError("unknown gate kind");
}

Circuit inverse(const Circuit& circuit) {
    Circuit out(circuit.n_qubits());
    out.set_param_names(circuit.param_names());
    for (auto it = circuit.ops().rbegin(); it != circuit.ops().rend(); ++it) {
        Gate g = *it;
        switch (g.kind) {
            case GateKind::S: g.kind = GateKind::Sdg; break;
            case GateKind::Sdg: g.kind = GateKind::S; break;
            case GateKind::T: g.kind = GateKind::Tdg; break;
            case GateKind::Tdg: g.kind = GateKind::T; break;
            case GateKind::Rx:
            case GateKind::Ry:
            case GateKind::Rz:
                g.param->value = -g.param->value;
                g.param->scale = -g.param->scale;
                if (!g.param->symbolic()) g.param->scale = 1.0;
                break;
            case GateKind::RawMatrix:
                g.matrix = std::make_shared<const Matrix>(g.matrix->adjoint());
                break;
            default: break;
        }
        out.add(std::move(g));
    }
    return out;
}

Circuit bind(const Circuit& circuit, std::span<const double> params) {
    Circuit out(circuit.n_qubits());
    for (Gate g : circuit.ops()) {
        if (g.param && g.param->symbolic()) g.param = Param{g.param->resolve(params)};
        out.add(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------- rendering

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string render_param(const Param& p, const std::vector<std::string>& names) {
    if (!p.symbolic()) return fmt_double(p.value);
    std::string s;
    if (p.value != 0.0) s = fmt_double(p.value) + "+";
    if (p.scale == -1.0) {
        s += "-";
    } else if (p.scale != 1.0) {
        s += fmt_double(p.scale) + "*";
    }
    return s + names.at(p.slot);
}

}  // namespace

std::string render(const Circuit& circuit) {
    std::ostringstream os;
    os << "qreg q[" << circuit.n_qubits() << "];\n";
    for (const Gate& g : circuit.ops()) {
        os << kind_name(g.kind);
        if (g.param) os << "(" << render_param(*g.param, circuit.param_names()) << ")";
        if (g.kind == GateKind::RawMatrix) {
            os << "(";
            const Matrix& m = *g.matrix;
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c) {
                    if (r || c) os << ",";
                    os << fmt_double(m(r, c).real()) << "," << fmt_double(m(r, c).imag());
                }
            os << ")";
        }
        for (std::size_t i = 0; i < g.targets.size(); ++i)
            os << (i ? "," : " ") << "q[" << g.targets[i] << "]";
        os << ";\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok { Ident, Number, Symbol, String, End };

struct Token {
    Tok type;
    std::string text;
    int line;
    int col;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
        } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < src.size() && src[j] != '"') ++j;
            if (j >= src.size()) throw ParseError("unterminated string", line, col);
            out.push_back({Tok::String, std::string(src.substr(i + 1, j - i - 1)), line, col});
            advance(j - i + 1);
        } else if (std::string_view("[](),;*/+-").find(c) != std::string_view::npos) {
            out.push_back({Tok::Symbol, std::string(1, c), line, col});
            advance(1);
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

// Affine angle expression: constant + coeff * theta[slot].
struct Affine {
    double constant = 0.0;
    double coeff = 0.0;
    int slot = -1;
};

class Parser {
  public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    Circuit run() {
        skip_header();
        expect_ident("qreg", "expected 'qreg' declaration first");
        reg_ = expect(Tok::Ident, "register name").text;
        expect_sym("[");
        const Token& n = expect(Tok::Number, "register size");
        int width = 0;
        try {
            width = std::stoi(n.text);
        } catch (const std::exception&) {
            throw ParseError("invalid register size", n.line, n.col);
        }
        if (width < 1) throw ParseError("register size must be positive", n.line, n.col);
        expect_sym("]");
        expect_sym(";");
        circuit_ = Circuit(width);
        while (peek().type != Tok::End) statement();
        return std::move(circuit_);
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string reg_;
    Circuit circuit_;

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

    [[noreturn]] void fail(const std::string& msg, const Token& t) const {
        throw ParseError(msg, t.line, t.col);
    }
    const Token& expect(Tok type, const char* what) {
        if (peek().type != type) fail(std::string("expected ") + what, peek());
        return next();
    }
    void expect_sym(const char* s) {
        if (peek().type != Tok::Symbol || peek().text != s) fail(std::string("expected '") + s + "'", peek());
        next();
    }
    bool accept_sym(const char* s) {
        if (peek().type == Tok::Symbol && peek().text == s) {
            next();
            return true;
        }
        return false;
    }
    void expect_ident(const char* s, const char* msg) {
        if (peek().type != Tok::Ident || peek().text != s) fail(msg, peek());
        next();
    }

    void skip_header() {
        while (peek().type == Tok::Ident && (peek().text == "OPENQASM" || peek().text == "include")) {
            while (peek().type != Tok::End && !(peek().type == Tok::Symbol && peek().text == ";")) next();
            expect_sym(";");
        }
    }

    void statement() {
        const Token name = expect(Tok::Ident, "gate name");
        if (name.text == "qreg") fail("qreg may only be declared once", name);
        if (name.text == "barrier") {
            while (peek().type != Tok::End && !(peek().type == Tok::Symbol && peek().text == ";")) next();
            expect_sym(";");
            return;
        }
        auto kind = kind_from_name(name.text);
        if (!kind) fail("unknown gate '" + name.text + "'", name);
        std::vector<Affine> args;
        if (accept_sym("(")) {
            args.push_back(expr());
            while (accept_sym(",")) args.push_back(expr());
            expect_sym(")");
        }
        std::vector<int> qubits;
        qubits.push_back(qarg());
        while (accept_sym(",")) qubits.push_back(qarg());
        expect_sym(";");

        Gate g;
        g.kind = *kind;
        g.targets = qubits;
        if (*kind == GateKind::RawMatrix) {
            const std::size_t dim = std::size_t{1} << qubits.size();
            if (args.size() != 2 * dim * dim)
                fail("unitary on " + std::to_string(qubits.size()) + " qubit(s) needs " +
                         std::to_string(2 * dim * dim) + " real entries", name);
            Matrix m(dim, dim);
            for (std::size_t k = 0; k < dim * dim; ++k) {
                if (args[2 * k].slot >= 0 || args[2 * k + 1].slot >= 0)
                    fail("unitary entries must be numeric", name);
                m(k / dim, k % dim) = cplx(args[2 * k].constant, args[2 * k + 1].constant);
            }
            g.matrix = std::make_shared<const Matrix>(std::move(m));
        } else if (is_parametric(*kind)) {
            if (args.size() != 1) fail(name.text + " takes exactly one angle", name);
            const Affine& a = args[0];
            g.param = a.slot >= 0 ? Param{a.constant, a.slot, a.coeff} : Param{a.constant};
        } else if (!args.empty()) {
            fail(name.text + " takes no parameters", name);
        }
        try {
            circuit_.add(std::move(g));
        } catch (const InputError& e) {
            fail(e.what(), name);
        }
    }

    int qarg() {
        const Token& r = expect(Tok::Ident, "qubit register");
        if (r.text != reg_) fail("unknown register '" + r.text + "'", r);
        expect_sym("[");
        const Token& idx = expect(Tok::Number, "qubit index");
        expect_sym("]");
        const int q = std::stoi(idx.text);
        if (q < 0 || q >= circuit_.n_qubits())
            fail("qubit index " + idx.text + " out of range for qreg of size " +
                     std::to_string(circuit_.n_qubits()), idx);
        return q;
    }

    // expr := term (('+'|'-') term)*
    Affine expr() {
        Affine acc = term();
        while (peek().type == Tok::Symbol && (peek().text == "+" || peek().text == "-")) {
            const Token op = next();
            Affine rhs = term();
            const double sign = op.text == "+" ? 1.0 : -1.0;
            if (acc.slot >= 0 && rhs.slot >= 0 && acc.slot != rhs.slot)
                fail("angle expression may reference one parameter only", op);
            acc.constant += sign * rhs.constant;
            if (rhs.slot >= 0) {
                acc.coeff += sign * rhs.coeff;
                acc.slot = rhs.slot;
            }
        }
        return acc;
    }

    // term := factor (('*'|'/') factor)*
    Affine term() {
        Affine acc = factor();
        while (peek().type == Tok::Symbol && (peek().text == "*" || peek().text == "/")) {
            const Token op = next();
            Affine rhs = factor();
            if (op.text == "*") {
                if (acc.slot >= 0 && rhs.slot >= 0) fail("non-linear angle expression", op);
                if (rhs.slot >= 0) std::swap(acc, rhs);
                acc.constant *= rhs.constant;
                acc.coeff *= rhs.constant;
            } else {
                if (rhs.slot >= 0) fail("division by a parameter", op);
                acc.constant /= rhs.constant;
                acc.coeff /= rhs.constant;
            }
        }
        return acc;
    }

    Affine factor() {
        if (accept_sym("-")) {
            Affine a = factor();
            a.constant = -a.constant;
            a.coeff = -a.coeff;
            return a;
        }
        if (accept_sym("+")) return factor();
        if (accept_sym("(")) {
            Affine a = expr();
            expect_sym(")");
            return a;
        }
        const Token& t = peek();
        if (t.type == Tok::Number) {
            next();
            try {
                return Affine{std::stod(t.text)};
            } catch (const std::exception&) {
                fail("invalid number '" + t.text + "'", t);
            }
        }
        if (t.type == Tok::Ident) {
            next();
            if (t.text == "pi") return Affine{kPi};
            return Affine{0.0, 1.0, circuit_.param_slot(t.text)};
        }
        fail("expected angle expression", t);
    }
};

}  // namespace

Circuit parse_circuit(std::string_view text) {
    return Parser(text).run();
}

Circuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open circuit file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_circuit(ss.str());
}

std::uint64_t bits_to_index(const std::string& bits) {
    std::uint64_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw InputError("bitstring may contain only 0 and 1");
        idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return idx;
}

std::string index_to_bits(std::uint64_t index, int n) {
    std::string s(n, '0');
    for (int q = 0; q < n; ++q)
        if ((index >> (n - 1 - q)) & 1U) s[q] = '1';
    return s;
}

}  // namespace nisq
