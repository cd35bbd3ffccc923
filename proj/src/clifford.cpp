#include "nisq/clifford.hpp"

#include "nisq/statevector.hpp"

namespace nisq {

Tableau Tableau::identity(int n) {
    Tableau t;
    for (int q = 0; q < n; ++q) {
        std::string x(n, 'I'), z(n, 'I');
        x[q] = 'X';
        z[q] = 'Z';
        t.x_images.push_back(PhasedPauli{PauliString(x), 0});
        t.z_images.push_back(PhasedPauli{PauliString(z), 0});
    }
    return t;
}

void Tableau::then(const Gate& gate) {
    for (auto& p : x_images) p = pauli_apply_conjugation(p, gate);
    for (auto& p : z_images) p = pauli_apply_conjugation(p, gate);
}

void Tableau::then(const std::vector<Gate>& word) {
    for (const Gate& g : word) then(g);
}

std::string Tableau::key() const {
    std::string k;
    for (const auto* images : {&x_images, &z_images})
        for (const PhasedPauli& p : *images) {
            k.push_back(static_cast<char>('0' + p.phase_power));
            for (auto l : p.pauli.letters) k.push_back(static_cast<char>('0' + l));
        }
    return k;
}

CliffordGroup::CliffordGroup(int n) : n_(n) {
    std::vector<Gate> gens;
    for (int q = 0; q < n; ++q) {
        gens.push_back(Gate::make(GateKind::H, {q}));
        gens.push_back(Gate::make(GateKind::S, {q}));
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) gens.push_back(Gate::make(GateKind::CX, {a, b}));

    std::vector<Tableau> tabs{Tableau::identity(n)};
    words_.push_back({});
    index_.emplace(tabs[0].key(), 0);
    for (std::size_t head = 0; head < words_.size(); ++head) {
        for (const Gate& g : gens) {
            Tableau t = tabs[head];
            t.then(g);
            auto [it, fresh] = index_.emplace(t.key(), static_cast<int>(words_.size()));
            if (!fresh) continue;
            std::vector<Gate> w = words_[head];
            w.push_back(g);
            words_.push_back(std::move(w));
            tabs.push_back(std::move(t));
        }
    }
}

const CliffordGroup& CliffordGroup::get(int n) {
    if (n < 1 || n > 2) throw InputError("Clifford sampling supports 1 or 2 qubits");
    if (n == 1) {
        static const CliffordGroup one(1);
        return one;
    }
    static const CliffordGroup two(2);
    return two;
}

int CliffordGroup::index_of(const Tableau& t) const {
    auto it = index_.find(t.key());
    if (it == index_.end()) throw InputError("tableau is not a Clifford on this register");
    return it->second;
}

int CliffordGroup::index_of(const std::vector<Gate>& word) const {
    Tableau t = Tableau::identity(n_);
    t.then(word);
    return index_of(t);
}

std::vector<Gate> clifford_sample(int n, Rng& rng) {
    const CliffordGroup& g = CliffordGroup::get(n);
    return g.word(static_cast<int>(uniform_index(rng, g.size())));
}

std::vector<Gate> clifford_inverse(const std::vector<Gate>& word, int n) {
    const CliffordGroup& g = CliffordGroup::get(n);
    Circuit c(n);
    for (const Gate& op : word) c.add(op);
    return g.word(g.index_of(inverse(c).ops()));
}

Matrix word_unitary(const std::vector<Gate>& word, int n) {
    Circuit c(n);
    for (const Gate& op : word) c.add(op);
    return circuit_unitary(c);
}

}  // namespace nisq
