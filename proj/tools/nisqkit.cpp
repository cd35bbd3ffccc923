// nisqkit: batch front end over the simulation, benchmarking, mitigation and compilation library.
// Exit codes: 0 ok, 1 numerical-consistency failure, 2 input error, 3 budget exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "nisq/benchmarks.hpp"
#include "nisq/clifford.hpp"
#include "nisq/compile.hpp"
#include "nisq/mitigation.hpp"
#include "nisq/mps.hpp"
#include "nisq/noise.hpp"
#include "nisq/peps.hpp"
#include "nisq/report.hpp"
#include "nisq/statevector.hpp"
#include "nisq/vqa.hpp"

using namespace nisq;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string format = "json";
    std::string config;
};

struct SimulateOpts {
    std::string circuit, backend = "sv", task = "amplitude", observable, pauli, noise, grid;
    std::vector<std::string> bits;
    std::vector<double> params;
    int shots = 1000, max_bond = 64;
    double trunc_eps = 0.0;
};

struct BenchmarkOpts {
    std::string protocol, noise, circuit, grid = "2x3", topology;
    std::vector<int> lengths;
    int qubits = 1, sequences = 30, shots = 1000, min_width = 2, max_width = 5, circuits = 100, repetitions = 20,
        depth = 10, cycles = 8;
};

struct MitigateOpts {
    std::string method, data, response, circuit, noise, observable, pauli, symmetry, mode = "exact";
    std::vector<double> probs, p01, p10;
    int degree = 2, samples = 10000, copies = 2, sector = -1;
};

struct CompileOpts {
    std::string circuit, graph, emit;
    std::vector<std::string> passes;
    double lookahead = 0.0;
    bool absorb = false;
};

struct GradcheckOpts {
    int circuits = 10, max_qubits = 6, layers = 3;
    double delta = 1e-4;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Whitespace-separated numeric rows; blank lines and '#' comments skipped.
std::vector<std::vector<double>> read_rows(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::logic_error&) {
                throw ParseError("expected a number, got '" + tok + "'", lineno, 1);
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<int, int> parse_grid(const std::string& g) {
    int r = 0, c = 0;
    char x = 0;
    std::istringstream in(g);
    if (!(in >> r >> x >> c) || (x != 'x' && x != 'X') || r < 1 || c < 1)
        throw InputError("grid must look like ROWSxCOLS, got '" + g + "'");
    return {r, c};
}

Observable observable_from(const std::string& file, const std::string& text) {
    if (!file.empty()) return load_observable(file);
    if (!text.empty()) return parse_observable(text);
    throw InputError("an observable is required (--observable FILE or --pauli TEXT)");
}

NoiseModel noise_from(const std::string& file) { return file.empty() ? NoiseModel{} : load_noise_model(file); }

Json counts_json(const std::vector<std::string>& samples) {
    std::map<std::string, int> counts;
    for (const auto& s : samples) ++counts[s];
    Json j = Json::object();
    for (const auto& [k, v] : counts) j[k] = v;
    return j;
}

// ---------------------------------------------------------------- simulate

Json run_simulate(const SimulateOpts& o, std::uint64_t seed) {
    const Circuit raw = load_circuit(o.circuit);
    if (static_cast<int>(o.params.size()) != raw.n_params())
        throw InputError("circuit has " + std::to_string(raw.n_params()) + " parameters, got " +
                         std::to_string(o.params.size()));
    const Circuit c = nisq::bind(raw, std::span<const double>(o.params));
    const int n = c.n_qubits();
    const NoiseModel noise = noise_from(o.noise);
    if (!noise.empty() && o.backend != "density" && !(o.backend == "sv" && (o.task == "sample" || o.task == "expectation")))
        throw InputError("noise models need the density backend (or sv sampling via Pauli trajectories)");
    Rng rng(derive_seed(seed, 0));
    Json res{{"task", o.task}, {"n_qubits", n}};

    std::vector<std::string> bits = o.bits;
    if (bits.empty()) bits.push_back(std::string(n, '0'));
    for (const auto& b : bits)
        if (static_cast<int>(b.size()) != n || b.find_first_not_of("01") != std::string::npos)
            throw InputError("bitstring '" + b + "' does not match the circuit width");

    auto amplitudes_json = [&](auto&& amp) {
        Json a = Json::array();
        for (const auto& b : bits) {
            const cplx z = amp(b);
            a.push_back({{"bits", b}, {"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
        }
        return a;
    };

    if (o.backend == "sv") {
        const StateVector psi = simulate(c);
        if (o.task == "amplitude") {
            res["amplitudes"] = amplitudes_json([&](const std::string& b) { return psi.amplitude(b); });
        } else if (o.task == "probabilities") {
            res["probabilities"] = psi.probabilities();
        } else if (o.task == "sample") {
            if (noise.empty()) res["counts"] = counts_json(psi.sample(o.shots, rng));
            else res["counts"] = counts_json(run_pauli_mc(c, noise, o.shots, seed).bitstrings);
            res["shots"] = o.shots;
        } else if (o.task == "expectation") {
            const Observable obs = observable_from(o.observable, o.pauli);
            if (noise.empty()) {
                res["expectation"] = psi.expectation(obs);
            } else {
                const MCResult mc = run_pauli_mc(c, noise, o.shots, seed, {obs});
                res["expectation"] = mc.means[0];
                res["std_error"] = mc.std_errors[0];
            }
        } else {
            throw InputError("unknown task '" + o.task + "'");
        }
    } else if (o.backend == "mps") {
        MPSState mps = MPSState::product_zero(n, o.max_bond, o.trunc_eps);
        mps.apply_circuit(c);
        res["max_bond_dim"] = mps.max_bond_dim();
        res["discarded_weight"] = mps.total_discarded();
        if (o.task == "amplitude") res["amplitudes"] = amplitudes_json([&](const std::string& b) { return mps.amplitude(b); });
        else if (o.task == "sample") {
            res["counts"] = counts_json(mps.sample(o.shots, rng));
            res["shots"] = o.shots;
        } else if (o.task == "expectation") res["expectation"] = mps.expectation(observable_from(o.observable, o.pauli));
        else throw InputError("task '" + o.task + "' is not available on the mps backend");
    } else if (o.backend == "peps") {
        const auto [rows, cols] = o.grid.empty() ? std::pair{1, n} : parse_grid(o.grid);
        if (rows * cols != n) throw InputError("grid size does not match the circuit width");
        PEPSState peps = PEPSState::zero_grid(cols, rows);
        peps.apply_circuit(c);
        res["max_bond_dim"] = peps.max_bond_dim();
        if (o.task != "amplitude") throw InputError("the peps backend supports the amplitude task only");
        res["amplitudes"] = amplitudes_json([&](const std::string& b) { return peps.amplitude(b); });
    } else if (o.backend == "density") {
        const SquashedDensityState rho = run_density(c, noise);
        if (o.task == "probabilities") {
            res["probabilities"] = apply_readout(rho.probabilities(), n, noise.readout);
        } else if (o.task == "expectation") {
            res["expectation"] = rho.expectation(observable_from(o.observable, o.pauli));
        } else if (o.task == "sample") {
            const std::vector<double> f = noisy_distribution(c, noise, o.shots, rng);
            Json counts = Json::object();
            for (std::uint64_t i = 0; i < f.size(); ++i) {
                const long k = std::lround(f[i] * o.shots);
                if (k > 0) counts[index_to_bits(i, n)] = k;
            }
            res["counts"] = counts;
            res["shots"] = o.shots;
        } else {
            throw InputError("task '" + o.task + "' is not available on the density backend");
        }
        res["trace"] = rho.trace();
    } else {
        throw InputError("unknown backend '" + o.backend + "'");
    }
    return res;
}

// ---------------------------------------------------------------- benchmark

Circuit random_clifford_base(int n, int depth, Rng& rng) {
    Circuit c(n);
    for (int i = 0; i < depth; ++i) {
        const auto k = uniform_index(rng, n > 1 ? 4 : 3);
        const int a = static_cast<int>(uniform_index(rng, n));
        if (k == 0) c.add(GateKind::H, {a});
        else if (k == 1) c.add(GateKind::S, {a});
        else if (k == 2) c.add(GateKind::X, {a});
        else {
            int b = static_cast<int>(uniform_index(rng, n - 1));
            if (b >= a) ++b;
            c.add(GateKind::CX, {a, b});
        }
    }
    return c;
}

Json run_benchmark(const BenchmarkOpts& o, std::uint64_t seed) {
    const NoiseModel noise = noise_from(o.noise);
    Json res{{"protocol", o.protocol}};
    if (o.protocol == "rb") {
        RBConfig cfg;
        cfg.n = o.qubits;
        if (!o.lengths.empty()) cfg.lengths = o.lengths;
        cfg.sequences = o.sequences;
        cfg.shots = o.shots;
        cfg.seed = seed;
        res.update(to_json(rb_run(cfg, noise)));
    } else if (o.protocol == "xeb") {
        XEBConfig cfg;
        cfg.n = o.qubits;
        if (!o.lengths.empty()) cfg.lengths = o.lengths;
        cfg.sequences = o.sequences;
        cfg.shots = o.shots;
        cfg.seed = seed;
        res.update(to_json(xeb_run(cfg, noise)));
    } else if (o.protocol == "qv") {
        QVConfig cfg;
        cfg.min_width = o.min_width;
        cfg.max_width = o.max_width;
        cfg.circuits = o.circuits;
        cfg.shots = o.shots;
        cfg.seed = seed;
        if (o.topology == "line") cfg.topology = [](int m) { return CouplingGraph::line(m); };
        else if (!o.topology.empty()) throw InputError("unknown topology '" + o.topology + "' (expected 'line')");
        res.update(to_json(qv_run(cfg, noise)));
    } else if (o.protocol == "mirror") {
        Rng rng(derive_seed(seed, 1));
        const Circuit base = o.circuit.empty() ? random_clifford_base(o.qubits, o.depth, rng) : load_circuit(o.circuit);
        MirrorConfig cfg;
        cfg.repetitions = o.repetitions;
        cfg.shots = o.shots;
        cfg.seed = seed;
        res["width"] = base.n_qubits();
        res.update(to_json(mirror_run(base, noise, cfg)));
    } else if (o.protocol == "rqc-xeb") {
        const auto [rows, cols] = parse_grid(o.grid);
        Rng rng(derive_seed(seed, 2));
        const Circuit c = rqc_generate(rows, cols, o.cycles, rng);
        std::vector<std::string> samples =
            noise.empty() ? simulate(c).sample(o.shots, rng) : run_pauli_mc(c, noise, o.shots, seed).bitstrings;
        res["n_qubits"] = c.n_qubits();
        res["cycles"] = o.cycles;
        res["shots"] = o.shots;
        res["gates"] = c.size();
        res.update(to_json(linear_xeb_fidelity(c, samples)));
    } else {
        throw InputError("unknown protocol '" + o.protocol + "'");
    }
    return res;
}

// ---------------------------------------------------------------- mitigate

Json run_mitigate(const MitigateOpts& o, std::uint64_t seed) {
    Json res{{"method", o.method}};
    auto points = [&] {
        if (o.data.empty()) throw InputError("--data FILE with 'lambda value' rows is required");
        std::vector<double> l, v;
        for (const auto& row : read_rows(o.data)) {
            if (row.size() != 2) throw InputError("each data row must hold 'lambda value'");
            l.push_back(row[0]);
            v.push_back(row[1]);
        }
        res["lambdas"] = l;
        res["values"] = v;
        return std::pair{l, v};
    };
    auto state = [&] {
        if (o.circuit.empty()) throw InputError("--circuit is required for this method");
        return run_density(load_circuit(o.circuit), noise_from(o.noise));
    };

    if (o.method == "zne-richardson") {
        auto [l, v] = points();
        res.update(to_json(zne_richardson(l, v)));
    } else if (o.method == "zne-exponential") {
        auto [l, v] = points();
        if (l.size() != 2) throw InputError("zne-exponential takes exactly two points");
        res["estimate"] = zne_exponential(v[0], v[1], l[1] / l[0]);
    } else if (o.method == "zne-polyexp") {
        auto [l, v] = points();
        res["degree"] = o.degree;
        res["estimate"] = zne_polyexp(l, v, o.degree);
    } else if (o.method == "pec") {
        if (o.circuit.empty()) throw InputError("--circuit is required for pec");
        const Circuit c = load_circuit(o.circuit);
        const NoiseModel noise = noise_from(o.noise);
        const Observable obs = observable_from(o.observable, o.pauli);
        const PECMode mode = o.mode == "single-shot" ? PECMode::SingleShot : PECMode::Exact;
        if (o.mode != "exact" && o.mode != "single-shot") throw InputError("--mode must be exact or single-shot");
        res.update(to_json(pec_estimate(c, noise, obs, o.samples, seed, mode)));
        res["unmitigated"] = to_json(unmitigated_estimate(c, noise, obs, o.samples, seed, mode));
        res["ideal"] = simulate(c).expectation(obs);
    } else if (o.method == "mem-invert") {
        if (o.response.empty()) throw InputError("--response FILE is required for mem-invert");
        const auto rows = read_rows(o.response);
        const int d = static_cast<int>(rows.size());
        RealMatrix lam(d, d);
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(rows[i].size()) != d) throw InputError("response matrix must be square");
            for (int j = 0; j < d; ++j) lam(i, j) = rows[i][j];
        }
        if (static_cast<int>(o.probs.size()) != d) throw InputError("--probs must have one entry per response row");
        res.update(to_json(mem_invert(lam, o.probs)));
    } else if (o.method == "mem-tpn") {
        const TPNResponse tpn = mem_tpn(o.p01, o.p10);
        if (o.probs.size() != (std::size_t{1} << tpn.n_qubits())) throw InputError("--probs must have 2^n entries");
        res["probabilities"] = tpn.invert(o.probs);
    } else if (o.method == "vd") {
        const SquashedDensityState rho = state();
        const Observable obs = observable_from(o.observable, o.pauli);
        res["copies"] = o.copies;
        res["raw"] = rho.expectation(obs);
        res["estimate"] = vd_estimate(rho, obs, o.copies);
    } else if (o.method == "symmetry") {
        const SquashedDensityState rho = state();
        const Observable obs = observable_from(o.observable, o.pauli);
        if (o.symmetry.empty()) throw InputError("--symmetry WORD is required");
        const SymmetryResult s = symmetry_expand(rho.density_matrix(), obs, PauliString(o.symmetry), o.sector);
        res["raw"] = rho.expectation(obs);
        res["estimate"] = s.estimate;
        res["sector_weight"] = s.sector_weight;
        res["overhead"] = s.overhead;
    } else {
        throw InputError("unknown method '" + o.method + "'");
    }
    return res;
}

// ---------------------------------------------------------------- compile

Json run_compile(const CompileOpts& o) {
    Circuit c = load_circuit(o.circuit);
    Json res{{"passes", o.passes}, {"gates_before", c.size()}};
    for (const auto& pass : o.passes) {
        if (pass == "fuse") {
            c = fuse_gates(c, {o.absorb});
        } else if (pass == "route") {
            if (o.graph.empty()) throw InputError("the route pass needs --graph FILE");
            const CouplingGraph g = load_edge_list(o.graph);
            const RouteResult r = route(c, g, Layout::identity(g.n_nodes()), {o.lookahead});
            c = r.circuit;
            res["swaps"] = r.swaps;
            res["final_layout"] = to_json(r.final);
        } else if (pass == "cnot-synth") {
            c = matrix_to_cnot(cnot_to_matrix(c));
        } else {
            throw InputError("unknown pass '" + pass + "'");
        }
    }
    res["gates_after"] = c.size();
    const std::string text = render(c);
    res["circuit"] = text;
    if (!o.emit.empty()) {
        std::ofstream out(o.emit);
        if (!out) throw InputError("cannot write '" + o.emit + "'");
        out << text;
        res["emitted"] = o.emit;
    }
    return res;
}

// ---------------------------------------------------------------- gradcheck

Json run_gradcheck(const GradcheckOpts& o, std::uint64_t seed, bool& ok) {
    if (o.max_qubits < 2 || o.layers < 1 || o.circuits < 1) throw InputError("gradcheck needs >= 2 qubits, >= 1 layer");
    static const GateKind kAxes[3] = {GateKind::Rx, GateKind::Ry, GateKind::Rz};
    Json list = Json::array();
    double worst_ps = 0.0, worst_fd = 0.0;
    for (int i = 0; i < o.circuits; ++i) {
        Rng rng(derive_seed(seed, i));
        const int n = 2 + static_cast<int>(uniform_index(rng, o.max_qubits - 1));
        const int layers = 1 + static_cast<int>(uniform_index(rng, o.layers));
        std::vector<GateKind> axes;
        for (GateKind a : kAxes)
            if (uniform01(rng) < 0.6) axes.push_back(a);
        if (axes.empty()) axes.push_back(kAxes[uniform_index(rng, 3)]);
        LossSpec spec{hardware_efficient_ansatz(n, layers, axes, CouplingGraph::line(n)), Observable{}};
        for (int t = 0; t < 3; ++t) {
            std::string w(n, 'I');
            for (auto& ch : w) ch = "IXYZ"[uniform_index(rng, 4)];
            spec.hamiltonian.terms.emplace_back(w, 2.0 * uniform01(rng) - 1.0);
        }
        std::vector<double> theta(spec.circuit.n_params());
        for (auto& t : theta) t = kPi * (2.0 * uniform01(rng) - 1.0);
        const auto adj = grad_adjoint(spec, theta);
        const auto ps = grad_pshift(spec, theta);
        const auto fd = grad_fd2(spec, theta, o.delta);
        double e_ps = 0.0, e_fd = 0.0;
        for (std::size_t k = 0; k < adj.size(); ++k) {
            e_ps = std::max(e_ps, std::abs(adj[k] - ps[k]));
            e_fd = std::max(e_fd, std::abs(adj[k] - fd[k]));
        }
        worst_ps = std::max(worst_ps, e_ps);
        worst_fd = std::max(worst_fd, e_fd);
        list.push_back({{"n_qubits", n}, {"params", theta.size()}, {"max_adjoint_vs_pshift", e_ps},
                        {"max_adjoint_vs_fd2", e_fd}});
    }
    ok = worst_ps <= 1e-10 && worst_fd <= 1e-6;
    return Json{{"circuits", list},
                {"max_adjoint_vs_pshift", worst_ps},
                {"max_adjoint_vs_fd2", worst_fd},
                {"tolerance_pshift", 1e-10},
                {"tolerance_fd2", 1e-6},
                {"passed", ok}};
}

// ---------------------------------------------------------------- config file

// Keys of a JSON config become "--key value" tokens after the subcommand unless the
// same flag already appears on the command line (flags win).
std::vector<std::string> expand_config(std::vector<std::string> args, const std::set<std::string>& subcommands) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    Json cfg;
    try {
        cfg = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("config file: ") + e.what());
    }
    if (!cfg.is_object()) throw InputError("config file must hold a JSON object");
    auto present = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> extra;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (key == "config" || present(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) extra.push_back(flag);
            continue;
        }
        extra.push_back(flag);
        auto token = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (value.is_array())
            for (const auto& v : value) extra.push_back(token(v));
        else extra.push_back(token(value));
    }
    auto pos = std::find_if(args.begin() + 1, args.end(), [&](const std::string& a) { return subcommands.count(a) > 0; });
    if (pos == args.end()) throw InputError("config files need a subcommand on the command line");
    args.insert(pos + 1, extra.begin(), extra.end());
    return args;
}

void emit(const RunReport& report, const Globals& g) {
    const std::string text = g.format == "csv" ? results_to_csv(report.results) : report.to_json().dump(2) + "\n";
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(g.out);
    if (!out) throw InputError("cannot write '" + g.out + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    Globals g;
    SimulateOpts so;
    BenchmarkOpts bo;
    MitigateOpts mo;
    CompileOpts co;
    GradcheckOpts go;

    CLI::App app{"nisqkit: noisy intermediate-scale quantum simulation, benchmarking, mitigation and compilation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", g.seed, "Master seed for every random stream");
    app.add_option("--threads", g.threads, "Worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out, "Write the report to this path instead of stdout");
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--config", g.config, "JSON file of default option values (flags win)");

    auto* sim = app.add_subcommand("simulate", "Run a circuit on a simulator backend");
    sim->add_option("circuit,--circuit", so.circuit, "Circuit file")->required();
    sim->add_option("--backend", so.backend)->check(CLI::IsMember({"sv", "mps", "peps", "density"}));
    sim->add_option("--task", so.task)->check(CLI::IsMember({"amplitude", "sample", "expectation", "probabilities"}));
    sim->add_option("--bits", so.bits, "Bitstrings for the amplitude task");
    sim->add_option("--shots", so.shots)->check(CLI::PositiveNumber);
    sim->add_option("--observable", so.observable, "Observable file ('coeff WORD' per line)");
    sim->add_option("--pauli", so.pauli, "Inline observable text, e.g. '1 ZZ'");
    sim->add_option("--noise", so.noise, "Noise model JSON");
    sim->add_option("--max-bond", so.max_bond)->check(CLI::PositiveNumber);
    sim->add_option("--trunc-eps", so.trunc_eps)->check(CLI::NonNegativeNumber);
    sim->add_option("--grid", so.grid, "PEPS grid ROWSxCOLS");
    sim->add_option("--params", so.params, "Parameter values in slot order")->delimiter(',');

    auto* bench = app.add_subcommand("benchmark", "Run a benchmarking protocol");
    bench->add_option("--protocol", bo.protocol)->required()->check(CLI::IsMember({"rb", "xeb", "qv", "mirror", "rqc-xeb"}));
    bench->add_option("--noise", bo.noise, "Noise model JSON");
    bench->add_option("--qubits", bo.qubits)->check(CLI::PositiveNumber);
    bench->add_option("--lengths", bo.lengths)->delimiter(',');
    bench->add_option("--sequences", bo.sequences)->check(CLI::PositiveNumber);
    bench->add_option("--shots", bo.shots)->check(CLI::NonNegativeNumber);
    bench->add_option("--min-width", bo.min_width)->check(CLI::PositiveNumber);
    bench->add_option("--max-width", bo.max_width)->check(CLI::PositiveNumber);
    bench->add_option("--circuits", bo.circuits)->check(CLI::PositiveNumber);
    bench->add_option("--repetitions", bo.repetitions)->check(CLI::PositiveNumber);
    bench->add_option("--circuit", bo.circuit, "Mirror base circuit (Clifford)");
    bench->add_option("--depth", bo.depth, "Random mirror base depth")->check(CLI::PositiveNumber);
    bench->add_option("--grid", bo.grid, "RQC grid ROWSxCOLS");
    bench->add_option("--cycles", bo.cycles)->check(CLI::NonNegativeNumber);
    bench->add_option("--topology", bo.topology, "QV routing topology ('line')");

    auto* mit = app.add_subcommand("mitigate", "Apply an error-mitigation method");
    mit->add_option("--method", mo.method)
        ->required()
        ->check(CLI::IsMember({"zne-richardson", "zne-exponential", "zne-polyexp", "pec", "mem-invert", "mem-tpn", "vd",
                               "symmetry"}));
    mit->add_option("--data", mo.data, "ZNE points: 'lambda value' per line");
    mit->add_option("--degree", mo.degree)->check(CLI::PositiveNumber);
    mit->add_option("--response", mo.response, "Response matrix rows");
    mit->add_option("--probs", mo.probs, "Measured distribution")->delimiter(',');
    mit->add_option("--p01", mo.p01)->delimiter(',');
    mit->add_option("--p10", mo.p10)->delimiter(',');
    mit->add_option("--circuit", mo.circuit);
    mit->add_option("--noise", mo.noise);
    mit->add_option("--observable", mo.observable);
    mit->add_option("--pauli", mo.pauli);
    mit->add_option("--samples", mo.samples)->check(CLI::PositiveNumber);
    mit->add_option("--mode", mo.mode)->check(CLI::IsMember({"exact", "single-shot"}));
    mit->add_option("--copies", mo.copies)->check(CLI::PositiveNumber);
    mit->add_option("--symmetry", mo.symmetry);
    mit->add_option("--sector", mo.sector)->check(CLI::IsMember({-1, 1}));

    auto* comp = app.add_subcommand("compile", "Run compilation passes");
    comp->add_option("circuit,--circuit", co.circuit)->required();
    comp->add_option("--graph", co.graph, "Coupling graph edge list");
    comp->add_option("--passes", co.passes, "Pass pipeline, in order")
        ->delimiter(',')
        ->check(CLI::IsMember({"fuse", "route", "cnot-synth"}));
    comp->add_option("--emit", co.emit, "Write the compiled circuit here");
    comp->add_option("--lookahead", co.lookahead)->check(CLI::NonNegativeNumber);
    comp->add_flag("--absorb", co.absorb, "Fuse single-qubit runs into two-qubit gates");

    auto* grad = app.add_subcommand("gradcheck", "Cross-check adjoint, parameter-shift and finite-difference gradients");
    grad->add_option("--circuits", go.circuits)->check(CLI::PositiveNumber);
    grad->add_option("--max-qubits", go.max_qubits)->check(CLI::Range(2, 16));
    grad->add_option("--layers", go.layers)->check(CLI::PositiveNumber);
    grad->add_option("--delta", go.delta)->check(CLI::PositiveNumber);

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expand_config(args, {"simulate", "benchmark", "mitigate", "compile", "gradcheck"});
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.argv = std::vector<std::string>(args.begin() + 1, args.end());
    report.seed = g.seed;
    report.threads = g.threads;
    int rc = 0;
    try {
        if (g.threads > 0) set_num_threads(g.threads);
        if (*sim) {
            report.command = "simulate";
            report.backend = so.backend;
            report.results = run_simulate(so, g.seed);
        } else if (*bench) {
            report.command = "benchmark";
            report.backend = bo.protocol == "rqc-xeb" ? "sv" : "density";
            report.results = run_benchmark(bo, g.seed);
        } else if (*mit) {
            report.command = "mitigate";
            report.backend = mo.method.rfind("zne", 0) == 0 || mo.method.rfind("mem", 0) == 0 ? "none" : "density";
            report.results = run_mitigate(mo, g.seed);
        } else if (*comp) {
            report.command = "compile";
            report.backend = "none";
            report.results = run_compile(co);
        } else if (*grad) {
            report.command = "gradcheck";
            report.backend = "sv";
            bool ok = true;
            report.results = run_gradcheck(go, g.seed, ok);
            if (!ok) rc = 1;
        }
        report.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(report, g);
    } catch (const BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
