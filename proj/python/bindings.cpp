// Python surface over the C++ core. Structured results cross the boundary as
// JSON text (same encoding as the CLI reports); the package decodes them.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nisq/benchmarks.hpp"
#include "nisq/compile.hpp"
#include "nisq/mitigation.hpp"
#include "nisq/mps.hpp"
#include "nisq/noise.hpp"
#include "nisq/peps.hpp"
#include "nisq/report.hpp"
#include "nisq/statevector.hpp"
#include "nisq/vqa.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace nisq;

namespace {

py::array_t<cplx> to_numpy(std::span<const cplx> v) {
    py::array_t<cplx> out(v.size());
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

LossSpec make_loss(const Circuit& c, const std::string& observable) { return LossSpec{c, parse_observable(observable)}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "NISQ simulation, benchmarking, mitigation and compilation core";

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    static py::exception<InputError> input(m, "InputError", PyExc_ValueError);
    static py::exception<BudgetError> budget(m, "BudgetError", PyExc_MemoryError);
    static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InputError& e) {
            PyErr_SetString(input.ptr(), e.what());
        } catch (const BudgetError& e) {
            PyErr_SetString(budget.ptr(), e.what());
        } catch (const NumericalError& e) {
            PyErr_SetString(numerical.ptr(), e.what());
        } catch (const Error& e) {
            PyErr_SetString(base.ptr(), e.what());
        }
    });

    m.def("set_num_threads", &set_num_threads, "threads"_a);
    m.def("num_threads", &num_threads);

    py::class_<Circuit>(m, "Circuit")
        .def(py::init<int>(), "n_qubits"_a)
        .def_property_readonly("n_qubits", &Circuit::n_qubits)
        .def_property_readonly("n_params", &Circuit::n_params)
        .def_property_readonly("param_names", &Circuit::param_names)
        .def("__len__", &Circuit::size)
        .def("__eq__", &Circuit::operator==)
        .def("render", [](const Circuit& c) { return render(c); })
        .def("inverse", [](const Circuit& c) { return inverse(c); })
        .def("bind", [](const Circuit& c, const std::vector<double>& p) { return bind(c, p); }, "params"_a)
        .def("__repr__", [](const Circuit& c) {
            return "<Circuit n_qubits=" + std::to_string(c.n_qubits()) + " ops=" + std::to_string(c.size()) + ">";
        });
    m.def("parse_circuit", [](const std::string& text) { return parse_circuit(text); }, "text"_a);
    m.def("load_circuit", &load_circuit, "path"_a);

    // ---- simulation
    m.def(
        "statevector",
        [](const Circuit& c, const std::vector<double>& params) { return to_numpy(simulate(c, params).data()); },
        "circuit"_a, "params"_a = std::vector<double>{}, "Final state as a complex numpy array (qubit 0 is the MSB).");
    m.def(
        "amplitude",
        [](const Circuit& c, const std::string& bits, const std::string& backend, int max_bond, double eps) -> cplx {
            if (backend == "sv") return simulate(c).amplitude(bits);
            if (backend == "mps") {
                MPSState s = MPSState::product_zero(c.n_qubits(), max_bond, eps);
                s.apply_circuit(c);
                return s.amplitude(bits);
            }
            throw InputError("backend must be 'sv' or 'mps'");
        },
        "circuit"_a, "bits"_a, "backend"_a = "sv", "max_bond"_a = 64, "trunc_eps"_a = 0.0);
    m.def(
        "peps_amplitude",
        [](const Circuit& c, const std::string& bits, int rows, int cols) {
            PEPSState s = PEPSState::zero_grid(cols, rows);
            s.apply_circuit(c);
            return s.amplitude(bits);
        },
        "circuit"_a, "bits"_a, "rows"_a, "cols"_a);
    m.def(
        "expectation",
        [](const Circuit& c, const std::string& observable, const std::vector<double>& params) {
            return simulate(c, params).expectation(parse_observable(observable));
        },
        "circuit"_a, "observable"_a, "params"_a = std::vector<double>{});
    m.def(
        "sample",
        [](const Circuit& c, int shots, std::uint64_t seed) {
            Rng rng(derive_seed(seed, 0));
            return simulate(c).sample(shots, rng);
        },
        "circuit"_a, "shots"_a, "seed"_a = 1);

    // ---- noise
    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def_static("from_json", [](const std::string& text) { return parse_noise_model(text); }, "text"_a)
        .def_static("load", &load_noise_model, "path"_a)
        .def("to_json", [](const NoiseModel& n) { return noise_model_to_json(n); })
        .def_property_readonly("empty", &NoiseModel::empty);
    m.def(
        "density_probabilities",
        [](const Circuit& c, const NoiseModel& noise) {
            return apply_readout(run_density(c, noise).probabilities(), c.n_qubits(), noise.readout);
        },
        "circuit"_a, "noise"_a);
    m.def(
        "density_expectation",
        [](const Circuit& c, const NoiseModel& noise, const std::string& observable) {
            return run_density(c, noise).expectation(parse_observable(observable));
        },
        "circuit"_a, "noise"_a, "observable"_a);
    m.def(
        "pauli_mc",
        [](const Circuit& c, const NoiseModel& noise, int shots, std::uint64_t seed, const std::string& observable) {
            std::vector<Observable> obs;
            if (!observable.empty()) obs.push_back(parse_observable(observable));
            const MCResult r = run_pauli_mc(c, noise, shots, seed, obs);
            py::dict d("bitstrings"_a = r.bitstrings);
            if (!obs.empty()) {
                d["mean"] = r.means[0];
                d["std_error"] = r.std_errors[0];
            }
            return d;
        },
        "circuit"_a, "noise"_a, "shots"_a, "seed"_a = 1, "observable"_a = "");

    // ---- gradients
    m.def(
        "gradient",
        [](const Circuit& c, const std::string& observable, const std::vector<double>& theta, const std::string& method,
           double delta) {
            const LossSpec spec = make_loss(c, observable);
            if (method == "adjoint") return grad_adjoint(spec, theta);
            if (method == "pshift") return grad_pshift(spec, theta);
            if (method == "fd2") return grad_fd2(spec, theta, delta);
            throw InputError("method must be adjoint, pshift or fd2");
        },
        "circuit"_a, "observable"_a, "theta"_a, "method"_a = "adjoint", "delta"_a = 1e-4);

    // ---- mitigation
    m.def(
        "zne_richardson",
        [](const std::vector<double>& l, const std::vector<double>& v) { return to_json(zne_richardson(l, v)).dump(); },
        "lambdas"_a, "values"_a);
    m.def("zne_exponential", &zne_exponential, "value_mu"_a, "value_lambda_mu"_a, "lambda_"_a);
    m.def("zne_polyexp", &zne_polyexp, "lambdas"_a, "values"_a, "degree"_a);
    m.def(
        "mem_invert",
        [](const RealMatrix& response, const std::vector<double>& p) { return to_json(mem_invert(response, p)).dump(); },
        "response"_a, "probs"_a);
    m.def(
        "pec_estimate",
        [](const Circuit& c, const NoiseModel& noise, const std::string& observable, int samples, std::uint64_t seed) {
            return to_json(pec_estimate(c, noise, parse_observable(observable), samples, seed)).dump();
        },
        "circuit"_a, "noise"_a, "observable"_a, "samples"_a, "seed"_a = 1);

    // ---- benchmarks
    m.def(
        "rb",
        [](int n, const std::vector<int>& lengths, int sequences, int shots, std::uint64_t seed, const NoiseModel& noise) {
            RBConfig cfg;
            cfg.n = n;
            if (!lengths.empty()) cfg.lengths = lengths;
            cfg.sequences = sequences;
            cfg.shots = shots;
            cfg.seed = seed;
            return to_json(rb_run(cfg, noise)).dump();
        },
        "n"_a = 1, "lengths"_a = std::vector<int>{}, "sequences"_a = 30, "shots"_a = 1000, "seed"_a = 1,
        "noise"_a = NoiseModel{});
    m.def(
        "quantum_volume",
        [](int min_width, int max_width, int circuits, int shots, std::uint64_t seed, const NoiseModel& noise) {
            QVConfig cfg;
            cfg.min_width = min_width;
            cfg.max_width = max_width;
            cfg.circuits = circuits;
            cfg.shots = shots;
            cfg.seed = seed;
            return to_json(qv_run(cfg, noise)).dump();
        },
        "min_width"_a = 2, "max_width"_a = 5, "circuits"_a = 100, "shots"_a = 0, "seed"_a = 1, "noise"_a = NoiseModel{});
    m.def(
        "linear_xeb",
        [](const Circuit& c, const std::vector<std::string>& samples) {
            return to_json(linear_xeb_fidelity(c, samples)).dump();
        },
        "circuit"_a, "samples"_a);
    m.def(
        "random_circuit",
        [](int rows, int cols, int cycles, std::uint64_t seed) {
            Rng rng(derive_seed(seed, 2));
            return rqc_generate(rows, cols, cycles, rng);
        },
        "rows"_a, "cols"_a, "cycles"_a, "seed"_a = 1);

    // ---- compilation
    m.def(
        "route",
        [](const Circuit& c, const std::vector<std::pair<int, int>>& edges, int n_nodes, double lookahead) {
            const CouplingGraph g(n_nodes, edges);
            const RouteResult r = route(c, g, Layout::identity(n_nodes), {lookahead});
            return py::make_tuple(r.circuit, r.swaps, r.final.l2p);
        },
        "circuit"_a, "edges"_a, "n_nodes"_a, "lookahead"_a = 0.0, "Returns (routed circuit, swap count, final layout).");
    m.def("fuse", [](const Circuit& c, bool absorb) { return fuse_gates(c, {absorb}); }, "circuit"_a, "absorb"_a = false);
    m.def("cnot_synth", [](const Circuit& c) { return matrix_to_cnot(cnot_to_matrix(c)); }, "circuit"_a);
}
