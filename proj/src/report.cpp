#include "nisq/report.hpp"

#include <cmath>
#include <sstream>

namespace nisq {

Json RunReport::to_json() const {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = command;
    j["argv"] = argv;
    j["seed"] = seed;
    j["threads"] = threads;
    j["backend"] = backend;
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["results"] = results;
    return j;
}

Json to_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const DecayFit& f) {
    return Json{{"A", f.A},           {"p", f.p},
                {"B", f.B},           {"residual", f.residual},
                {"lengths", f.lengths}, {"means", f.means},
                {"converged", f.converged}, {"degenerate", f.degenerate}};
}

Json to_json(const RBResult& r) {
    Json j{{"fit", to_json(r.fit)}, {"error_rate", r.error_rate}, {"fit_ok", r.fit_ok}, {"survivals", r.survivals}};
    if (!r.fit_ok) j["fit_error"] = r.fit_error;
    return j;
}

Json to_json(const XEBResult& r) {
    Json j{{"lengths", r.lengths}, {"alphas", r.alphas}, {"fit", to_json(r.fit)},
           {"p", r.p},             {"r", r.r},           {"r_pauli", r.r_pauli}};
    if (!r.single_qubit_fits.empty()) {
        j["single_qubit_fits"] = Json::array();
        for (const auto& f : r.single_qubit_fits) j["single_qubit_fits"].push_back(to_json(f));
    }
    j["fit_ok"] = r.fit_ok;
    if (!r.fit_ok) j["fit_error"] = r.fit_error;
    return j;
}

Json to_json(const QVResult& r) {
    Json widths = Json::array();
    for (const auto& w : r.widths)
        widths.push_back({{"width", w.width},
                          {"heavy", w.heavy},
                          {"mean_heavy", w.mean_heavy},
                          {"passed", w.passed},
                          {"swaps", w.swaps}});
    return Json{{"widths", widths}, {"log2_volume", r.log2_volume}};
}

Json to_json(const MirrorResult& r) {
    return Json{{"polarization", r.polarization}, {"success", r.success}, {"polarizations", r.polarizations}};
}

Json to_json(const XEBFidelity& f) { return Json{{"fidelity", f.fidelity}, {"std_error", f.std_error}}; }

Json to_json(const RichardsonResult& r) {
    return Json{{"estimate", r.estimate}, {"gamma", r.gamma}, {"variance_amplification", r.variance_amplification}};
}

Json to_json(const MEMResult& r) {
    return Json{{"probabilities", r.probabilities},
                {"raw", r.raw},
                {"clipped", r.clipped},
                {"condition_number", r.condition_number}};
}

Json to_json(const PECResult& r) {
    return Json{{"estimate", r.estimate},
                {"std_error", r.std_error},
                {"one_norm", r.one_norm},
                {"overhead", r.one_norm * r.one_norm},
                {"samples", r.samples}};
}

Json to_json(const Layout& l) { return Json(l.l2p); }

namespace {

std::string csv_value(const Json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    return v.dump();
}

}  // namespace

std::string results_to_csv(const Json& results) {
    std::ostringstream os;
    const Json* fit = nullptr;
    if (results.contains("fit") && results["fit"].contains("lengths")) fit = &results["fit"];
    if (fit) {
        const double A = (*fit)["A"], p = (*fit)["p"], B = (*fit)["B"];
        os << "length,mean,fit\n";
        const auto& ls = (*fit)["lengths"];
        const auto& ms = (*fit)["means"];
        for (std::size_t i = 0; i < ls.size(); ++i) {
            const double m = ls[i];
            os << Json(m).dump() << ',' << ms[i].dump() << ',' << Json(A * std::pow(p, m) + B).dump() << '\n';
        }
        return os.str();
    }
    os << "path,value\n";
    for (const auto& [path, value] : results.flatten().items()) os << path << ',' << csv_value(value) << '\n';
    return os.str();
}

}  // namespace nisq
