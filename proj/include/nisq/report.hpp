#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nisq/benchmarks.hpp"
#include "nisq/compile.hpp"
#include "nisq/mitigation.hpp"

namespace nisq {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

/// Machine-readable record of one CLI run. `results` is the reproducible payload;
/// the remaining fields describe the invocation.
struct RunReport {
    std::string command;
    std::vector<std::string> argv;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string backend;
    double wall_clock_seconds = 0.0;
    Json results = Json::object();

    Json to_json() const;
};

Json to_json(const DecayFit& fit);
Json to_json(const RBResult& r);
Json to_json(const XEBResult& r);
Json to_json(const QVResult& r);
Json to_json(const MirrorResult& r);
Json to_json(const XEBFidelity& f);
Json to_json(const RichardsonResult& r);
Json to_json(const MEMResult& r);
Json to_json(const PECResult& r);
Json to_json(const Layout& l);
Json to_json(cplx z);

/// Decay curves become "length,mean,fit" rows; any other payload is flattened to
/// "path,value" rows with JSON-pointer paths.
std::string results_to_csv(const Json& results);

}  // namespace nisq
