#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sigroute/coupling.hpp"
#include "sigroute/harness.hpp"
#include "sigroute/pmf.hpp"

namespace sigroute {

inline constexpr const char* kTraceSchema = "sigroute.trace/1";
inline constexpr const char* kSummarySchema = "sigroute.summary/1";

// Dense array of probabilities indexed from 0. Doubles are written with
// round-trip precision, so pmf_from_json(pmf_to_json(p)) == p.
nlohmann::json pmf_to_json(const Pmf& p);
Pmf pmf_from_json(const nlohmann::json& j);

struct InitSpec {
  Pmf pi1;
  Pmf pi2;
  std::optional<Lengths> initial;
};

// "eq:<x0>" gives point masses at x0 with explicit lengths (x0, x0).
// Anything else is a JSON file holding {"pi1": [...], "pi2": [...]} (with
// optional "x0": [x1, x2]) or [[...], [...]]. Throws ConfigError.
InitSpec parse_init(const std::string& arg);
InitSpec parse_init_json(const nlohmann::json& j);

// "# schema: ..." line, header, one row per record.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

nlohmann::json summary_to_json(const ExperimentConfig& config, const RunSummary& summary);
nlohmann::json coupling_to_json(const CouplingConfig& config, const CouplingReport& report);

}  // namespace sigroute
