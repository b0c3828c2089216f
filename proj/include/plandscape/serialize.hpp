#pragma once

// Text output formats. CSV files open with a "# schema: v1" comment line;
// JSON documents carry "schema": "v1". Reals use 17 significant digits.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "plandscape/flatness.hpp"
#include "plandscape/landscape.hpp"
#include "plandscape/mcmc.hpp"
#include "plandscape/numerics.hpp"
#include "plandscape/ogp.hpp"

namespace plandscape {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kSchema = "v1";

std::string format_real(Real v);
std::string join_vertices(const VertexSubset& s, char sep = '-');

/// z,value,kind,n,k,kbar
void write_curve_csv(std::ostream& out, const OverlapCurve& curve);
/// k,kbar,label
void write_phase_csv(std::ostream& out, const std::vector<PhaseCell>& cells);
/// z,value,method,witness
void write_d_curve_csv(std::ostream& out, const DCurve& curve);
/// t,overlap,edges
void write_trace_csv(std::ostream& out, const ChainTrace& trace);

nlohmann::ordered_json to_json(const ModelParams& p);
nlohmann::ordered_json to_json(const ErPrediction& p);
nlohmann::ordered_json to_json(const MonotonicityClass& m);
nlohmann::ordered_json to_json(const OGPCertificate& c);
nlohmann::ordered_json to_json(const FlatnessReport& r);
nlohmann::ordered_json to_json(const MCMCConfig& c);
/// {config, hit_time|null, censored, ...}; wall_ms is included when non-negative.
nlohmann::ordered_json experiment_json(const MCMCConfig& cfg, const ChainTrace& trace, double wall_ms);

}  // namespace plandscape
