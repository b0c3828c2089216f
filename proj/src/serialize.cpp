#include "plandscape/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace plandscape {

namespace {

using Json = nlohmann::ordered_json;

Json real_json(Real v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    return static_cast<double>(v);
}

Json subset_json(const VertexSubset& s) { return Json(s.members()); }

void schema_line(std::ostream& out) { out << "# schema: " << kSchema << '\n'; }

}  // namespace

std::string format_real(Real v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lg", v);
    return buf;
}

std::string join_vertices(const VertexSubset& s, char sep) {
    std::string text;
    for (Vertex v : s) {
        if (!text.empty()) text += sep;
        text += std::to_string(v);
    }
    return text;
}

void write_curve_csv(std::ostream& out, const OverlapCurve& curve) {
    schema_line(out);
    out << "z,value,kind,n,k,kbar\n";
    const std::string kind = to_string(curve.kind);
    for (const auto& pt : curve.points)
        out << pt.z << ',' << format_real(pt.value) << ',' << kind << ',' << curve.params.n << ',' << curve.params.k
            << ',' << curve.params.kbar << '\n';
}

void write_phase_csv(std::ostream& out, const std::vector<PhaseCell>& cells) {
    schema_line(out);
    out << "k,kbar,label\n";
    for (const auto& c : cells) out << c.k << ',' << c.kbar << ',' << to_string(c.label) << '\n';
}

void write_d_curve_csv(std::ostream& out, const DCurve& curve) {
    schema_line(out);
    out << "z,value,method,witness\n";
    const std::string method = to_string(curve.method);
    for (std::size_t i = 0; i < curve.results.size(); ++i)
        out << curve.curve.points[i].z << ',' << curve.results[i].value << ',' << method << ','
            << join_vertices(curve.results[i].witness) << '\n';
}

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
    schema_line(out);
    out << "t,overlap,edges\n";
    for (const auto& s : trace.steps) out << s.t << ',' << s.overlap << ',' << s.edges << '\n';
}

Json to_json(const ModelParams& p) { return {{"n", p.n}, {"k", p.k}, {"kbar", p.kbar}}; }

Json to_json(const ErPrediction& p) {
    return {{"schema", kSchema},
            {"n", p.n},
            {"K", p.K},
            {"first_order", real_json(p.first_order)},
            {"second_order", real_json(p.second_order)},
            {"saturated", p.saturated},
            {"exponent_c", real_json(p.exponent_c)},
            {"error_exponent", real_json(p.error_exponent)}};
}

Json to_json(const MonotonicityClass& m) {
    Json j{{"label", to_string(m.label)}};
    j["u1"] = m.u1 ? Json(*m.u1) : Json(nullptr);
    j["u2"] = m.u2 ? Json(*m.u2) : Json(nullptr);
    j["u1_scaled"] = m.u1_scaled ? real_json(*m.u1_scaled) : Json(nullptr);
    j["u2_scaled"] = m.u2_scaled ? real_json(*m.u2_scaled) : Json(nullptr);
    j["depth"] = real_json(m.depth);
    j["window"] = {m.window_lo, m.window_hi};
    return j;
}

Json to_json(const OGPCertificate& c) {
    Json j{{"schema", kSchema}, {"params", to_json(c.params)}, {"holds", c.holds},
           {"zeta1", c.zeta1},   {"zeta2", c.zeta2},            {"r_n", real_json(c.r_n)}};
    j["low_witness"] = c.low_witness ? subset_json(*c.low_witness) : Json(nullptr);
    j["high_witness"] = c.high_witness ? subset_json(*c.high_witness) : Json(nullptr);
    if (c.violation)
        j["violation"] = {{"z", c.violation->z}, {"subset", subset_json(c.violation->subset)}, {"edges", c.violation->edges}};
    else
        j["violation"] = nullptr;
    j["data_driven"] = c.data_driven;
    j["explanation"] = c.explanation;
    return j;
}

Json to_json(const FlatnessReport& r) {
    Json j{{"schema", kSchema},
           {"K", r.K},
           {"gamma", real_json(r.gamma)},
           {"delta", real_json(r.delta)},
           {"mode", r.mode.kind == FlatnessMode::Kind::Exhaustive ? "exhaustive" : "sampled"},
           {"samples", r.mode.samples},
           {"is_flat", r.is_flat},
           {"edge_count_ok", r.edge_count_ok},
           {"edges", r.edges},
           {"target_edges", r.target_edges},
           {"checked", r.checked},
           {"violation_count", r.violation_count},
           {"reason", r.reason}};
    Json list = Json::array();
    for (const auto& v : r.violations)
        list.push_back({{"ell", v.ell}, {"subset", subset_json(v.subset)}, {"edges", v.edges}, {"excess", real_json(v.excess)}});
    j["violations"] = std::move(list);
    return j;
}

Json to_json(const MCMCConfig& c) {
    return {{"beta", real_json(c.beta)}, {"kbar", c.kbar}, {"t_max", c.t_max},     {"seed", c.seed},
            {"d1", c.d1},                {"d2", c.d2},     {"stride", c.stride},   {"init", to_string(c.init)},
            {"burn_in", c.burn_in}};
}

Json experiment_json(const MCMCConfig& cfg, const ChainTrace& trace, double wall_ms) {
    Json j{{"schema", kSchema}, {"config", to_json(cfg)}};
    j["hit_time"] = trace.hit_time ? Json(*trace.hit_time) : Json(nullptr);
    j["censored"] = !trace.hit_time;
    j["steps_run"] = trace.steps_run;
    j["accepted"] = trace.accepted;
    j["burn_in"] = trace.burn_in ? Json(*trace.burn_in) : Json(nullptr);
    j["beta_in_slow_regime"] = trace.beta_in_slow_regime;
    j["final_state"] = subset_json(trace.final_state);
    if (wall_ms >= 0) j["wall_ms"] = wall_ms;
    return j;
}

}  // namespace plandscape
