#include "plandscape/ogp.hpp"

#include <algorithm>

#include "plandscape/errors.hpp"
#include "plandscape/parallel.hpp"
#include "plandscape/rng.hpp"

namespace plandscape {

const DensestResult& DCurve::at(std::int64_t z) const {
    if (z < curve.z_lo || z > curve.z_hi) throw ParameterError("d-curve has no entry at z=" + std::to_string(z));
    return results[static_cast<std::size_t>(z - curve.z_lo)];
}

DCurve d_curve(const PlantedGraph& g, std::size_t kbar, const DCurveOptions& opts) {
    const ModelParams p{g.n(), g.k(), kbar};
    p.validate();
    const auto min_feasible = static_cast<std::int64_t>(kbar > p.n - p.k ? kbar - (p.n - p.k) : 0);
    DCurve out;
    out.method = opts.method;
    out.curve.params = p;
    out.curve.kind = CurveKind::Empirical;
    out.curve.z_lo = std::max(min_feasible, opts.z_lo.value_or(min_feasible));
    out.curve.z_hi = static_cast<std::int64_t>(std::min(p.k, kbar));
    if (out.curve.z_lo > out.curve.z_hi) throw ParameterError("d_curve: empty overlap range");
    const auto count = static_cast<std::size_t>(out.curve.z_hi - out.curve.z_lo + 1);
    out.results.resize(count);
    parallel_for(count, resolve_threads(opts.threads), [&](std::size_t i) {
        const std::int64_t z = out.curve.z_lo + static_cast<std::int64_t>(i);
        out.results[i] = opts.method == CurveMethod::Exhaustive
                             ? exact_overlap_densest(g, kbar, z, opts.budget)
                             : local_search_densest(g, kbar, z, opts.restarts, derive_seed(opts.seed, static_cast<std::uint64_t>(z)));
    });
    out.curve.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.curve.points.push_back({out.curve.z_lo + static_cast<std::int64_t>(i), static_cast<Real>(out.results[i].value)});
    return out;
}

std::optional<DipWitness> type_m_witness(const OverlapCurve& curve) {
    if (curve.points.size() < 3) return std::nullopt;
    const Real rim = std::min(curve.points.front().value, curve.points.back().value);
    std::optional<std::size_t> best;
    for (std::size_t i = 1; i + 1 < curve.points.size(); ++i) {
        const Real v = curve.points[i].value;
        if (v < rim && (!best || v < curve.points[*best].value)) best = i;
    }
    if (!best) return std::nullopt;
    return DipWitness{curve.points[*best].z, curve.points.front().z, curve.points.back().z};
}

OGPCertificate certify_ogp(const PlantedGraph& g, std::size_t kbar, const DCurve& curve, std::int64_t zeta1,
                           std::int64_t zeta2, Real r_n) {
    if (!curve.exact())
        throw NotCertifiable("certification needs an exhaustive d-curve; local search only gives lower bounds");
    const ModelParams p{g.n(), g.k(), kbar};
    if (!(curve.curve.params == p)) throw ParameterError("certify_ogp: curve was computed for different parameters");
    const std::int64_t lo = curve.curve.z_lo, hi = curve.curve.z_hi;
    if (!(zeta1 < zeta2 && zeta1 >= lo && zeta2 <= hi))
        throw ParameterError("certify_ogp: need z_lo <= zeta1 < zeta2 <= z_hi");

    OGPCertificate cert;
    cert.params = p;
    cert.zeta1 = zeta1;
    cert.zeta2 = zeta2;
    cert.r_n = r_n;
    if (!(r_n > 0)) {
        cert.explanation = "r_n must be positive: every subset has at least 0 edges";
        return cert;
    }
    auto best_in = [&](std::int64_t from, std::int64_t to) -> const DensestResult* {
        const DensestResult* best = nullptr;
        for (std::int64_t z = from; z <= to; ++z)
            if (!best || curve.at(z).value > best->value) best = &curve.at(z);
        return best;
    };
    const DensestResult* low = best_in(lo, zeta1);
    const DensestResult* high = best_in(zeta2, hi);
    for (std::int64_t z = zeta1 + 1; z < zeta2; ++z) {
        const DensestResult& r = curve.at(z);
        if (static_cast<Real>(r.value) >= r_n) {
            cert.violation = MidOverlapSubset{z, r.witness, r.value};
            break;
        }
    }
    const bool low_ok = static_cast<Real>(low->value) >= r_n;
    const bool high_ok = static_cast<Real>(high->value) >= r_n;
    if (low_ok) cert.low_witness = low->witness;
    if (high_ok) cert.high_witness = high->witness;
    cert.holds = low_ok && high_ok && !cert.violation;
    if (cert.holds) cert.explanation = "both overlap extremes reach r_n and no intermediate overlap does";
    else if (cert.violation) cert.explanation = "a subset with intermediate overlap reaches r_n";
    else cert.explanation = std::string("no subset with overlap ") + (low_ok ? ">= zeta2" : "<= zeta1") + " reaches r_n";
    return cert;
}

OGPCertificate auto_certify(const PlantedGraph& g, std::size_t kbar, const DCurve& curve) {
    if (!curve.exact()) throw NotCertifiable("certification needs an exhaustive d-curve; local search only gives lower bounds");
    const auto dip = type_m_witness(curve.curve);
    if (!dip) {
        OGPCertificate cert;
        cert.params = curve.curve.params;
        cert.data_driven = true;
        cert.explanation = "no interior overlap falls below both endpoint values; the curve has no gap to certify";
        return cert;
    }
    const OverlapCurve& c = curve.curve;
    const Real rim = std::min(c.points.front().value, c.points.back().value);
    std::int64_t left = dip->z_star, right = dip->z_star;
    while (left - 1 > c.z_lo && c.at(left - 1) < rim) --left;
    while (right + 1 < c.z_hi && c.at(right + 1) < rim) ++right;
    Real dip_max = c.at(left);
    for (std::int64_t z = left; z <= right; ++z) dip_max = std::max(dip_max, c.at(z));
    OGPCertificate cert = certify_ogp(g, kbar, curve, left - 1, right + 1, (dip_max + rim) / 2);
    cert.data_driven = true;
    return cert;
}

OGPCertificate auto_certify(const PlantedGraph& g, std::size_t kbar, const DCurveOptions& opts) {
    return auto_certify(g, kbar, d_curve(g, kbar, opts));
}

std::string to_string(CurveMethod m) { return m == CurveMethod::Exhaustive ? "exhaustive" : "local"; }

CurveMethod parse_curve_method(const std::string& s) {
    if (s == "exhaustive") return CurveMethod::Exhaustive;
    if (s == "local") return CurveMethod::LocalSearch;
    throw ParameterError("method must be 'exhaustive' or 'local', got '" + s + "'");
}

}  // namespace plandscape
