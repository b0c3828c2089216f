#pragma once

// Per-instance overlap curves d(z) = max{|E[C]| : |C| = kbar, |C ∩ planted| = z}
// and certificates for the kbar-overlap gap property built from them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plandscape/landscape.hpp"
#include "plandscape/model.hpp"
#include "plandscape/numerics.hpp"

namespace plandscape {

enum class CurveMethod { Exhaustive, LocalSearch };

struct DCurveOptions {
    CurveMethod method = CurveMethod::Exhaustive;
    std::size_t restarts = 20;  ///< local search only
    std::uint64_t seed = 0;     ///< local search only
    unsigned threads = 1;
    std::uint64_t budget = kDefaultEnumerationBudget;
    /// Lower end of the overlap range; defaults to the smallest feasible overlap.
    std::optional<std::int64_t> z_lo;
};

struct DCurve {
    OverlapCurve curve;  ///< kind Empirical
    CurveMethod method = CurveMethod::Exhaustive;
    std::vector<DensestResult> results;  ///< one per z, aligned with curve.points

    bool exact() const noexcept { return method == CurveMethod::Exhaustive; }
    const DensestResult& at(std::int64_t z) const;
};

/// d(z) for every feasible z from the lower end up to min(k, kbar).
DCurve d_curve(const PlantedGraph& g, std::size_t kbar, const DCurveOptions& opts = {});

struct DipWitness {
    std::int64_t z_star = 0;
    std::int64_t lo = 0;  ///< curve's first overlap
    std::int64_t hi = 0;  ///< curve's last overlap
};

/// Deepest interior z with curve(z) < min(curve(lo), curve(hi)); ties go to
/// the smallest z. Absent for curves with fewer than 3 points or no such z.
std::optional<DipWitness> type_m_witness(const OverlapCurve& curve);

struct MidOverlapSubset {
    std::int64_t z = 0;
    VertexSubset subset;
    std::size_t edges = 0;
};

struct OGPCertificate {
    ModelParams params;
    bool holds = false;
    std::int64_t zeta1 = 0;
    std::int64_t zeta2 = 0;
    Real r_n = 0;
    std::optional<VertexSubset> low_witness;
    std::optional<VertexSubset> high_witness;
    /// A subset with overlap strictly between zeta1 and zeta2 and at least r_n edges.
    std::optional<MidOverlapSubset> violation;
    /// Thresholds were chosen from the data rather than supplied.
    bool data_driven = false;
    std::string explanation;
};

/// Checks both conditions on an exact curve: some subset with at least r_n
/// edges sits at overlap <= zeta1 and another at >= zeta2, while every subset
/// with overlap in (zeta1, zeta2) has fewer than r_n edges. Throws
/// NotCertifiable for local-search curves.
OGPCertificate certify_ogp(const PlantedGraph& g, std::size_t kbar, const DCurve& curve, std::int64_t zeta1,
                           std::int64_t zeta2, Real r_n);

/// Picks (zeta1, zeta2, r_n) around the curve's deepest dip: the contiguous
/// run of overlaps below the lower endpoint value, bracketed by its
/// neighbours, with r_n halfway between the run's maximum and that endpoint value.
OGPCertificate auto_certify(const PlantedGraph& g, std::size_t kbar, const DCurve& curve);
OGPCertificate auto_certify(const PlantedGraph& g, std::size_t kbar, const DCurveOptions& opts = {});

std::string to_string(CurveMethod m);
CurveMethod parse_curve_method(const std::string& s);

}  // namespace plandscape
