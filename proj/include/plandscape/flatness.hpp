#pragma once

// (gamma, delta)-flatness of K-vertex graphs: every l-subset, 2 <= l <= K-1,
// carries at most ceil(gamma C(l,2)) + D_K(l, delta) edges, and the whole graph
// carries exactly ceil(gamma C(K,2)).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "plandscape/model.hpp"
#include "plandscape/numerics.hpp"

namespace plandscape {

inline constexpr std::size_t kMaxExhaustiveFlatness = 22;

/// D_K(l, delta) with coefficient (2+delta) below 2K/3 and (1+delta) from 2K/3 on.
Real dk_bound(std::size_t K, std::size_t ell, Real delta, Real gamma);

/// ceil(gamma * pairs), tolerant to rounding noise in gamma * pairs.
std::size_t edge_target(std::uint64_t pairs, Real gamma);

/// h^{-1}(ln 2 - 2 ln(n/K) / K), the density scale at which conditioned K-vertex
/// graphs are expected to be flat.
Real flat_density(std::uint64_t n, std::size_t K);

struct FlatnessMode {
    enum class Kind { Exhaustive, Sampled };
    Kind kind = Kind::Exhaustive;
    std::size_t samples = 0;  ///< uniform l-subsets per l (Sampled)
    std::uint64_t seed = 0;

    static FlatnessMode exhaustive() { return {}; }
    static FlatnessMode sampled(std::size_t count, std::uint64_t seed) { return {Kind::Sampled, count, seed}; }
    /// "exhaustive" or "sampled:<count>".
    static FlatnessMode parse(const std::string& text, std::uint64_t seed);
};

struct FlatnessViolation {
    std::size_t ell = 0;
    VertexSubset subset;
    std::size_t edges = 0;
    /// edges - ceil(gamma C(l,2)) - D_K(l, delta), positive.
    Real excess = 0;
};

struct FlatnessReport {
    std::size_t K = 0;
    Real gamma = 0;
    Real delta = 0;
    FlatnessMode mode;
    bool is_flat = false;
    bool edge_count_ok = false;
    std::size_t edges = 0;
    std::size_t target_edges = 0;
    /// First violations in (l, lexicographic subset) order, at most the cap.
    std::vector<FlatnessViolation> violations;
    /// Total violations found, including those beyond the cap.
    std::uint64_t violation_count = 0;
    /// Subsets examined.
    std::uint64_t checked = 0;
    /// Empty when flat; otherwise why not.
    std::string reason;
};

FlatnessReport is_flat(const Graph& g, Real gamma, Real delta, const FlatnessMode& mode = {},
                       std::size_t violation_cap = 64);

/// Uniform K-vertex graph with exactly ceil(gamma C(K,2)) edges.
Graph sample_conditioned(std::size_t K, Real gamma, std::uint64_t seed);

}  // namespace plandscape
