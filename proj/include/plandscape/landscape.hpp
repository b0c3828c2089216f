#pragma once

// Overlap-restricted and unrestricted densest subgraph values, exact at desk
// scale and heuristic beyond, plus the first moment quantities that predict
// them.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "plandscape/model.hpp"
#include "plandscape/numerics.hpp"

namespace plandscape {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

enum class DensestMethod { Exhaustive, LocalSearch };

struct DensestResult {
    std::size_t value = 0;
    VertexSubset witness;
    DensestMethod method = DensestMethod::Exhaustive;
    std::size_t restarts_used = 0;
};

/// C(n, k), saturated at UINT64_MAX.
std::uint64_t binomial_count(std::uint64_t n, std::uint64_t k);

/// Number of kbar-subsets with overlap z, C(k,z) C(n-k,kbar-z), saturated at UINT64_MAX.
std::uint64_t overlap_class_size(const ModelParams& p, std::int64_t z);

/// max |E[C]| over kbar-subsets C with |C ∩ planted| = z. Visits subsets in
/// lexicographic order, so the witness is the lexicographically smallest
/// maximizer. Throws BudgetExceeded when the class has more than `budget` members.
DensestResult exact_overlap_densest(const PlantedGraph& g, std::size_t kbar, std::int64_t z,
                                    std::uint64_t budget = kDefaultEnumerationBudget);

/// max |E[A]| over all K-subsets, by branch and bound. `node_budget` caps the
/// number of search nodes; exceeding it throws BudgetExceeded. The witness is
/// the lexicographically smallest maximizer.
DensestResult exact_densest_er(const Graph& g, std::size_t K, std::uint64_t node_budget = kDefaultEnumerationBudget);

/// Swap ascent from `restarts` seeded random starts (best-improvement, with up
/// to 2*kbar sideways moves per start). restarts = 0 evaluates the first
/// seeded start without moving.
DensestResult local_search_densest(const Graph& g, std::size_t kbar, std::size_t restarts, std::uint64_t seed);

/// As above but restricted to subsets with overlap z when given: swaps then
/// exchange planted for planted and non-planted for non-planted vertices.
DensestResult local_search_densest(const PlantedGraph& g, std::size_t kbar, std::optional<std::int64_t> z,
                                   std::size_t restarts, std::uint64_t seed);

struct ErPrediction {
    std::uint64_t n = 0;
    std::uint64_t K = 0;
    /// h^{-1}(ln 2 - ln C(n,K) / C(K,2)) C(K,2); saturates at C(K,2) when the
    /// entropy argument would be negative.
    Real first_order = 0;
    /// K^2/4 + K^{3/2} sqrt(ln(n/K)) / 2
    Real second_order = 0;
    /// ln K / ln n
    Real exponent_c = 0;
    /// max(3/2 - (5/2 - sqrt 6)(1 - C)/C, 0), the infimum of admissible error exponents.
    Real error_exponent = 0;
    bool saturated = false;
};

ErPrediction er_prediction(std::uint64_t n, std::uint64_t K);

/// ln P[Bin(N, 1/2) >= t]; -infinity when t > N.
Real binomial_tail_log(std::uint64_t N, std::uint64_t t);
/// ln P[Bin(N, 1/2) <= s].
Real binomial_lower_tail_log(std::uint64_t N, std::uint64_t s);

struct TailBracket {
    Real lower = 0;  ///< -N r(t/N) - ln N
    Real upper = 0;  ///< -N r(t/N)
};
/// Large-deviation bracket for ln P[Bin(N,1/2) >= t], valid for N/2 <= t <= N.
TailBracket binomial_tail_bracket(std::uint64_t N, std::uint64_t t);

/// ln E[#{kbar-subsets with overlap z and at least ceil(gamma M) edges}],
/// M = C(kbar,2) - C(z,2).
Real first_moment_expectation(const ModelParams& p, std::int64_t z, Real gamma);

std::string to_string(DensestMethod m);

}  // namespace plandscape
