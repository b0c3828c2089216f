#pragma once

// Metropolis dynamics on kbar-subsets targeting the Gibbs law
// pi_beta(S) ∝ exp(beta |E[S]|): propose swapping a uniform member out for a
// uniform non-member, accept with min(1, exp(beta * change in edges)).
//
// Every step consumes exactly three generator outputs (member index,
// non-member index, acceptance uniform), whether or not the proposal is
// rejected or reflected, so chains sharing a seed stay in lockstep.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "plandscape/model.hpp"
#include "plandscape/numerics.hpp"
#include "plandscape/rng.hpp"

namespace plandscape {

inline constexpr std::uint64_t kDefaultGibbsBudget = 10'000'000;

/// Overlap bands: A0 = [0, a0_max], A1 = [a1_min, a1_max], A2 = [a2_min, k].
struct WellPartition {
    std::int64_t a0_max = 0;
    std::int64_t a1_min = 0;
    std::int64_t a1_max = 0;
    std::int64_t a2_min = 0;

    /// Thresholds at D1, D2 multiples of sqrt(kbar / ln(n/kbar)).
    static WellPartition from(const ModelParams& p, double d1, double d2);

    bool valid() const noexcept { return a0_max < a1_max && a1_max < a2_min; }
    bool in_a0(std::int64_t z) const noexcept { return z <= a0_max; }
    bool in_a1(std::int64_t z) const noexcept { return z >= a1_min && z <= a1_max; }
    bool in_a2(std::int64_t z) const noexcept { return z >= a2_min; }
    /// A0 ∪ A1, the region the reflected chain lives in.
    bool in_low(std::int64_t z) const noexcept { return z <= a1_max; }
};

enum class InitMode { Auto, Exact, BurnIn };

struct MCMCConfig {
    Real beta = 1;
    std::size_t kbar = 0;
    std::uint64_t t_max = 1000;
    std::uint64_t seed = 0;
    double d1 = 0.25;
    double d2 = 1.0;
    /// Record every stride-th state (the initial and final states are always recorded).
    std::uint64_t stride = 1;
    InitMode init = InitMode::Auto;
    /// Burn-in length for InitMode::BurnIn; 0 picks 100 * n * kbar.
    std::uint64_t burn_in = 0;

    void validate() const;
};

struct TraceSample {
    std::uint64_t t = 0;
    std::size_t overlap = 0;
    std::size_t edges = 0;
};

struct ChainTrace {
    std::vector<TraceSample> steps;
    std::optional<std::uint64_t> hit_time;
    std::uint64_t t_max = 0;
    std::uint64_t steps_run = 0;
    std::uint64_t accepted = 0;
    VertexSubset final_state;
    /// Burn-in used to draw the initial state, when it was not drawn exactly.
    std::optional<std::uint64_t> burn_in;
    /// beta >= (ln(n/kbar))^{3/2}, the temperature scale of the slow-mixing regime.
    bool beta_in_slow_regime = false;
};

/// Mutable chain position with incremental overlap and edge bookkeeping.
class ChainState {
public:
    ChainState(const PlantedGraph& g, const VertexSubset& s);

    std::size_t overlap() const noexcept { return overlap_; }
    std::size_t edges() const noexcept { return edges_; }
    VertexSubset subset() const { return VertexSubset(members_); }

    struct Proposal {
        Vertex out = 0;
        Vertex in = 0;
        long delta = 0;               ///< change in edge count
        std::size_t new_overlap = 0;
        double uniform = 0;           ///< acceptance draw
    };
    Proposal propose(Rng& rng) const;
    void apply(const Proposal& p);

private:
    const PlantedGraph& g_;
    std::vector<Vertex> members_;  // sorted
    std::vector<Vertex> others_;   // sorted
    std::vector<std::uint64_t> mask_;
    std::size_t overlap_ = 0;
    std::size_t edges_ = 0;
};

/// beta |E[S]|, the unnormalized log Gibbs weight.
Real gibbs_log_weight(const PlantedGraph& g, const VertexSubset& s, Real beta);

/// min(1, exp(beta * delta)).
Real acceptance_probability(Real beta, long delta);

/// One-step transition probability of the Metropolis chain from x to y
/// (including the self-loop mass when x == y).
Real transition_probability(const PlantedGraph& g, const VertexSubset& x, const VertexSubset& y, Real beta);

VertexSubset step(const PlantedGraph& g, const VertexSubset& s, Real beta, Rng& rng);
/// As step, but proposals leaving A0 ∪ A1 are rejected.
VertexSubset reflected_step(const PlantedGraph& g, const VertexSubset& s, Real beta, const WellPartition& part,
                            Rng& rng);

/// Called after every step with (t, overlap, edges); returning true stops the
/// chain and records t as the hit time.
using StopPredicate = std::function<bool(std::uint64_t, std::size_t, std::size_t)>;

ChainTrace run_chain(const PlantedGraph& g, const MCMCConfig& cfg, const VertexSubset& init,
                     const StopPredicate& stop = {});
ChainTrace run_reflected_chain(const PlantedGraph& g, const MCMCConfig& cfg, const WellPartition& part,
                               const VertexSubset& init);

/// Exact Gibbs law over all C(n, kbar) subsets, indexed in colexicographic
/// order (the order of increasing bitmasks). Requires n <= 64.
class GibbsDistribution {
public:
    std::size_t n() const noexcept { return n_; }
    std::size_t kbar() const noexcept { return kbar_; }
    Real beta() const noexcept { return beta_; }
    Real log_partition() const noexcept { return log_z_; }
    std::uint64_t size() const noexcept { return edges_.size(); }

    std::uint64_t rank(const VertexSubset& s) const;
    VertexSubset unrank(std::uint64_t index) const;
    std::size_t edges(std::uint64_t index) const { return edges_[index]; }
    std::size_t overlap(std::uint64_t index) const { return overlap_[index]; }
    Real log_probability(std::uint64_t index) const { return beta_ * edges_[index] - log_z_; }
    Real probability(std::uint64_t index) const;

    /// ln pi(overlap = z) for z = 0..k (-inf where empty).
    const std::vector<Real>& overlap_log_mass() const noexcept { return overlap_log_mass_; }
    /// ln pi(lo <= overlap <= hi).
    Real band_log_mass(std::int64_t lo, std::int64_t hi) const;

private:
    friend GibbsDistribution exact_gibbs(const PlantedGraph&, std::size_t, Real, std::uint64_t);
    std::size_t n_ = 0;
    std::size_t kbar_ = 0;
    Real beta_ = 0;
    Real log_z_ = 0;
    std::vector<std::uint16_t> edges_;
    std::vector<std::uint8_t> overlap_;
    std::vector<Real> overlap_log_mass_;
};

GibbsDistribution exact_gibbs(const PlantedGraph& g, std::size_t kbar, Real beta,
                              std::uint64_t budget = kDefaultGibbsBudget);

/// ln min{pi(A0), pi(A2)} - ln pi(A1); +inf when A1 carries no subsets.
Real few_ratio(const GibbsDistribution& gibbs, const WellPartition& part);
Real few_ratio(const PlantedGraph& g, std::size_t kbar, Real beta, const WellPartition& part);

/// Lower bound on few_ratio from a d-curve: beta (min{max_A0 d, max_A2 d} - max_A1 d) - ln|A1|.
/// The curve must cover the bands; entries from local search weaken the bound's guarantee.
Real few_ratio_lower_bound(const OverlapCurve& d, const WellPartition& part, Real beta);

/// Draws from pi_beta( . | A0 ∪ A1) by inverse transform over the exact law.
class ConditionalSampler {
public:
    ConditionalSampler(const GibbsDistribution& gibbs, const WellPartition& part);
    VertexSubset draw(Rng& rng) const;
    std::uint64_t draw_index(Rng& rng) const;
    /// Conditional probability of a subset index (0 outside the band).
    Real probability(std::uint64_t index) const;

private:
    const GibbsDistribution& gibbs_;
    std::vector<std::uint64_t> support_;
    std::vector<Real> cumulative_;
    Real log_band_ = 0;
};

struct ConditionalInit {
    VertexSubset subset;
    bool exact = false;
    std::optional<std::uint64_t> burn_in;
};

/// Initial state in A0 ∪ A1 following pi_beta conditioned on that region:
/// exact when the law is enumerable (or mode is Exact), otherwise a reflected
/// burn-in run from a uniform lowest-overlap subset.
ConditionalInit init_conditional(const PlantedGraph& g, std::size_t kbar, Real beta, const WellPartition& part,
                                 std::uint64_t seed, InitMode mode = InitMode::Auto, std::uint64_t burn_in = 0);

/// Runs the unrestricted chain from init_conditional until the overlap exceeds
/// a1_max or t_max steps pass.
ChainTrace hitting_time(const PlantedGraph& g, const MCMCConfig& cfg);

std::string to_string(InitMode m);

}  // namespace plandscape
