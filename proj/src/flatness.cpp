#include "plandscape/flatness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "plandscape/errors.hpp"
#include "plandscape/landscape.hpp"
#include "plandscape/rng.hpp"

namespace plandscape {

namespace {

struct ViolationOrder {
    bool operator()(const FlatnessViolation& a, const FlatnessViolation& b) const {
        if (a.ell != b.ell) return a.ell < b.ell;
        return a.subset < b.subset;
    }
};

class ViolationLog {
public:
    explicit ViolationLog(std::size_t cap) : cap_(cap) {}

    void add(FlatnessViolation v) {
        if (cap_ == 0) return;
        if (kept_.size() == cap_ && !ViolationOrder{}(v, *kept_.rbegin())) return;
        kept_.insert(std::move(v));
        if (kept_.size() > cap_) kept_.erase(std::prev(kept_.end()));
    }

    std::vector<FlatnessViolation> take() { return {kept_.begin(), kept_.end()}; }

private:
    std::size_t cap_;
    std::set<FlatnessViolation, ViolationOrder> kept_;
};

struct Limits {
    std::vector<std::size_t> base;  // ceil(gamma C(l,2))
    std::vector<Real> slack;        // D_K(l, delta)

    Limits(std::size_t K, Real gamma, Real delta) : base(K + 1), slack(K + 1) {
        for (std::size_t l = 0; l <= K; ++l) {
            base[l] = edge_target(l * (l - (l > 0 ? 1 : 0)) / 2, gamma);
            slack[l] = dk_bound(K, l, delta, gamma);
        }
    }

    Real excess(std::size_t l, std::size_t edges) const {
        return static_cast<Real>(edges) - static_cast<Real>(base[l]) - slack[l];
    }
};

VertexSubset subset_of_mask(std::uint32_t mask) {
    std::vector<Vertex> members;
    while (mask) {
        members.push_back(static_cast<Vertex>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return VertexSubset(std::move(members));
}

void check_exhaustive(const Graph& g, const Limits& lim, ViolationLog& log, FlatnessReport& rep) {
    const std::size_t K = g.order();
    std::vector<std::uint32_t> adj(K, 0);
    for (std::size_t v = 0; v < K; ++v) adj[v] = static_cast<std::uint32_t>(g.row(static_cast<Vertex>(v))[0]);
    const std::uint32_t total = std::uint32_t{1} << K;
    std::vector<std::uint8_t> edges(total, 0);
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        const std::uint32_t low = static_cast<std::uint32_t>(std::countr_zero(mask));
        const std::uint32_t rest = mask & (mask - 1);
        edges[mask] = static_cast<std::uint8_t>(edges[rest] + std::popcount(adj[low] & rest));
        const auto l = static_cast<std::size_t>(std::popcount(mask));
        if (l < 2 || l >= K) continue;
        ++rep.checked;
        const Real ex = lim.excess(l, edges[mask]);
        if (ex > 0) {
            ++rep.violation_count;
            log.add({l, subset_of_mask(mask), edges[mask], ex});
        }
    }
}

void check_sampled(const Graph& g, const Limits& lim, const FlatnessMode& mode, ViolationLog& log,
                   FlatnessReport& rep) {
    const std::size_t K = g.order();
    std::set<std::pair<std::size_t, VertexSubset>> seen;
    auto examine = [&](std::size_t l, const VertexSubset& s) {
        ++rep.checked;
        const std::size_t e = edge_count(g, s);
        const Real ex = lim.excess(l, e);
        if (ex > 0 && seen.emplace(l, s).second) {
            ++rep.violation_count;
            log.add({l, s, e, ex});
        }
    };
    std::vector<Vertex> pool(K);
    for (std::size_t l = 2; l < K; ++l) {
        Rng rng(derive_seed(mode.seed, l));
        for (std::size_t i = 0; i < mode.samples; ++i) {
            for (std::size_t v = 0; v < K; ++v) pool[v] = static_cast<Vertex>(v);
            for (std::size_t j = 0; j < l; ++j) std::swap(pool[j], pool[j + rng.below(K - j)]);
            examine(l, VertexSubset(std::vector<Vertex>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(l))));
        }
    }
    // Dense witnesses on a coarse grid of sizes.
    const std::size_t stride = std::max<std::size_t>(1, K / 16);
    for (std::size_t l = 2; l < K; l += stride) {
        const DensestResult dense = local_search_densest(g, l, 4, derive_seed(mode.seed ^ 0xF1A7ULL, l));
        examine(l, dense.witness);
    }
}

}  // namespace

Real dk_bound(std::size_t K, std::size_t ell, Real delta, Real gamma) {
    if (K == 0 || ell > K) throw DomainError("dk_bound: need 0 <= l <= K, K >= 1");
    if (!(gamma > 0 && gamma <= 1)) throw DomainError("dk_bound: gamma must lie in (0, 1]");
    if (!(delta > 0 && delta < 1)) throw DomainError("dk_bound: delta must lie in (0, 1)");
    const Real total = pairs(static_cast<Real>(K));
    const Real inner = pairs(static_cast<Real>(ell));
    const Real spread = std::min(total - inner, inner);
    if (spread <= 0) return 0;
    const Real coefficient = 3 * ell < 2 * K ? 2 + delta : 1 + delta;
    const Real log_term = log_binomial(K, ell) + 2 * std::log(static_cast<Real>(K));
    return std::sqrt(2 * gamma * coefficient * spread * log_term);
}

std::size_t edge_target(std::uint64_t pair_count, Real gamma) {
    const Real x = gamma * static_cast<Real>(pair_count);
    const auto t = static_cast<std::size_t>(std::ceil(x - 1e-9L));
    return std::min<std::size_t>(t, pair_count);
}

Real flat_density(std::uint64_t n, std::size_t K) {
    if (K < 2 || K >= n) throw ParameterError("flat_density: need 2 <= K < n");
    const Real eps = 2 * std::log(static_cast<Real>(n) / static_cast<Real>(K)) / static_cast<Real>(K);
    return entropy_inverse(std::log(2.0L) - std::min(eps, std::log(2.0L)));
}

FlatnessMode FlatnessMode::parse(const std::string& text, std::uint64_t seed) {
    if (text == "exhaustive") return exhaustive();
    const std::string prefix = "sampled:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string digits = text.substr(prefix.size());
        if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return sampled(std::stoull(digits), seed);
    }
    throw ParameterError("flatness mode must be 'exhaustive' or 'sampled:<count>', got '" + text + "'");
}

FlatnessReport is_flat(const Graph& g, Real gamma, Real delta, const FlatnessMode& mode, std::size_t violation_cap) {
    const std::size_t K = g.order();
    if (K < 2) throw ParameterError("is_flat: need at least 2 vertices");
    if (mode.kind == FlatnessMode::Kind::Exhaustive && K > kMaxExhaustiveFlatness)
        throw ParameterError("is_flat: exhaustive mode supports K <= 22");
    FlatnessReport rep;
    rep.K = K;
    rep.gamma = gamma;
    rep.delta = delta;
    rep.mode = mode;
    const Limits lim(K, gamma, delta);
    rep.edges = g.edge_count();
    rep.target_edges = edge_target(static_cast<std::uint64_t>(K) * (K - 1) / 2, gamma);
    rep.edge_count_ok = rep.edges == rep.target_edges;

    ViolationLog log(violation_cap);
    if (mode.kind == FlatnessMode::Kind::Exhaustive) check_exhaustive(g, lim, log, rep);
    else check_sampled(g, lim, mode, log, rep);
    rep.violations = log.take();

    rep.is_flat = rep.edge_count_ok && rep.violation_count == 0;
    if (!rep.edge_count_ok)
        rep.reason = "edge count " + std::to_string(rep.edges) + " differs from target " + std::to_string(rep.target_edges);
    else if (rep.violation_count > 0)
        rep.reason = std::to_string(rep.violation_count) + " subset(s) exceed ceil(gamma C(l,2)) + D_K(l, delta)";
    return rep;
}

Graph sample_conditioned(std::size_t K, Real gamma, std::uint64_t seed) {
    if (K == 0) throw ParameterError("sample_conditioned: K must be positive");
    if (!(gamma >= 0 && gamma <= 1)) throw ParameterError("sample_conditioned: gamma must lie in [0, 1]");
    const std::size_t total = K * (K - 1) / 2;
    const std::size_t m = edge_target(total, gamma);
    std::vector<std::uint32_t> slots(total);
    for (std::size_t i = 0; i < total; ++i) slots[i] = static_cast<std::uint32_t>(i);
    Rng rng(seed);
    for (std::size_t i = 0; i < m; ++i) std::swap(slots[i], slots[i + rng.below(total - i)]);
    // pair index -> (u, v) in row-major order over u < v
    std::vector<std::pair<Vertex, Vertex>> pairs_list;
    pairs_list.reserve(total);
    for (std::size_t u = 0; u < K; ++u)
        for (std::size_t v = u + 1; v < K; ++v) pairs_list.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    Graph g(K);
    for (std::size_t i = 0; i < m; ++i) g.set_edge(pairs_list[slots[i]].first, pairs_list[slots[i]].second);
    return g;
}

}  // namespace plandscape
