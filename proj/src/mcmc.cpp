#include "plandscape/mcmc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "plandscape/errors.hpp"
#include "plandscape/landscape.hpp"

namespace plandscape {

namespace {

constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();

Real log_add(Real a, Real b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const Real hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::size_t popcount_and(std::span<const std::uint64_t> a, const std::vector<std::uint64_t>& b) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.size(); ++i) c += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
    return c;
}

void sorted_erase(std::vector<Vertex>& v, Vertex x) { v.erase(std::lower_bound(v.begin(), v.end(), x)); }
void sorted_insert(std::vector<Vertex>& v, Vertex x) { v.insert(std::upper_bound(v.begin(), v.end(), x), x); }

bool accepts(Real beta, const ChainState::Proposal& p) {
    return p.delta >= 0 || static_cast<Real>(p.uniform) < std::exp(beta * static_cast<Real>(p.delta));
}

ChainTrace run(const PlantedGraph& g, const MCMCConfig& cfg, const VertexSubset& init, const WellPartition* part,
               const StopPredicate& stop) {
    cfg.validate();
    if (init.size() != cfg.kbar) throw ParameterError("chain: initial subset must have kbar vertices");
    if (cfg.kbar >= g.n()) throw ParameterError("chain: kbar = n leaves no neighbouring subsets");
    ChainState state(g, init);
    if (part && !part->in_low(static_cast<std::int64_t>(state.overlap())))
        throw ParameterError("reflected chain: initial subset lies outside A0 ∪ A1");
    ChainTrace trace;
    trace.t_max = cfg.t_max;
    const Real nr = static_cast<Real>(g.n()), kb = static_cast<Real>(cfg.kbar);
    trace.beta_in_slow_regime = cfg.beta >= std::pow(std::log(nr / kb), 1.5L);
    trace.steps.push_back({0, state.overlap(), state.edges()});

    Rng rng(cfg.seed);
    std::uint64_t t = 0;
    while (t < cfg.t_max) {
        const ChainState::Proposal p = state.propose(rng);
        ++t;
        const bool blocked = part && !part->in_low(static_cast<std::int64_t>(p.new_overlap));
        if (!blocked && accepts(cfg.beta, p)) {
            state.apply(p);
            ++trace.accepted;
        }
        const bool halt = stop && stop(t, state.overlap(), state.edges());
        if (t % cfg.stride == 0 || halt || t == cfg.t_max) trace.steps.push_back({t, state.overlap(), state.edges()});
        if (halt) {
            trace.hit_time = t;
            break;
        }
    }
    trace.steps_run = t;
    trace.final_state = state.subset();
    return trace;
}

std::vector<std::vector<std::uint64_t>> binomial_table(std::size_t n) {
    std::vector<std::vector<std::uint64_t>> c(n + 1, std::vector<std::uint64_t>(n + 2, 0));
    for (std::size_t i = 0; i <= n; ++i) {
        c[i][0] = 1;
        for (std::size_t j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
    }
    return c;
}

const std::vector<std::vector<std::uint64_t>>& binomials() {
    static const auto table = binomial_table(64);
    return table;
}

}  // namespace

WellPartition WellPartition::from(const ModelParams& p, double d1, double d2) {
    p.validate();
    if (!(d1 > 0 && d1 < d2)) throw ParameterError("well partition: need 0 < D1 < D2");
    const Real s = overlap_scale(p);
    WellPartition w;
    w.a0_max = static_cast<std::int64_t>(std::floor(static_cast<Real>(d1) * s));
    w.a1_min = static_cast<std::int64_t>(std::ceil(static_cast<Real>(d1) * s));
    w.a1_max = static_cast<std::int64_t>(std::ceil(static_cast<Real>(d2) * s));
    w.a2_min = static_cast<std::int64_t>(p.k / 2);
    return w;
}

void MCMCConfig::validate() const {
    if (!(beta >= 0) || !std::isfinite(beta)) throw ParameterError("mcmc: beta must be finite and nonnegative");
    if (kbar == 0) throw ParameterError("mcmc: kbar must be positive");
    if (!(d1 > 0 && d1 < d2)) throw ParameterError("mcmc: need 0 < D1 < D2");
    if (stride == 0) throw ParameterError("mcmc: stride must be positive");
}

ChainState::ChainState(const PlantedGraph& g, const VertexSubset& s)
    : g_(g), members_(s.members()), mask_(g.graph().words_per_row(), 0) {
    const std::size_t n = g.n();
    if (s.empty()) throw ParameterError("chain state: empty subset");
    for (Vertex v : members_) {
        if (v >= n) throw ParameterError("chain state: vertex out of range");
        mask_[v >> 6] |= std::uint64_t{1} << (v & 63);
    }
    others_.reserve(n - members_.size());
    for (std::size_t v = 0, i = 0; v < n; ++v) {
        if (i < members_.size() && members_[i] == v) ++i;
        else others_.push_back(static_cast<Vertex>(v));
    }
    overlap_ = plandscape::overlap(g, s);
    edges_ = plandscape::edge_count(g, s);
}

ChainState::Proposal ChainState::propose(Rng& rng) const {
    Proposal p;
    p.out = members_[rng.below(members_.size())];
    p.in = others_[rng.below(others_.size())];
    p.uniform = rng.uniform();
    const Graph& gr = g_.graph();
    const auto gain = static_cast<long>(popcount_and(gr.row(p.in), mask_));
    const auto loss = static_cast<long>(popcount_and(gr.row(p.out), mask_)) + (gr.has_edge(p.out, p.in) ? 1 : 0);
    p.delta = gain - loss;
    p.new_overlap = overlap_ - (g_.is_planted(p.out) ? 1 : 0) + (g_.is_planted(p.in) ? 1 : 0);
    return p;
}

void ChainState::apply(const Proposal& p) {
    sorted_erase(members_, p.out);
    sorted_insert(members_, p.in);
    sorted_erase(others_, p.in);
    sorted_insert(others_, p.out);
    mask_[p.out >> 6] &= ~(std::uint64_t{1} << (p.out & 63));
    mask_[p.in >> 6] |= std::uint64_t{1} << (p.in & 63);
    overlap_ = p.new_overlap;
    edges_ = static_cast<std::size_t>(static_cast<long>(edges_) + p.delta);
}

Real gibbs_log_weight(const PlantedGraph& g, const VertexSubset& s, Real beta) {
    return beta * static_cast<Real>(edge_count(g, s));
}

Real acceptance_probability(Real beta, long delta) {
    return delta >= 0 ? 1.0L : std::exp(beta * static_cast<Real>(delta));
}

Real transition_probability(const PlantedGraph& g, const VertexSubset& x, const VertexSubset& y, Real beta) {
    if (x.size() != y.size() || x.empty() || x.size() >= g.n())
        throw ParameterError("transition_probability: subsets must share a size in [1, n)");
    const Real proposals = static_cast<Real>(x.size()) * static_cast<Real>(g.n() - x.size());
    const std::size_t ex = edge_count(g, x);
    if (x == y) {
        Real stay = 0;
        const VertexMask mask = x.mask(g.n());
        for (Vertex u : x) {
            for (std::size_t v = 0; v < g.n(); ++v) {
                const auto vv = static_cast<Vertex>(v);
                if (mask.test(vv)) continue;
                const long delta = static_cast<long>(g.graph().degree_into(vv, mask)) -
                                   static_cast<long>(g.graph().degree_into(u, mask)) - (g.graph().has_edge(u, vv) ? 1 : 0);
                stay += 1 - acceptance_probability(beta, delta);
            }
        }
        return stay / proposals;
    }
    std::vector<Vertex> out, in;
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    std::set_difference(y.begin(), y.end(), x.begin(), x.end(), std::back_inserter(in));
    if (out.size() != 1) return 0;
    const long delta = static_cast<long>(edge_count(g, y)) - static_cast<long>(ex);
    return acceptance_probability(beta, delta) / proposals;
}

VertexSubset step(const PlantedGraph& g, const VertexSubset& s, Real beta, Rng& rng) {
    if (s.size() >= g.n()) throw ParameterError("step: kbar = n leaves no neighbouring subsets");
    ChainState state(g, s);
    const auto p = state.propose(rng);
    if (accepts(beta, p)) state.apply(p);
    return state.subset();
}

VertexSubset reflected_step(const PlantedGraph& g, const VertexSubset& s, Real beta, const WellPartition& part,
                            Rng& rng) {
    if (s.size() >= g.n()) throw ParameterError("reflected_step: kbar = n leaves no neighbouring subsets");
    ChainState state(g, s);
    if (!part.in_low(static_cast<std::int64_t>(state.overlap())))
        throw ParameterError("reflected_step: state lies outside A0 ∪ A1");
    const auto p = state.propose(rng);
    if (part.in_low(static_cast<std::int64_t>(p.new_overlap)) && accepts(beta, p)) state.apply(p);
    return state.subset();
}

ChainTrace run_chain(const PlantedGraph& g, const MCMCConfig& cfg, const VertexSubset& init,
                     const StopPredicate& stop) {
    return run(g, cfg, init, nullptr, stop);
}

ChainTrace run_reflected_chain(const PlantedGraph& g, const MCMCConfig& cfg, const WellPartition& part,
                               const VertexSubset& init) {
    return run(g, cfg, init, &part, {});
}

std::uint64_t GibbsDistribution::rank(const VertexSubset& s) const {
    if (s.size() != kbar_) throw ParameterError("rank: subset has the wrong size");
    const auto& table = binomials();
    std::uint64_t r = 0;
    std::size_t i = 0;
    for (Vertex v : s) {
        if (v >= n_) throw ParameterError("rank: vertex out of range");
        r += table[v][i + 1];
        ++i;
    }
    return r;
}

VertexSubset GibbsDistribution::unrank(std::uint64_t index) const {
    if (index >= size()) throw ParameterError("unrank: index out of range");
    const auto& table = binomials();
    std::vector<Vertex> members(kbar_);
    std::size_t c = n_;
    for (std::size_t i = kbar_; i-- > 0;) {
        do {
            --c;
        } while (table[c][i + 1] > index);
        members[i] = static_cast<Vertex>(c);
        index -= table[c][i + 1];
    }
    return VertexSubset(std::move(members));
}

Real GibbsDistribution::probability(std::uint64_t index) const { return std::exp(log_probability(index)); }

Real GibbsDistribution::band_log_mass(std::int64_t lo, std::int64_t hi) const {
    Real acc = kNegInf;
    const auto top = static_cast<std::int64_t>(overlap_log_mass_.size()) - 1;
    for (std::int64_t z = std::max<std::int64_t>(lo, 0); z <= std::min(hi, top); ++z)
        acc = log_add(acc, overlap_log_mass_[static_cast<std::size_t>(z)]);
    return acc;
}

GibbsDistribution exact_gibbs(const PlantedGraph& g, std::size_t kbar, Real beta, std::uint64_t budget) {
    const std::size_t n = g.n();
    if (n > 64) throw ParameterError("exact_gibbs: needs n <= 64");
    ModelParams{n, g.k(), kbar}.validate();
    if (!(beta >= 0) || !std::isfinite(beta)) throw ParameterError("exact_gibbs: beta must be finite and nonnegative");
    const std::uint64_t count = binomials()[n][kbar];
    if (count > budget)
        throw BudgetExceeded("exact_gibbs: " + std::to_string(count) + " subsets exceed the enumeration budget");

    GibbsDistribution d;
    d.n_ = n;
    d.kbar_ = kbar;
    d.beta_ = beta;
    d.edges_.resize(count);
    d.overlap_.resize(count);
    std::vector<std::uint64_t> adj(n);
    for (std::size_t v = 0; v < n; ++v) adj[v] = g.graph().row(static_cast<Vertex>(v))[0];
    const std::uint64_t planted = g.planted_mask().words()[0];
    const std::size_t k = g.k();
    const std::size_t max_edges = kbar * (kbar - 1) / 2;
    std::vector<std::vector<std::uint64_t>> tally(k + 1, std::vector<std::uint64_t>(max_edges + 1, 0));

    std::uint64_t x = kbar == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << kbar) - 1;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::size_t twice = 0;
        for (std::uint64_t rest = x; rest; rest &= rest - 1)
            twice += static_cast<std::size_t>(std::popcount(adj[static_cast<std::size_t>(std::countr_zero(rest))] & x));
        const auto z = static_cast<std::size_t>(std::popcount(x & planted));
        d.edges_[i] = static_cast<std::uint16_t>(twice / 2);
        d.overlap_[i] = static_cast<std::uint8_t>(z);
        ++tally[z][twice / 2];
        if (i + 1 < count) {
            const std::uint64_t c = x & (0 - x);
            const std::uint64_t r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
    }

    d.overlap_log_mass_.assign(k + 1, kNegInf);
    for (std::size_t z = 0; z <= k; ++z)
        for (std::size_t e = 0; e <= max_edges; ++e)
            if (tally[z][e] > 0)
                d.overlap_log_mass_[z] = log_add(d.overlap_log_mass_[z],
                                                 std::log(static_cast<Real>(tally[z][e])) + beta * static_cast<Real>(e));
    Real log_z = kNegInf;
    for (Real m : d.overlap_log_mass_) log_z = log_add(log_z, m);
    d.log_z_ = log_z;
    for (Real& m : d.overlap_log_mass_)
        if (m != kNegInf) m -= log_z;
    return d;
}

Real few_ratio(const GibbsDistribution& gibbs, const WellPartition& part) {
    const Real a1 = gibbs.band_log_mass(part.a1_min, part.a1_max);
    if (a1 == kNegInf) return std::numeric_limits<Real>::infinity();
    const Real a0 = gibbs.band_log_mass(0, part.a0_max);
    const Real a2 = gibbs.band_log_mass(part.a2_min, std::numeric_limits<std::int64_t>::max());
    return std::min(a0, a2) - a1;
}

Real few_ratio(const PlantedGraph& g, std::size_t kbar, Real beta, const WellPartition& part) {
    return few_ratio(exact_gibbs(g, kbar, beta), part);
}

Real few_ratio_lower_bound(const OverlapCurve& d, const WellPartition& part, Real beta) {
    std::optional<Real> m0, m1, m2;
    auto bump = [](std::optional<Real>& m, Real v) { m = m ? std::max(*m, v) : v; };
    for (const auto& pt : d.points) {
        if (part.in_a0(pt.z)) bump(m0, pt.value);
        if (part.in_a1(pt.z)) bump(m1, pt.value);
        if (part.in_a2(pt.z)) bump(m2, pt.value);
    }
    if (!m0 || !m1 || !m2) throw ParameterError("few_ratio_lower_bound: curve does not reach every band");
    Real log_a1 = kNegInf;
    for (std::int64_t z = part.a1_min; z <= part.a1_max; ++z)
        if (overlap_feasible(d.params, z)) log_a1 = log_add(log_a1, a_func(d.params, z));
    return beta * (std::min(*m0, *m2) - *m1) - log_a1;
}

ConditionalSampler::ConditionalSampler(const GibbsDistribution& gibbs, const WellPartition& part) : gibbs_(gibbs) {
    log_band_ = gibbs.band_log_mass(0, part.a1_max);
    if (log_band_ == kNegInf) throw ParameterError("conditional sampler: A0 ∪ A1 is empty");
    Real acc = 0;
    for (std::uint64_t i = 0; i < gibbs.size(); ++i) {
        if (!part.in_low(static_cast<std::int64_t>(gibbs.overlap(i)))) continue;
        acc += std::exp(gibbs.log_probability(i) - log_band_);
        support_.push_back(i);
        cumulative_.push_back(acc);
    }
}

std::uint64_t ConditionalSampler::draw_index(Rng& rng) const {
    const Real u = static_cast<Real>(rng.uniform()) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto pos = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), support_.size() - 1);
    return support_[pos];
}

VertexSubset ConditionalSampler::draw(Rng& rng) const { return gibbs_.unrank(draw_index(rng)); }

Real ConditionalSampler::probability(std::uint64_t index) const {
    if (!std::binary_search(support_.begin(), support_.end(), index)) return 0;
    return std::exp(gibbs_.log_probability(index) - log_band_);
}

ConditionalInit init_conditional(const PlantedGraph& g, std::size_t kbar, Real beta, const WellPartition& part,
                                 std::uint64_t seed, InitMode mode, std::uint64_t burn_in) {
    const ModelParams p{g.n(), g.k(), kbar};
    p.validate();
    const std::int64_t z_min = static_cast<std::int64_t>(kbar > p.n - p.k ? kbar - (p.n - p.k) : 0);
    if (z_min > part.a1_max) throw ParameterError("init_conditional: no subset has overlap <= a1_max");
    Rng rng(seed);
    const bool enumerable = g.n() <= 64 && binomial_count(p.n, kbar) <= kDefaultGibbsBudget;
    if (mode == InitMode::Exact || (mode == InitMode::Auto && enumerable)) {
        const GibbsDistribution gibbs = exact_gibbs(g, kbar, beta);
        const ConditionalSampler sampler(gibbs, part);
        return {sampler.draw(rng), true, std::nullopt};
    }
    std::vector<Vertex> planted(g.planted().members()), other;
    for (std::size_t v = 0; v < g.n(); ++v)
        if (!g.is_planted(static_cast<Vertex>(v))) other.push_back(static_cast<Vertex>(v));
    std::vector<Vertex> start;
    const auto zz = static_cast<std::size_t>(z_min);
    for (std::size_t i = 0; i < zz; ++i) {
        std::swap(planted[i], planted[i + rng.below(planted.size() - i)]);
        start.push_back(planted[i]);
    }
    for (std::size_t i = 0; i < kbar - zz; ++i) {
        std::swap(other[i], other[i + rng.below(other.size() - i)]);
        start.push_back(other[i]);
    }
    MCMCConfig cfg;
    cfg.beta = beta;
    cfg.kbar = kbar;
    cfg.t_max = burn_in > 0 ? burn_in : 100 * g.n() * kbar;
    cfg.seed = rng.next();
    cfg.stride = std::max<std::uint64_t>(cfg.t_max, 1);
    const ChainTrace t = run_reflected_chain(g, cfg, part, VertexSubset(std::move(start)));
    return {t.final_state, false, cfg.t_max};
}

ChainTrace hitting_time(const PlantedGraph& g, const MCMCConfig& cfg) {
    cfg.validate();
    const WellPartition part = WellPartition::from({g.n(), g.k(), cfg.kbar}, cfg.d1, cfg.d2);
    if (!part.valid())
        throw ParameterError("hitting_time: D1, D2 give overlapping bands (need a0_max < a1_max < a2_min)");
    const ConditionalInit init =
        init_conditional(g, cfg.kbar, cfg.beta, part, derive_seed(cfg.seed, 1), cfg.init, cfg.burn_in);
    MCMCConfig chain = cfg;
    chain.seed = derive_seed(cfg.seed, 2);
    const auto a1_max = static_cast<std::size_t>(part.a1_max);
    ChainTrace trace = run_chain(g, chain, init.subset, [a1_max](std::uint64_t, std::size_t z, std::size_t) {
        return z > a1_max;
    });
    trace.burn_in = init.burn_in;
    return trace;
}

std::string to_string(InitMode m) {
    switch (m) {
        case InitMode::Auto: return "auto";
        case InitMode::Exact: return "exact";
        case InitMode::BurnIn: return "burn-in";
    }
    return "?";
}

}  // namespace plandscape
