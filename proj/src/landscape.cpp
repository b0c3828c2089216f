#include "plandscape/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "plandscape/errors.hpp"
#include "plandscape/rng.hpp"

namespace plandscape {

namespace {

std::uint64_t binomial_saturating_impl(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        c = c * (n - i) / (i + 1);
        if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(c);
}

std::uint64_t mul_saturating(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 c = static_cast<unsigned __int128>(a) * b;
    return c > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                          : static_cast<std::uint64_t>(c);
}

std::size_t popcount_and(std::span<const std::uint64_t> a, const std::vector<std::uint64_t>& b) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.size(); ++i) c += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
    return c;
}

void set_bit(std::vector<std::uint64_t>& w, Vertex v) { w[v >> 6] |= std::uint64_t{1} << (v & 63); }
void clear_bit(std::vector<std::uint64_t>& w, Vertex v) { w[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }

class OverlapEnumerator {
public:
    OverlapEnumerator(const PlantedGraph& g) : g_(g), chosen_(g.graph().words_per_row(), 0) {
        const std::size_t n = g.n();
        planted_after_.assign(n + 1, 0);
        for (std::size_t v = n; v-- > 0;) planted_after_[v] = planted_after_[v + 1] + (g.is_planted(static_cast<Vertex>(v)) ? 1 : 0);
    }

    void run(std::size_t need_planted, std::size_t need_other) { dfs(0, need_planted, need_other, 0); }

    bool found() const { return found_; }
    std::size_t best() const { return best_; }
    const std::vector<Vertex>& witness() const { return witness_; }

private:
    void dfs(std::size_t v, std::size_t need_p, std::size_t need_q, std::size_t edges) {
        if (need_p == 0 && need_q == 0) {
            if (!found_ || edges > best_) {
                found_ = true;
                best_ = edges;
                witness_ = stack_;
            }
            return;
        }
        const std::size_t n = g_.n();
        if (v == n) return;
        if (planted_after_[v] < need_p || (n - v - planted_after_[v]) < need_q) return;
        const auto vv = static_cast<Vertex>(v);
        const bool planted = g_.is_planted(vv);
        if (planted ? need_p > 0 : need_q > 0) {
            const std::size_t gain = popcount_and(g_.graph().row(vv), chosen_);
            set_bit(chosen_, vv);
            stack_.push_back(vv);
            dfs(v + 1, need_p - (planted ? 1 : 0), need_q - (planted ? 0 : 1), edges + gain);
            stack_.pop_back();
            clear_bit(chosen_, vv);
        }
        dfs(v + 1, need_p, need_q, edges);
    }

    const PlantedGraph& g_;
    std::vector<std::uint64_t> chosen_;
    std::vector<std::size_t> planted_after_;
    std::vector<Vertex> stack_;
    std::vector<Vertex> witness_;
    std::size_t best_ = 0;
    bool found_ = false;
};

class DensestSearch {
public:
    DensestSearch(const Graph& g, std::size_t K, std::uint64_t budget, std::size_t floor_value)
        : g_(g), K_(K), budget_(budget), floor_(floor_value), n_(g.order()), chosen_(g.words_per_row(), 0),
          into_(g.order(), 0), suffix_(g.order() + 1, std::vector<std::uint64_t>(g.words_per_row(), 0)) {
        for (std::size_t v = n_; v-- > 0;) {
            suffix_[v] = suffix_[v + 1];
            set_bit(suffix_[v], static_cast<Vertex>(v));
        }
        scratch_.reserve(n_);
    }

    void run() { dfs(0, 0); }
    bool found() const { return found_; }
    std::size_t best() const { return best_; }
    const std::vector<Vertex>& witness() const { return witness_; }

private:
    // Smallest value a completion must reach to be worth exploring.
    std::size_t target() const { return found_ ? best_ + 1 : floor_; }

    // Twice an upper bound on the edges gained by adding r vertices from [v, n).
    std::size_t doubled_gain_bound(std::size_t v, std::size_t r) {
        scratch_.clear();
        for (std::size_t u = v; u < n_; ++u) {
            const auto uu = static_cast<Vertex>(u);
            const std::size_t inner = popcount_and(g_.row(uu), suffix_[v]);
            scratch_.push_back(2 * into_[u] + std::min(r - 1, inner));
        }
        std::nth_element(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r - 1), scratch_.end(),
                         std::greater<>());
        std::size_t sum = 0;
        for (std::size_t i = 0; i < r; ++i) sum += scratch_[i];
        return sum;
    }

    void add(Vertex v, int sign) {
        const auto row = g_.row(v);
        for (std::size_t w = 0; w < row.size(); ++w) {
            std::uint64_t bits = row[w];
            while (bits) {
                const auto u = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                bits &= bits - 1;
                into_[u] = static_cast<std::size_t>(static_cast<long long>(into_[u]) + sign);
            }
        }
    }

    void dfs(std::size_t v, std::size_t edges) {
        if (++nodes_ > budget_) throw BudgetExceeded("exact_densest_er: node budget exhausted");
        const std::size_t r = K_ - stack_.size();
        if (r == 0) {
            if (edges >= target()) {
                found_ = true;
                best_ = edges;
                witness_ = stack_;
            }
            return;
        }
        if (n_ - v < r) return;
        if (2 * edges + doubled_gain_bound(v, r) < 2 * target()) return;
        const auto vv = static_cast<Vertex>(v);
        const std::size_t gain = into_[v];
        set_bit(chosen_, vv);
        stack_.push_back(vv);
        add(vv, +1);
        dfs(v + 1, edges + gain);
        add(vv, -1);
        stack_.pop_back();
        clear_bit(chosen_, vv);
        dfs(v + 1, edges);
    }

    const Graph& g_;
    std::size_t K_;
    std::uint64_t budget_;
    std::size_t floor_;
    std::size_t n_;
    std::vector<std::uint64_t> chosen_;
    std::vector<std::size_t> into_;
    std::vector<std::vector<std::uint64_t>> suffix_;
    std::vector<std::size_t> scratch_;
    std::vector<Vertex> stack_;
    std::vector<Vertex> witness_;
    std::uint64_t nodes_ = 0;
    std::size_t best_ = 0;
    bool found_ = false;
};

// Swap ascent where u may only be exchanged with v of the same class.
class SwapAscent {
public:
    SwapAscent(const Graph& g, const std::vector<std::uint8_t>& cls) : g_(g), cls_(cls) {}

    std::size_t run(std::vector<Vertex>& subset, Rng& rng, std::size_t plateau_budget, bool climb) {
        const std::size_t n = g_.order();
        in_.assign(n, 0);
        for (Vertex v : subset) in_[v] = 1;
        into_.assign(n, 0);
        std::size_t doubled = 0;
        for (std::size_t u = 0; u < n; ++u) {
            for (Vertex v : subset) into_[u] += g_.has_edge(static_cast<Vertex>(u), v) ? 1 : 0;
            if (in_[u]) doubled += static_cast<std::size_t>(into_[u]);
        }
        std::size_t edges = doubled / 2;
        if (!climb) return edges;

        std::size_t plateau = plateau_budget;
        while (true) {
            long best_delta = std::numeric_limits<long>::min();
            Vertex best_u = 0, best_v = 0;
            std::uint64_t ties = 0;
            for (Vertex u : subset) {
                for (std::size_t vi = 0; vi < n; ++vi) {
                    const auto v = static_cast<Vertex>(vi);
                    if (in_[v] || cls_[v] != cls_[u]) continue;
                    const long delta = into_[v] - into_[u] - (g_.has_edge(u, v) ? 1 : 0);
                    if (delta > best_delta) {
                        best_delta = delta;
                        best_u = u;
                        best_v = v;
                        ties = 1;
                    } else if (delta == best_delta && rng.below(++ties) == 0) {
                        best_u = u;
                        best_v = v;
                    }
                }
            }
            if (ties == 0 || best_delta < 0) break;
            if (best_delta == 0) {
                if (plateau == 0) break;
                --plateau;
            }
            apply(subset, best_u, best_v);
            edges = static_cast<std::size_t>(static_cast<long>(edges) + best_delta);
        }
        std::sort(subset.begin(), subset.end());
        return edges;
    }

private:
    void apply(std::vector<Vertex>& subset, Vertex u, Vertex v) {
        *std::find(subset.begin(), subset.end(), u) = v;
        in_[u] = 0;
        in_[v] = 1;
        for (std::size_t w = 0; w < g_.order(); ++w) {
            const auto ww = static_cast<Vertex>(w);
            into_[w] += (g_.has_edge(ww, v) ? 1 : 0) - (g_.has_edge(ww, u) ? 1 : 0);
        }
    }

    const Graph& g_;
    const std::vector<std::uint8_t>& cls_;
    std::vector<std::uint8_t> in_;
    std::vector<long> into_;
};

void draw_into(std::vector<Vertex>& out, std::vector<Vertex> pool, std::size_t count, Rng& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
}

DensestResult ascend(const Graph& g, const std::vector<std::uint8_t>& cls,
                     const std::vector<std::vector<Vertex>>& pools, const std::vector<std::size_t>& quotas,
                     std::size_t restarts, std::uint64_t seed, std::size_t kbar) {
    SwapAscent ascent(g, cls);
    DensestResult best;
    best.method = DensestMethod::LocalSearch;
    bool have = false;
    const std::size_t runs = std::max<std::size_t>(restarts, 1);
    for (std::size_t r = 0; r < runs; ++r) {
        Rng rng(derive_seed(seed, r));
        std::vector<Vertex> subset;
        subset.reserve(kbar);
        for (std::size_t c = 0; c < pools.size(); ++c) draw_into(subset, pools[c], quotas[c], rng);
        std::sort(subset.begin(), subset.end());
        const std::size_t value = ascent.run(subset, rng, 2 * kbar, restarts > 0);
        VertexSubset witness(subset);
        if (!have || value > best.value || (value == best.value && witness < best.witness)) {
            best.value = value;
            best.witness = std::move(witness);
            have = true;
        }
    }
    best.restarts_used = restarts;
    return best;
}

constexpr Real kLn2 = std::numbers::ln2_v<Real>;

// ln P[Bin(N,1/2) >= t] for 2t >= N, summed outward from its largest term.
Real upper_tail_log(std::uint64_t N, std::uint64_t t) {
    const Real lead = log_binomial(N, t) - static_cast<Real>(N) * kLn2;
    Real sum = 1, term = 1;
    for (std::uint64_t j = t; j < N; ++j) {
        term *= static_cast<Real>(N - j) / static_cast<Real>(j + 1);
        sum += term;
        if (term < sum * 1e-18L) break;
    }
    return lead + std::log(sum);
}

}  // namespace

std::uint64_t binomial_count(std::uint64_t n, std::uint64_t k) { return binomial_saturating_impl(n, k); }

std::uint64_t overlap_class_size(const ModelParams& p, std::int64_t z) {
    if (!overlap_feasible(p, z)) return 0;
    const auto uz = static_cast<std::uint64_t>(z);
    return mul_saturating(binomial_count(p.k, uz), binomial_count(p.n - p.k, p.kbar - uz));
}

DensestResult exact_overlap_densest(const PlantedGraph& g, std::size_t kbar, std::int64_t z, std::uint64_t budget) {
    const ModelParams p{g.n(), g.k(), kbar};
    p.validate();
    if (!overlap_feasible(p, z))
        throw ParameterError("exact_overlap_densest: overlap " + std::to_string(z) + " infeasible for kbar=" +
                             std::to_string(kbar));
    const std::uint64_t size = overlap_class_size(p, z);
    if (size > budget)
        throw BudgetExceeded("exact_overlap_densest: " + std::to_string(size) +
                             " subsets exceed the enumeration budget; use local search");
    OverlapEnumerator search(g);
    search.run(static_cast<std::size_t>(z), kbar - static_cast<std::size_t>(z));
    return {search.best(), VertexSubset(search.witness()), DensestMethod::Exhaustive, 0};
}

DensestResult exact_densest_er(const Graph& g, std::size_t K, std::uint64_t node_budget) {
    if (K == 0 || K > g.order()) throw ParameterError("exact_densest_er: need 1 <= K <= n");
    const DensestResult seed_value = local_search_densest(g, K, 4, 0);
    DensestSearch search(g, K, node_budget, seed_value.value);
    search.run();
    return {search.best(), VertexSubset(search.witness()), DensestMethod::Exhaustive, 0};
}

DensestResult local_search_densest(const Graph& g, std::size_t kbar, std::size_t restarts, std::uint64_t seed) {
    const std::size_t n = g.order();
    if (kbar == 0 || kbar > n) throw ParameterError("local_search_densest: need 1 <= kbar <= n");
    std::vector<Vertex> all(n);
    for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<Vertex>(v);
    const std::vector<std::uint8_t> cls(n, 0);
    return ascend(g, cls, {all}, {kbar}, restarts, seed, kbar);
}

DensestResult local_search_densest(const PlantedGraph& g, std::size_t kbar, std::optional<std::int64_t> z,
                                   std::size_t restarts, std::uint64_t seed) {
    if (!z) return local_search_densest(g.graph(), kbar, restarts, seed);
    const ModelParams p{g.n(), g.k(), kbar};
    p.validate();
    if (!overlap_feasible(p, *z))
        throw ParameterError("local_search_densest: overlap " + std::to_string(*z) + " infeasible");
    std::vector<std::uint8_t> cls(g.n(), 0);
    std::vector<Vertex> planted, other;
    for (std::size_t v = 0; v < g.n(); ++v) {
        const auto vv = static_cast<Vertex>(v);
        if (g.is_planted(vv)) {
            cls[v] = 1;
            planted.push_back(vv);
        } else {
            other.push_back(vv);
        }
    }
    const auto zz = static_cast<std::size_t>(*z);
    return ascend(g.graph(), cls, {planted, other}, {zz, kbar - zz}, restarts, seed, kbar);
}

ErPrediction er_prediction(std::uint64_t n, std::uint64_t K) {
    if (K < 2 || K > n) throw ParameterError("er_prediction: need 2 <= K <= n");
    ErPrediction out;
    out.n = n;
    out.K = K;
    const Real pk = pairs(static_cast<Real>(K));
    const Real eps = log_binomial(n, K) / pk;
    if (eps > kLn2) {
        out.saturated = true;
        out.first_order = pk;
    } else {
        out.first_order = pk / 2 + pk * entropy_inverse_excess(eps);
    }
    const Real kr = static_cast<Real>(K);
    const Real nr = static_cast<Real>(n);
    out.second_order = kr * kr / 4 + std::pow(kr, 1.5L) * std::sqrt(std::log(nr / kr)) / 2;
    if (n > 1) {
        out.exponent_c = std::log(kr) / std::log(nr);
        if (out.exponent_c > 0) {
            const Real c = out.exponent_c;
            out.error_exponent = std::max(1.5L - (2.5L - std::sqrt(6.0L)) * (1 - c) / c, 0.0L);
        }
    }
    return out;
}

Real binomial_tail_log(std::uint64_t N, std::uint64_t t) {
    if (t > N) return -std::numeric_limits<Real>::infinity();
    if (t == 0) return 0;
    if (2 * t > N) return upper_tail_log(N, t);
    // P[>= t] = 1 - P[<= t-1] = 1 - P[>= N-t+1]
    return std::log1p(-std::exp(upper_tail_log(N, N - t + 1)));
}

Real binomial_lower_tail_log(std::uint64_t N, std::uint64_t s) {
    if (s >= N) return 0;
    return binomial_tail_log(N, N - s);
}

TailBracket binomial_tail_bracket(std::uint64_t N, std::uint64_t t) {
    if (N == 0 || 2 * t < N || t > N) throw ParameterError("binomial_tail_bracket: need N/2 <= t <= N, N > 0");
    const Real nr = static_cast<Real>(N);
    const Real upper = -nr * rate(static_cast<Real>(t) / nr);
    return {upper - std::log(nr), upper};
}

Real first_moment_expectation(const ModelParams& p, std::int64_t z, Real gamma) {
    if (!(gamma >= 0.5L && gamma <= 1.0L)) throw DomainError("first_moment_expectation: gamma must lie in [1/2, 1]");
    const Real a = a_func(p, z);
    const auto uz = static_cast<std::uint64_t>(z);
    const std::uint64_t free_pairs = p.kbar * (p.kbar - 1) / 2 - uz * (uz - (uz > 0 ? 1 : 0)) / 2;
    const auto t = static_cast<std::uint64_t>(std::ceil(gamma * static_cast<Real>(free_pairs) - 1e-9L));
    return a + binomial_tail_log(free_pairs, std::min(t, free_pairs));
}

std::string to_string(DensestMethod m) { return m == DensestMethod::Exhaustive ? "exhaustive" : "local"; }

}  // namespace plandscape
