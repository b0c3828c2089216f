#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plandscape/errors.hpp"
#include "plandscape/landscape.hpp"
#include "plandscape/numerics.hpp"
#include "plandscape/rng.hpp"

using namespace plandscape;

namespace {

bool close(Real a, Real b, Real rel) { return std::fabs(a - b) <= rel * std::max<Real>(1, std::fabs(b)); }

std::vector<Vertex> members(const DensestResult& r) { return r.witness.members(); }

}  // namespace

TEST_CASE("counting helpers") {
    CHECK(binomial_count(14, 5) == 2002);
    CHECK(binomial_count(3, 4) == 0);
    CHECK(binomial_count(200, 100) == UINT64_MAX);
    CHECK(overlap_class_size(ModelParams{14, 4, 5}, 2) == 6 * 120);
}

TEST_CASE("overlap densest trivial cases") {
    const auto g = sample_planted(12, 4, 3);
    const auto full = exact_overlap_densest(g, 4, 4);
    CHECK(full.value == 6);
    CHECK(full.witness == g.planted());
    CHECK(full.method == DensestMethod::Exhaustive);
    const auto pair = exact_overlap_densest(sample_planted(12, 2, 3), 2, 0);
    CHECK(pair.value == 1);
    CHECK_THROWS_AS(exact_overlap_densest(g, 5, 5), ParameterError);
    CHECK_THROWS_AS(exact_overlap_densest(sample_planted(40, 4, 1), 12, 1, 1000), BudgetExceeded);
}

TEST_CASE("overlap densest agrees with the naive enumerator") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = sample_planted(14, 4, seed);
        const auto ref = oracle::overlap_curve(g, 5);
        std::size_t best_any = 0;
        for (std::int64_t z = 0; z <= 4; ++z) {
            REQUIRE(ref[z].found);
            const auto r = exact_overlap_densest(g, 5, z);
            CHECK(r.value == ref[z].value);
            CHECK(members(r) == ref[z].witness);
            CHECK(plandscape::edge_count(g, r.witness) == r.value);
            CHECK(overlap(g, r.witness) == static_cast<std::size_t>(z));
            best_any = std::max(best_any, r.value);
        }
        CHECK(best_any == oracle::densest(g.graph(), 5).value);
    }
}

TEST_CASE("overlap densest is monotone under edge addition") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = sample_planted(12, 3, seed);
        Rng rng(seed);
        Vertex u = 0, v = 0;
        do {
            u = static_cast<Vertex>(rng.below(12));
            v = static_cast<Vertex>(rng.below(12));
        } while (u == v || g.graph().has_edge(u, v));
        const auto h = g.with_edge(u, v);
        for (std::int64_t z = 0; z <= 3; ++z)
            CHECK(exact_overlap_densest(h, 4, z).value >= exact_overlap_densest(g, 4, z).value);
    }
}

TEST_CASE("branch and bound densest subgraph") {
    const Graph g = sample_gnp_half(9, 5);
    CHECK(exact_densest_er(g, 9).value == g.edge_count());
    CHECK(exact_densest_er(g, 2).value == 1);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Graph h = sample_gnp_half(16, seed);
        const auto ref = oracle::densest(h, 6);
        const auto r = exact_densest_er(h, 6);
        CHECK(r.value == ref.value);
        CHECK(members(r) == ref.witness);
    }
    CHECK_THROWS_AS(exact_densest_er(sample_gnp_half(80, 1), 20, 1000), BudgetExceeded);
    CHECK_THROWS_AS(exact_densest_er(g, 10), ParameterError);
}

TEST_CASE("local search") {
    SUBCASE("a planted clique at full overlap is a fixed point") {
        const auto g = sample_planted(20, 6, 4);
        const auto r = local_search_densest(g, 6, std::int64_t{6}, 3, 1);
        CHECK(r.value == 15);
        CHECK(r.method == DensestMethod::LocalSearch);
    }
    SUBCASE("zero restarts only evaluates the start") {
        const auto g = sample_planted(20, 4, 4);
        const auto a = local_search_densest(g, 6, std::nullopt, 0, 9);
        const auto b = local_search_densest(g, 6, std::nullopt, 0, 9);
        CHECK(a.restarts_used == 0);
        CHECK(a.witness == b.witness);
        CHECK(a.value == plandscape::edge_count(g, a.witness));
        const auto c = local_search_densest(g, 6, std::int64_t{2}, 0, 9);
        CHECK(overlap(g, c.witness) == 2);
    }
    SUBCASE("never above and usually at the exhaustive optimum") {
        int equal = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto g = sample_planted(14, 4, seed);
            const std::int64_t z = static_cast<std::int64_t>(seed % 5);
            const auto exact = exact_overlap_densest(g, 5, z);
            const auto ls = local_search_densest(g, 5, z, 20, seed);
            REQUIRE(ls.value <= exact.value);
            CHECK(overlap(g, ls.witness) == static_cast<std::size_t>(z));
            equal += ls.value == exact.value;
        }
        CHECK(equal >= 190);
    }
    SUBCASE("unrestricted search on a plain graph") {
        const Graph h = sample_gnp_half(16, 2);
        const auto r = local_search_densest(h, 6, 10, 3);
        CHECK(r.value <= oracle::densest(h, 6).value);
        CHECK(r.witness.size() == 6);
    }
}

TEST_CASE("Erdos-Renyi prediction") {
    const auto full = er_prediction(30, 30);
    CHECK(close(full.first_order, pairs(30) / 2, 1e-12L));
    const auto big = er_prediction(1000000, 1000);
    CHECK(std::fabs(big.first_order - big.second_order) / big.first_order <= 0.02L);
    CHECK(close(big.exponent_c, 0.5L, 1e-15L));
    CHECK(close(big.error_exponent, 1.5L - (2.5L - std::sqrt(6.0L)), 1e-15L));
    CHECK(er_prediction(1000000, 3).saturated);
    CHECK_THROWS_AS(er_prediction(5, 6), ParameterError);
}

TEST_CASE("binomial tails") {
    CHECK(binomial_tail_log(10, 0) == 0);
    CHECK(close(binomial_tail_log(4, 3), std::log(5.0L / 16), 1e-15L));
    CHECK(std::isinf(binomial_tail_log(4, 5)));
    for (unsigned N : {1u, 7u, 40u, 333u, 2000u}) {
        for (unsigned t : {0u, N / 3, N / 2, N / 2 + 1, (3 * N) / 4, N}) {
            const Real ref = static_cast<Real>(oracle::log_tail(N, t));
            CHECK(std::fabs(binomial_tail_log(N, t) - ref) <= 1e-10L * std::fabs(ref));
            if (t > 0) {
                const Real sum = std::exp(binomial_tail_log(N, t)) + std::exp(binomial_lower_tail_log(N, t - 1));
                CHECK(std::fabs(sum - 1) <= 1e-10L);
            }
        }
    }
    const auto br = binomial_tail_bracket(10000, 5500);
    const Real exact = binomial_tail_log(10000, 5500);
    CHECK(br.lower <= exact);
    CHECK(exact <= br.upper);
    CHECK(close(exact, static_cast<Real>(oracle::log_tail(10000, 5500)), 1e-10L));
    CHECK_THROWS_AS(binomial_tail_bracket(10, 4), ParameterError);
}

TEST_CASE("first moment expectation") {
    const ModelParams p{40, 6, 8};
    CHECK(close(first_moment_expectation(p, 2, 0.7L), 13.17481000694375103328848L, 1e-10L));
    const Real comb = static_cast<Real>(oracle::log_count(40, 6, 8, 2));
    CHECK(close(first_moment_expectation(p, 2, 0.7L), comb + static_cast<Real>(oracle::log_tail(27, 19)), 1e-12L));
    CHECK(close(first_moment_expectation(p, 2, 1.0L), comb - 27 * std::log(2.0L), 1e-12L));
    const Real half = first_moment_expectation(p, 2, 0.5L);
    // odd M = 27, so the tail at the median is exactly one half
    CHECK(close(half, comb - std::log(2.0L), 1e-15L));
}

TEST_CASE("method names") {
    CHECK(to_string(DensestMethod::Exhaustive) == "exhaustive");
    CHECK(to_string(DensestMethod::LocalSearch) == "local");
}
