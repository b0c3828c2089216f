#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "plandscape/errors.hpp"
#include "plandscape/model.hpp"
#include "plandscape/rng.hpp"

using namespace plandscape;

namespace {

VertexSubset random_subset(std::size_t n, std::size_t size, Rng& rng) {
    std::vector<Vertex> all(n);
    for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<Vertex>(v);
    for (std::size_t i = 0; i < size; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
    all.resize(size);
    return VertexSubset(all);
}

}  // namespace

TEST_CASE("rng is reproducible and bounded draws stay in range") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs |= x != c.next();
    }
    CHECK(differs);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.below(7) < 7);
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("vertex subsets are sorted and reject duplicates") {
    const VertexSubset s{5, 1, 3};
    CHECK(s.members() == std::vector<Vertex>{1, 3, 5});
    CHECK(s.contains(3));
    CHECK_FALSE(s.contains(2));
    CHECK_THROWS_AS(VertexSubset({1, 1}), ParameterError);
    CHECK_THROWS_AS(s.mask(4), ParameterError);
}

TEST_CASE("sample_planted basics") {
    SUBCASE("k = n gives the complete graph") {
        const auto g = sample_planted(5, 5, 9);
        CHECK(g.graph().edge_count() == 10);
    }
    SUBCASE("the planted set is a clique of size k") {
        const auto g = sample_planted(30, 7, 3);
        CHECK(g.k() == 7);
        const auto& p = g.planted().members();
        CHECK(oracle::pair_loop_edges(g.graph(), p) == 21);
    }
    SUBCASE("adjacency is symmetric with an empty diagonal") {
        const auto g = sample_planted(70, 5, 11);
        for (Vertex u = 0; u < 70; ++u) {
            CHECK_FALSE(g.graph().has_edge(u, u));
            for (Vertex v = 0; v < 70; ++v) REQUIRE(g.graph().has_edge(u, v) == g.graph().has_edge(v, u));
        }
    }
    SUBCASE("same seed, same graph") {
        CHECK(sample_planted(40, 6, 77) == sample_planted(40, 6, 77));
        CHECK_FALSE(sample_planted(40, 6, 77) == sample_planted(40, 6, 78));
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(sample_planted(0, 1, 1), ParameterError);
        CHECK_THROWS_AS(sample_planted(4, 5, 1), ParameterError);
        CHECK_THROWS_AS(sample_planted(4, 0, 1), ParameterError);
    }
}

TEST_CASE("non-planted pairs are fair coin flips") {
    // Mean over 1000 seeds of the edges outside the clique, against the
    // binomial mean (C(200,2) - C(10,2)) / 2 with sigma sqrt(M/4 / 1000).
    const double m = 200.0 * 199 / 2 - 45;
    double total = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) total += double(sample_planted(200, 10, seed).graph().edge_count()) - 45;
    const double mean = total / 1000;
    CHECK(m / 2 == doctest::Approx(9927.5));
    CHECK(std::abs(mean - 9927.5) <= 3 * std::sqrt(m / 4 / 1000));
}

TEST_CASE("planted positions are uniform") {
    std::vector<int> hits(10, 0);
    for (std::uint64_t seed = 0; seed < 5000; ++seed) {
        const auto g = sample_planted(10, 3, seed);
        for (Vertex v : g.planted()) ++hits[v];
    }
    // each vertex planted with probability 3/10
    for (int h : hits) CHECK(std::abs(h - 1500) <= 4 * std::sqrt(5000 * 0.3 * 0.7));
}

TEST_CASE("edge_count and overlap agree with naive oracles") {
    const auto g = sample_planted(50, 8, 5);
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const VertexSubset s = random_subset(50, 1 + rng.below(20), rng);
        CHECK(edge_count(g, s) == oracle::pair_loop_edges(g.graph(), s.members()));
        std::vector<Vertex> common;
        std::set_intersection(s.begin(), s.end(), g.planted().begin(), g.planted().end(), std::back_inserter(common));
        CHECK(overlap(g, s) == common.size());
        const std::size_t z = overlap(g, s);
        CHECK(edge_count(g, s) >= z * (z - (z > 0 ? 1 : 0)) / 2);
    }
    const auto& p = g.planted().members();
    CHECK(edge_count(g, VertexSubset({p[0], p[1], p[2], p[3]})) == 6);
    CHECK(edge_count(g, VertexSubset({p[0]})) == 0);
    CHECK(overlap(g, g.planted()) == 8);
    CHECK_THROWS_AS(edge_count(g, VertexSubset({1, 50})), ParameterError);
}

TEST_CASE("graph text round-trips bit-exactly") {
    for (std::size_t n : {1, 2, 5, 64, 65, 130}) {
        const auto g = sample_planted(n, std::min<std::size_t>(n, 3), n * 13);
        const std::string text = to_graph_text(g);
        std::istringstream in(text);
        const auto back = read_graph(in);
        CHECK(back == g);
        CHECK(to_graph_text(back) == text);
    }
    const std::string head = to_graph_text(sample_planted(6, 2, 4));
    CHECK(head.rfind("pcg v1 6 2 4\n", 0) == 0);
}

TEST_CASE("malformed graph text is rejected") {
    const std::string good = to_graph_text(sample_planted(6, 2, 4));
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_graph(in);
    };
    CHECK_THROWS_AS(parse("pcg v2 6 2 4\n"), ParameterError);
    CHECK_THROWS_AS(parse(good.substr(0, good.size() - 3)), ParameterError);
    std::string bad = good;
    bad[bad.size() - 2] = 'x';
    CHECK_THROWS_AS(parse(bad), ParameterError);
}

TEST_CASE("planted graphs refuse non-clique planted sets") {
    Graph g(4);
    g.set_edge(0, 1);
    CHECK_NOTHROW(PlantedGraph(g, VertexSubset({0, 1}), 0));
    CHECK_THROWS_AS(PlantedGraph(g, VertexSubset({0, 2}), 0), ParameterError);
    CHECK_THROWS_AS(g.set_edge(2, 2), ParameterError);
}
