#include <doctest.h>

#include "oracles.hpp"
#include "plandscape/errors.hpp"
#include "plandscape/numerics.hpp"
#include "plandscape/ogp.hpp"

using namespace plandscape;

namespace {

OverlapCurve synthetic(const std::vector<Real>& values) {
    OverlapCurve c;
    c.params = {100, 10, 10};
    c.kind = CurveKind::Empirical;
    c.z_lo = 0;
    c.z_hi = static_cast<std::int64_t>(values.size()) - 1;
    for (std::size_t z = 0; z < values.size(); ++z) c.points.push_back({static_cast<std::int64_t>(z), values[z]});
    return c;
}

/// Planted clique {0..3} plus a disjoint clique on {4..7}; d = 6, 3, 2, 3, 6 at kbar = 4.
PlantedGraph two_cliques(std::size_t n) {
    Graph g(n);
    for (Vertex u = 0; u < 4; ++u)
        for (Vertex v = u + 1; v < 4; ++v) {
            g.set_edge(u, v);
            g.set_edge(u + 4, v + 4);
        }
    return PlantedGraph(std::move(g), VertexSubset({0, 1, 2, 3}), 0);
}

/// Re-checks a holding certificate by plain enumeration of every kbar-subset.
bool reverified(const PlantedGraph& g, std::size_t kbar, const OGPCertificate& c) {
    bool low = false, high = false, clean = true;
    oracle::combinations(g.n(), kbar, [&](const std::vector<Vertex>& s) {
        std::int64_t z = 0;
        for (Vertex v : s) z += g.is_planted(v);
        if (static_cast<Real>(oracle::pair_loop_edges(g.graph(), s)) < c.r_n) return;
        if (z <= c.zeta1) low = true;
        else if (z >= c.zeta2) high = true;
        else clean = false;
    });
    return low && high && clean;
}

}  // namespace

TEST_CASE("d-curve") {
    const auto g = sample_planted(14, 4, 21);
    const auto d = d_curve(g, 5);
    CHECK(d.exact());
    CHECK(d.curve.z_lo == 0);
    CHECK(d.curve.z_hi == 4);
    const auto ref = oracle::overlap_curve(g, 5);
    for (std::int64_t z = 0; z <= 4; ++z) {
        CHECK(d.curve.at(z) == static_cast<Real>(ref[z].value));
        CHECK(d.at(z).witness.members() == ref[z].witness);
    }
    const auto square = d_curve(g, 4);
    CHECK(square.curve.at(4) == 6);
    DCurveOptions ls;
    ls.method = CurveMethod::LocalSearch;
    ls.restarts = 3;
    ls.seed = 2;
    const auto approx = d_curve(g, 5, ls);
    CHECK_FALSE(approx.exact());
    for (std::int64_t z = 0; z <= 4; ++z) CHECK(approx.curve.at(z) <= d.curve.at(z));
    DCurveOptions threaded;
    threaded.threads = 3;
    const auto t = d_curve(g, 5, threaded);
    for (std::int64_t z = 0; z <= 4; ++z) CHECK(t.at(z).witness == d.at(z).witness);
    CHECK(d_curve(sample_planted(10, 4, 1), 8).curve.z_lo == 2);
}

TEST_CASE("type M witness") {
    CHECK_FALSE(type_m_witness(synthetic({1, 2, 3, 4})));
    CHECK_FALSE(type_m_witness(synthetic({1, 2})));
    const auto v = type_m_witness(synthetic({5, 1, 4}));
    REQUIRE(v);
    CHECK(v->z_star == 1);
    CHECK(v->lo == 0);
    CHECK(v->hi == 2);
    const auto tie = type_m_witness(synthetic({5, 2, 3, 2, 6}));
    REQUIRE(tie);
    CHECK(tie->z_star == 1);
    const auto fig = type_m_witness(evaluate_curve(ModelParams{10000000, 700, 700}, {CurveKind::Gamma}));
    CHECK(fig);
}

TEST_CASE("certificates on a constructed dip") {
    const auto g = two_cliques(10);
    const auto d = d_curve(g, 4);
    const std::vector<Real> expect{6, 3, 2, 3, 6};
    for (std::int64_t z = 0; z <= 4; ++z) CHECK(d.curve.at(z) == expect[z]);
    const auto c = certify_ogp(g, 4, d, 0, 4, 4.5L);
    CHECK(c.holds);
    CHECK(c.low_witness);
    CHECK(c.high_witness);
    CHECK(*c.high_witness == g.planted());
    CHECK(reverified(g, 4, c));
    CHECK_FALSE(certify_ogp(g, 4, d, 0, 4, 0).holds);
    CHECK_FALSE(certify_ogp(g, 4, d, 0, 4, 7).holds);
    const auto bad = certify_ogp(g, 4, d, 0, 4, 3);
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.violation);
    CHECK(bad.violation->z == 1);
    const auto a = auto_certify(g, 4);
    CHECK(a.holds);
    CHECK(a.data_driven);
    CHECK(a.zeta1 == 0);
    CHECK(a.zeta2 == 4);
    CHECK(a.r_n > 3);
    CHECK(a.r_n < 6);
    CHECK_THROWS_AS(certify_ogp(g, 4, d, 3, 2, 4), ParameterError);
}

TEST_CASE("monotone instances never certify") {
    Graph bare(9);
    for (Vertex u = 0; u < 4; ++u)
        for (Vertex v = u + 1; v < 4; ++v) bare.set_edge(u, v);
    const PlantedGraph g(std::move(bare), VertexSubset({0, 1, 2, 3}), 0);
    const auto a = auto_certify(g, 4);
    CHECK_FALSE(a.holds);
    CHECK_FALSE(a.explanation.empty());
}

TEST_CASE("local search curves are refused") {
    const auto g = two_cliques(10);
    DCurveOptions ls;
    ls.method = CurveMethod::LocalSearch;
    const auto d = d_curve(g, 4, ls);
    CHECK_THROWS_AS(certify_ogp(g, 4, d, 0, 4, 4.5L), NotCertifiable);
    CHECK_THROWS_AS(auto_certify(g, 4, ls), NotCertifiable);
}

TEST_CASE("batch soundness and consistency") {
    int holding = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto g = sample_planted(14, 4, seed);
        const auto d = d_curve(g, 5);
        const auto a = auto_certify(g, 5, d);
        if (!type_m_witness(d.curve)) CHECK_FALSE(a.holds);
        if (!a.holds) continue;
        ++holding;
        CHECK(reverified(g, 5, a));
        CHECK(certify_ogp(g, 5, d, a.zeta1, a.zeta2, a.r_n).holds);
    }
    MESSAGE("holding certificates: " << holding << "/100");
}

TEST_CASE("method names") {
    CHECK(parse_curve_method("local") == CurveMethod::LocalSearch);
    CHECK(to_string(CurveMethod::Exhaustive) == "exhaustive");
    CHECK_THROWS_AS(parse_curve_method("greedy"), ParameterError);
}
