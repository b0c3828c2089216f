#include <doctest.h>

#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "plandscape/errors.hpp"
#include "plandscape/numerics.hpp"
#include "plandscape/rng.hpp"

using namespace plandscape;

namespace {

const Real kLn2 = std::log(2.0L);

bool close(Real a, Real b, Real rel) { return std::fabs(a - b) <= rel * std::max<Real>(1, std::fabs(b)); }

OverlapCurve synthetic(std::uint64_t n, std::uint64_t k, std::uint64_t kbar, const std::vector<Real>& values) {
    OverlapCurve c;
    c.params = {n, k, kbar};
    c.kind = CurveKind::Empirical;
    c.z_lo = 0;
    c.z_hi = static_cast<std::int64_t>(values.size()) - 1;
    for (std::size_t z = 0; z < values.size(); ++z) c.points.push_back({static_cast<std::int64_t>(z), values[z]});
    return c;
}

}  // namespace

TEST_CASE("entropy and rate at fixed points") {
    CHECK(close(entropy(0.5L), kLn2, 1e-18L));
    CHECK(entropy(1.0L) == 0);
    // 50-digit reference values
    CHECK(close(entropy(0.75L), 0.5623351446188083502880303L, 1e-12L));
    CHECK(close(rate(0.75L), 0.1308120359411369591292018L, 1e-12L));
    CHECK(rate(0.5L) == 0);
    CHECK(close(rate(1.0L), kLn2, 1e-18L));
    CHECK_THROWS_AS(entropy(0.4L), DomainError);
    CHECK_THROWS_AS(entropy(1.1L), DomainError);
    CHECK_THROWS_AS(rate(0.3L), DomainError);
}

TEST_CASE("rate_at_excess keeps relative precision near one half") {
    for (Real d : {1e-3L, 1e-6L, 1e-9L}) {
        const Real exact = 2 * d * d + 4 * d * d * d * d / 3;
        CHECK(close(rate_at_excess(d) / exact, 1, 1e-9L));
    }
    CHECK(close(rate_at_excess(0.25L), rate(0.75L), 1e-15L));
}

TEST_CASE("entropy inverse") {
    CHECK(close(entropy_inverse(kLn2), 0.5L, 1e-12L));
    CHECK(close(entropy_inverse(0), 1, 1e-12L));
    CHECK(std::fabs(entropy(entropy_inverse(0.3L)) - 0.3L) <= 1e-12L);
    CHECK_THROWS_AS(entropy_inverse(-0.01L), DomainError);
    CHECK_THROWS_AS(entropy_inverse(0.7L), DomainError);
    for (Real y : {0.1L, 0.45L, 0.69L}) {
        const auto ref = oracle::entropy_inverse(oracle::BigReal(static_cast<double>(y)));
        CHECK(close(entropy_inverse(static_cast<double>(y)), static_cast<Real>(ref), 1e-15L));
    }
}

TEST_CASE("entropy inverse round trip on a 1000 point grid") {
    Real worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const Real y = kLn2 * i / 999;
        worst = std::max(worst, std::fabs(entropy(entropy_inverse(y)) - y));
    }
    CHECK(worst <= 1e-10L);
}

TEST_CASE("Taylor expansion of the inverse") {
    CHECK(entropy_inverse_taylor(0) == 0.5L);
    CHECK(std::fabs(entropy_inverse_taylor(1e-4L) - entropy_inverse(kLn2 - 1e-4L)) <= 1e-9L);
    CHECK_THROWS_AS(entropy_inverse_taylor(-1e-3L), DomainError);
    std::vector<Real> ratios;
    for (Real eps : {1e-2L, 5e-3L, 2e-3L, 1e-3L, 5e-4L, 2e-4L, 1e-4L}) {
        const Real err = std::fabs(entropy_inverse_taylor(eps) - (0.5L + entropy_inverse_excess(eps)));
        ratios.push_back(err / std::pow(eps, 2.5L));
    }
    const Real ref = ratios.back();
    for (Real r : ratios) CHECK(std::fabs(r / ref - 1) <= 0.25L);
}

TEST_CASE("log binomial") {
    CHECK(close(log_binomial(4, 2), std::log(6.0L), 1e-18L));
    CHECK(log_binomial(17, 0) == 0);
    CHECK(close(log_binomial(10000000, 1000000), 3250821.959900843777909598L, 1e-9L));
    CHECK_THROWS_AS(log_binomial(3, 4), ParameterError);
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto n = static_cast<unsigned>(1 + rng.below(3000));
        const auto k = static_cast<unsigned>(rng.below(n + 1));
        CHECK(close(log_binomial(n, k), static_cast<Real>(log(oracle::BigReal(oracle::binom(n, k)))), 1e-12L));
    }
}

TEST_CASE("A(z)") {
    const ModelParams p{30, 5, 6};
    CHECK(close(a_func(p, 2), std::log(126500.0L), 1e-15L));
    CHECK(close(a_func(p, 2), 11.74799758714971197750544L, 1e-15L));
    CHECK(close(a_func(p, 0), log_binomial(25, 6), 1e-15L));
    CHECK(a_func(ModelParams{9, 4, 4}, 4) == 0);
    CHECK_THROWS_AS(a_func(p, 6), ParameterError);
    CHECK_THROWS_AS(a_func(ModelParams{8, 4, 6}, 1), ParameterError);
}

TEST_CASE("A(z) difference identity on random triples") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t n = 5 + rng.below(500);
        const std::uint64_t k = 1 + rng.below(n / 2);
        const std::uint64_t kbar = k + rng.below(n - k);
        const ModelParams p{n, k, kbar};
        for (std::int64_t z = 0; z < static_cast<std::int64_t>(std::min(k, kbar)); ++z) {
            if (!overlap_feasible(p, z) || !overlap_feasible(p, z + 1)) continue;
            const Real zr = static_cast<Real>(z);
            const Real expect = std::log((k - zr) * (kbar - zr) / ((zr + 1) * (static_cast<Real>(n - k) - kbar + zr + 1)));
            const Real diff = a_func(p, z + 1) - a_func(p, z);
            REQUIRE(std::fabs(diff - expect) <= 1e-9L * std::max<Real>(1, std::fabs(expect)));
        }
    }
}

TEST_CASE("first moment curve") {
    SUBCASE("full overlap is the clique itself") {
        const ModelParams p{100, 10, 10};
        CHECK(close(gamma_curve(p, 10), 45, 1e-15L));
    }
    SUBCASE("forced placement sits at the midpoint") {
        const ModelParams p{6, 3, 6};
        CHECK(close(gamma_curve(p, 3), 3 + (15 - 3) / 2.0L, 1e-15L));
    }
    SUBCASE("reference value") {
        CHECK(close(gamma_curve(ModelParams{30, 5, 12}, 2), 56.09001684895823776586205L, 1e-9L));
        const auto ref = oracle::gamma_value(30, 5, 12, 2);
        CHECK(close(gamma_curve(ModelParams{30, 5, 12}, 2), static_cast<Real>(ref), 1e-12L));
    }
    SUBCASE("undefined where the count exceeds the pair budget") {
        CHECK_THROWS_AS(gamma_curve(ModelParams{30, 5, 6}, 2), CurveUndefined);
        try {
            gamma_curve(ModelParams{30, 5, 6}, 2);
        } catch (const CurveUndefined& e) {
            CHECK(e.z() == 2);
        }
    }
    SUBCASE("bounds and excess agree") {
        const ModelParams p{2000, 30, 60};
        for (std::int64_t z = 0; z <= 30; ++z) {
            const Real g = gamma_curve(p, z);
            CHECK(g >= pairs(static_cast<Real>(z)));
            CHECK(g <= pairs(60));
            const Real factor = (g - pairs(static_cast<Real>(z))) / (pairs(60) - pairs(static_cast<Real>(z)));
            CHECK(factor >= 0.5L);
            CHECK(factor <= 1);
            CHECK(close(gamma_curve_excess(p, z), g - pairs(60) / 2, 1e-12L));
            CHECK(close(g, static_cast<Real>(oracle::gamma_value(2000, 30, 60, static_cast<unsigned>(z))), 1e-12L));
        }
    }
}

TEST_CASE("approximate curves") {
    const ModelParams p{30, 5, 6};
    CHECK(close(gamma_tilde(p, 2), 17.06840576452377233625646L, 1e-9L));
    CHECK(close(gamma_tilde(p, 2, TildeForm::PlantedPairs), 12.7709001603772351550645L, 1e-9L));
    CHECK(close(phi_curve(p, 2), 15.80012470451282213899091L, 1e-9L));
    const ModelParams q{9, 4, 4};
    CHECK(close(gamma_tilde(q, 4), 6, 1e-15L));
    const ModelParams r{9, 4, 9};
    CHECK(close(phi_curve(r, 4), (36 + 6) / 2.0L, 1e-15L));
    CHECK_THROWS_AS(phi_curve(ModelParams{9, 4, 4}, 4), DomainError);
    const ModelParams big{100000, 300, 400};
    CHECK(close(gamma_curve(big, 50), 50284.143316222276705L, 1e-12L));
    CHECK(close(phi_curve(big, 50), 50284.495819475065726L, 1e-12L));
    CHECK(std::fabs(phi_curve(big, 50) - gamma_curve(big, 50)) <= 5);
}

TEST_CASE("T_n statistic") {
    CHECK(close(t_statistic(ModelParams{10000000, 700, 700}), 44.157578069087220393L, 1e-12L));
    CHECK(close(t_statistic(ModelParams{10000000, 700, 980000}), 1460.1591648706323452L, 1e-12L));
    CHECK(close(t_statistic(ModelParams{10000000, 4000, 4000}), 59.882676504746066753L, 1e-12L));
    CHECK(close(t_statistic(ModelParams{10000000, 4000, 6250000}), 1376.6226412654546024L, 1e-12L));
    CHECK(t_statistic(ModelParams{10000000, 700, 700}) > 0);
    CHECK(t_statistic(ModelParams{10000000, 700, 700}) < 700);
    CHECK(t_statistic(ModelParams{10000000, 700, 980000}) > 700);
    CHECK_THROWS_AS(t_statistic(ModelParams{100, 10, 100}), ParameterError);
}

TEST_CASE("asymptotic classification") {
    CHECK(classify_asymptotic(ModelParams{10000000, 700, 700}).label == Monotonicity::NonMonotonic);
    CHECK(classify_asymptotic(ModelParams{10000000, 700, 980000}).label == Monotonicity::Decreasing);
    CHECK(classify_asymptotic(ModelParams{10000000, 4000, 4000}).label == Monotonicity::NonMonotonic);
    CHECK(classify_asymptotic(ModelParams{10000000, 4000, 6250000}).label == Monotonicity::Increasing);
    CHECK(classify_asymptotic(ModelParams{10000, 100, 200}).label == Monotonicity::Indeterminate);
}

TEST_CASE("curve evaluation") {
    const ModelParams p{10000000, 700, 700};
    const auto c = evaluate_curve(p, {CurveKind::GammaTilde});
    CHECK(c.z_lo == trivial_overlap(p));
    CHECK(c.z_hi == 700);
    CHECK(c.size() == 701);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.points[i].z == c.z_lo + static_cast<std::int64_t>(i));
    CurveRequest par{CurveKind::Gamma};
    par.threads = 4;
    const auto a = evaluate_curve(ModelParams{10000000, 4000, 4000}, par);
    par.threads = 1;
    const auto b = evaluate_curve(ModelParams{10000000, 4000, 4000}, par);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i].value == b.points[i].value);
    const auto rn = renormalized(c);
    CHECK(rn.size() == c.size());
    CHECK(close(rn.back(), (pairs(700) - pairs(700) / 2) / std::pow(700.0L, 1.5L), 1e-12L));
    CHECK_THROWS_AS(evaluate_curve(p, {CurveKind::Empirical}), ParameterError);
}

TEST_CASE("empirical classification on synthetic curves") {
    std::vector<Real> up, down, vee, flat(21, 3);
    for (int z = 0; z <= 20; ++z) {
        up.push_back(z);
        down.push_back(-z);
        vee.push_back(std::fabs(z - 8.0L));
    }
    CHECK(classify_empirical(synthetic(1000, 20, 20, up)).label == Monotonicity::Increasing);
    CHECK(classify_empirical(synthetic(1000, 20, 20, down)).label == Monotonicity::Decreasing);
    CHECK(classify_empirical(synthetic(1000, 20, 20, flat)).label == Monotonicity::Indeterminate);
    const auto v = classify_empirical(synthetic(1000, 20, 20, vee));
    CHECK(v.label == Monotonicity::NonMonotonic);
    CHECK(v.window_lo == 0);
    CHECK(v.window_hi == 18);
    CHECK(v.depth == doctest::Approx(8));
    CHECK(*v.u1 == 1);
    CHECK(*v.u2 == 15);
    CHECK_THROWS_AS(classify_empirical(synthetic(1000, 2, 2, {0, 1, 2})), ParameterError);
}

TEST_CASE("empirical classification matches the four reference regimes") {
    struct Case {
        std::uint64_t k, kbar;
        Monotonicity expect;
    };
    for (const Case& c : {Case{700, 700, Monotonicity::NonMonotonic}, Case{700, 980000, Monotonicity::Decreasing},
                          Case{4000, 4000, Monotonicity::NonMonotonic}, Case{4000, 6250000, Monotonicity::Increasing}}) {
        const ModelParams p{10000000, c.k, c.kbar};
        CHECK(classify_empirical(evaluate_curve(p, {CurveKind::GammaTilde})).label == c.expect);
        CHECK(classify_empirical(evaluate_curve(p, {CurveKind::Gamma})).label == c.expect);
        CHECK(classify_asymptotic(p).label == c.expect);
    }
}

TEST_CASE("phase diagram") {
    const std::uint64_t n = 10000000;
    const auto cells = phase_diagram(n, {700, 4000}, {500, 700, 980000, 6250000});
    CHECK(cells.size() == 8);
    auto label = [&](std::uint64_t k, std::uint64_t kbar) {
        for (const auto& c : cells)
            if (c.k == k && c.kbar == kbar) return c.label;
        FAIL("missing cell");
        return PhaseLabel::Indeterminate;
    };
    CHECK(label(700, 700) == PhaseLabel::Ogp);
    CHECK(label(700, 500) == PhaseLabel::BelowDiagonal);
    CHECK(label(700, 980000) == PhaseLabel::UninformativeNoOgp);
    CHECK(label(4000, 6250000) == PhaseLabel::InformativeNoOgp);
    const auto again = phase_diagram(n, {700, 4000}, {500, 700, 980000, 6250000});
    for (std::size_t i = 0; i < cells.size(); ++i) CHECK(cells[i].label == again[i].label);
    CHECK_THROWS_AS(phase_diagram(n, {4000, 700}, {700}), ParameterError);
}

TEST_CASE("names round trip") {
    for (auto kind : {CurveKind::Gamma, CurveKind::GammaTilde, CurveKind::Phi, CurveKind::Empirical})
        CHECK(parse_curve_kind(to_string(kind)) == kind);
    CHECK(to_string(Monotonicity::NonMonotonic) == "NonMonotonic");
    CHECK(to_string(PhaseLabel::Ogp) == "OGP");
    CHECK_THROWS_AS(parse_curve_kind("gammma"), ParameterError);
}
