#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "thermoflow/cat_graph.hpp"

using namespace thermoflow;

namespace {

MetricGraph rose(double la = 1, double lb = 1) { return MetricGraph(1, {{0, 0, la}, {0, 0, lb}}); }
MetricGraph theta(double l0 = 1, double l1 = 1, double l2 = 1) { return MetricGraph(2, {{0, 1, l0}, {0, 1, l1}, {0, 1, l2}}); }

// a = 0, ā = 1, b = 2, b̄ = 3
Geodesic line(const GraphFlow& gf, Word left, Word core, Word right, long origin, double h) {
    return {BiWord::make(gf.system().sft(), std::move(left), std::move(core), std::move(right), origin), h};
}

}  // namespace

TEST_CASE("edge shift of the rose and theta graphs") {
    const auto r = build_edge_sft(rose());
    CHECK(r.sft().size() == 4);
    for (Symbol e = 0; e < 4; ++e) CHECK(r.sft().successors(e).size() == 3);
    CHECK(min_gap_bound(r.sft()) == 1);
    CHECK(enumerate_primitive_cycles(r.sft(), 1).cycles.size() == 4);
    const auto t = build_edge_sft(theta());
    CHECK(t.sft().size() == 6);
    for (Symbol e = 0; e < 6; ++e) CHECK(t.sft().successors(e).size() == 2);
    CHECK_THROWS_WITH_AS(MetricGraph(1, {{0, 0, 1.0}}), "fundamental group is Z: excluded case", ModelError);
    CHECK_THROWS_WITH_AS(MetricGraph(2, {{0, 1, 1.0}, {1, 0, 2.0}}), "fundamental group is Z: excluded case", ModelError);
    CHECK_THROWS_AS(MetricGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}}), ModelError);
    CHECK_THROWS_AS(MetricGraph(2, {{0, 0, 1.0}, {0, 0, 1.0}, {0, 1, 1.0}}), ModelError);  // degree-one vertex
    CHECK_THROWS_AS(MetricGraph(2, {{0, 0, 1.0}, {0, 0, 1.0}, {1, 1, 1.0}}), ModelError);  // disconnected
}

TEST_CASE("epsilon0 and closed geodesics") {
    const GraphFlow r(rose());
    CHECK(r.epsilon0() == doctest::Approx(0.5));
    CHECK(r.closed_geodesics(1).size() == 4);
    CHECK(r.closed_geodesics(2).size() == 8);
    const GraphFlow t(theta());
    CHECK(t.epsilon0() == doctest::Approx(1.0));
    CHECK(t.closed_geodesics(1).empty());
    CHECK(t.closed_geodesics(2).size() == 6);
    const GraphFlow u(rose(1, 2.5));
    CHECK(u.epsilon0() == doctest::Approx(0.5));
    for (const auto& c : u.closed_geodesics(6)) {
        double len = 0;
        for (Symbol e : c.cycle) len += u.length(e);
        CHECK(len == doctest::Approx(c.period));
        CHECK(is_lyndon(c.cycle));
        CHECK(u.system().sft().cyclically_admissible(c.cycle));
    }
}

TEST_CASE("graph point distances") {
    const GraphFlow t(theta(1, 2, 3));
    CHECK(t.point_distance({0, 0.25}, {0, 0.75}) == doctest::Approx(0.5));
    CHECK(t.point_distance({0, 0.5}, {1, 1.0}) == doctest::Approx(1.5));
    CHECK(t.point_distance({2, 1.5}, {2, 1.5}) == 0);
    const GraphFlow r(rose());
    CHECK(r.point_distance({0, 0.1}, {0, 0.9}) == doctest::Approx(0.2));
    CHECK(r.point_distance({0, 0.5}, {1, 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("lift distance examples") {
    const GraphFlow r(rose());
    const Geodesic g1 = line(r, {0}, {}, {0}, 0, 0.0);
    const Geodesic g2 = line(r, {0}, {0, 0, 2}, {0}, 0, 0.0);
    for (double t : {-3.0, 0.0, 1.0, 2.0}) CHECK(r.lift_distance(g1, g1, t, 6) == 0);
    CHECK(r.lift_distance(g1, g2, 2.5, 6) == doctest::Approx(1.0));
    CHECK(r.lift_distance(g1, g2, 1.5, 6) == doctest::Approx(0.0));
    CHECK(r.lift_distance(g1, g2, 4.0, 6) == doctest::Approx(4.0));
    CHECK_THROWS_WITH_AS(r.lift_distance(g1, g2, 40.0, 3), "insufficient unwinding", ParameterError);
}

TEST_CASE("dgx examples") {
    const GraphFlow r(rose());
    const Geodesic g1 = line(r, {0}, {}, {0}, 0, 0.0);
    CHECK(r.dgx(g1, g1).value == doctest::Approx(0.0));
    for (int R : {1, 2, 3}) {
        // agree on [−R, R], then leave along b in both directions
        Word core(static_cast<std::size_t>(2 * R), 0);
        core.insert(core.begin(), 2);
        core.push_back(2);
        const Geodesic g2 = line(r, {0}, core, {0}, R + 1, 0.0);
        const auto v = r.dgx(g1, g2);
        CHECK(v.value <= std::exp(-2.0 * R) + 1e-12);
        CHECK(v.value + v.error >= std::exp(-2.0 * R) - 1e-9);
    }
    // pure time shift c: the lifts differ by c at all times
    const Geodesic g3 = flow(r.system(), g1, 0.3);
    CHECK(r.dgx(g1, g3).value == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(r.distance_at_zero(g1, g3) == doctest::Approx(0.3));
}

TEST_CASE("dgx dominates the time-zero distance") {
    std::mt19937_64 rng(41);
    for (const auto& g : {rose(), theta(1, 1.5, 2)}) {
        const GraphFlow gf(g);
        for (int i = 0; i < 200; ++i) {
            const Geodesic a = testsupport::random_point(gf.system(), rng, 6);
            const Geodesic b = testsupport::random_point(gf.system(), rng, 6);
            const auto v = gf.dgx(a, b);
            CHECK(gf.distance_at_zero(a, b) <= v.value + v.error + 1e-9);
            CHECK(v.value == doctest::Approx(gf.dgx(b, a).value).epsilon(1e-9));
        }
    }
}
