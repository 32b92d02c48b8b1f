#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace thermoflow;
using namespace testsupport;

namespace {

FlowSystem unit(const Sft& s) { return FlowSystem(s, std::vector<double>(s.size(), 1.0)); }

SuspPoint fixed(const Sft& s, Symbol a, double h) { return {BiWord::periodic(s, {a}), h}; }

}  // namespace

TEST_CASE("flow examples") {
    const auto sys = unit(full2());
    const BiWord x = BiWord::make(full2(), {0}, {1, 0, 1}, {1}, 1);
    SuspPoint p{x, 0.3};
    auto q = flow(sys, p, 0.5);
    CHECK(q.base == x);
    CHECK(q.height == doctest::Approx(0.8));
    q = flow(sys, {x, 0.7}, 0.5);
    CHECK(q.base == x.shifted(1));
    CHECK(q.height == doctest::Approx(0.2));

    const FlowSystem two(full2(), {1.0, 2.0});
    const BiWord y = BiWord::make(full2(), {0}, {1}, {0}, 0);
    q = flow(two, {y, 1.5}, 1.0);
    CHECK(q.base == y.shifted(1));
    CHECK(q.height == doctest::Approx(0.5));
}

TEST_CASE("flow is additive and invertible") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t(-12, 12);
    for (int trial = 0; trial < 300; ++trial) {
        const Sft s = random_irreducible(rng, 4);
        const FlowSystem sys(s, random_roof(s.size(), rng));
        const SuspPoint p = random_point(sys, rng);
        const double a = t(rng), b = t(rng);
        const auto back = flow(sys, flow(sys, p, a), -a);
        CHECK(back.base == p.base);
        CHECK(std::abs(back.height - p.height) < 1e-9);
        const auto ab = flow(sys, flow(sys, p, a), b);
        const auto direct = flow(sys, p, a + b);
        CHECK(bw_distance(sys, ab, direct) < 1e-9);
    }
}

TEST_CASE("bw distance examples") {
    const Sft s = full2();
    const auto sys = unit(s);
    const SuspPoint p = fixed(s, 0, 0.2);
    CHECK(bw_distance(sys, p, p) == 0.0);
    const SuspPoint q = fixed(s, 0, 0.6);
    CHECK(bw_distance(sys, p, q) <= 0.4 + 1e-15);
    // agree on [-5, 5]
    const BiWord x = BiWord::periodic(s, {0});
    const BiWord y = BiWord::make(s, {0}, {1}, {0}, -6);
    CHECK(bw_distance(sys, {x, 0}, {y, 0}) <= std::ldexp(1.0, -5));
    const FlowSystem other(golden(), {1, 1});
    CHECK_THROWS_AS(bw_distance(sys, p, {BiWord::periodic(Sft({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}), {2}), 0.1}), ModelError);
}

TEST_CASE("bw distance metric axioms on random triples") {
    std::mt19937_64 rng(17);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Sft& s = trial % 2 ? golden() : full2();
        const FlowSystem sys(s, trial % 4 < 2 ? std::vector<double>{1, 1} : std::vector<double>{1, 2});
        SuspPoint a = random_point(sys, rng, 4), b = random_point(sys, rng, 4), c = random_point(sys, rng, 4);
        // keep triples near each other so the crossing legs matter
        std::uniform_real_distribution<double> dt(-1.5, 1.5);
        b = flow(sys, a, dt(rng));
        CHECK(bw_distance(sys, a, b) == bw_distance(sys, b, a));
        if (bw_distance(sys, a, c) > bw_distance(sys, a, b) + bw_distance(sys, b, c) + 1e-12) ++violations;
        if (bw_distance(sys, a, b) > bw_distance(sys, a, c) + bw_distance(sys, c, b) + 1e-12) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("shadows examples") {
    const Sft s = full2();
    const auto sys = unit(s);
    const SuspPoint x{BiWord::make(s, {0}, {1, 1}, {0}, 0), 0.0};
    CHECK(shadows(sys, x, {x, 5.0}, 0.01));
    const SuspPoint y{BiWord::make(s, {0}, {0, 1}, {0}, 0), 0.0};
    CHECK_FALSE(shadows(sys, y, {x, 3.0}, 0.1));
}

TEST_CASE("gluing on the full shift") {
    const Sft s = full2();
    const auto sys = unit(s);
    const double delta = 0.25;
    std::vector<OrbitSegment> segs{{fixed(s, 0, 0.0), 3.0}, {fixed(s, 1, 0.0), 3.0}};
    const auto g = glue_segments(sys, segs, delta);
    REQUIRE(g.transition_times.size() == 1);
    CHECK(g.transition_times[0] <= nominal_transition_bound(sys, delta) + 1e-12);
    CHECK(g.transition_times[0] >= 0);
    CHECK(shadows(sys, g.point, segs[0], delta));
    CHECK(shadows(sys, flow(sys, g.point, g.block_starts[1] + g.transition_times[0]), segs[1], delta));
    CHECK(g.point.base.window(-2, 6) == Word{0, 0, 0, 0, 0, 0});
    CHECK(g.point.base.window(g.segment_fibers[1] - 2, 6) == Word{1, 1, 1, 1, 1, 1});

    const auto single = glue_segments(sys, {segs[0]}, delta);
    CHECK(single.point == segs[0].start);
    CHECK(single.transition_times.empty());
}

TEST_CASE("gluing on the golden mean inserts the gap word") {
    const Sft s = golden();
    const auto sys = unit(s);
    const SuspPoint x{BiWord::make(s, {0}, {1}, {0}, 0), 0.0};
    const double delta = 0.6;  // no margin: the windows are the visited fibers plus one
    const auto g = glue_segments(sys, {{x, 0.0}, {x, 0.0}}, delta);
    CHECK(margin_for(delta) == 0);
    // window of the first segment is "1 0", of the second "1 0": gap empty; shorten to force 1|1
    const SuspPoint z{BiWord::make(s, {0}, {1, 0, 1}, {0}, 0), 0.0};
    const auto h = glue_segments(sys, {{z, 2.0}, {z, 2.0}}, delta);
    CHECK(h.transition_times[0] <= 3.0 + 1e-12);
    CHECK(shadows(sys, h.point, {z, 2.0}, delta));
    CHECK(shadows(sys, flow(sys, h.point, h.block_starts[1] + h.transition_times[0]), {z, 2.0}, delta));
    CHECK(g.transition_times.size() == 1);
}

TEST_CASE("gluing contract on random systems") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dur(0.0, 8.0);
    std::uniform_int_distribution<int> count(1, 4);
    for (double delta : {0.25, 0.2, 0.1, 0.15, 0.6}) {
        for (int trial = 0; trial < 40; ++trial) {
            const Sft s = random_irreducible(rng, 5);
            const FlowSystem sys(s, random_roof(s.size(), rng));
            std::vector<OrbitSegment> segs;
            const int k = count(rng);
            for (int i = 0; i < k; ++i) segs.push_back({random_point(sys, rng), dur(rng)});
            const auto g = glue_segments(sys, segs, delta);
            const int m = margin_for(delta);
            const double bound = delta * std::ldexp(1.0, m + 1) >= 1.5 ? nominal_transition_bound(sys, delta)
                                                                       : max_transition_time(sys, delta);
            for (double tau : g.transition_times) CHECK(tau <= bound + 1e-9);
            for (int j = 0; j < k; ++j) {
                const double start = j == 0 ? 0.0 : g.block_starts[static_cast<std::size_t>(j)] + g.transition_times[static_cast<std::size_t>(j - 1)];
                CHECK(shadows(sys, flow(sys, g.point, start), segs[static_cast<std::size_t>(j)], delta));
            }
        }
    }
}

TEST_CASE("closing") {
    const Sft s = full2();
    const auto sys = unit(s);
    const SuspPoint p{BiWord::periodic(s, {0, 1}), 0.0};
    const auto c = close_segment(sys, {p, 4.0}, 0.25);
    CHECK(c.orbit.cycle == Word{0, 1});
    CHECK(c.orbit.period == doctest::Approx(2.0));
    CHECK(c.sup_distance < 0.25);

    const SuspPoint g{BiWord::make(golden(), {0}, {0, 1, 0, 0}, {0}, 0), 0.0};
    const auto gs = unit(golden());
    const auto cg = close_segment(gs, {g, 4.0}, 0.25);
    CHECK(cg.orbit.period <= 4.0 + closing_constant(gs, 0.25) + 1e-12);
    CHECK(cg.sup_distance < 0.25);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> dur(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Sft r = random_irreducible(rng, 4);
        const FlowSystem sy(r, random_roof(r.size(), rng));
        const OrbitSegment seg{random_point(sy, rng), dur(rng)};
        const auto res = close_segment(sy, seg, 0.2);
        CHECK(res.excess <= closing_constant(sy, 0.2) + 1e-9);
        CHECK(res.sup_distance < 0.2);
        CHECK(res.orbit.point.base.is_periodic());
    }
}

TEST_CASE("countable gluing is prefix stable") {
    const Sft s = full2();
    const auto sys = unit(s);
    auto stream = [&](std::size_t i) { return OrbitSegment{fixed(s, static_cast<Symbol>(i % 2), 0.0), 3.0}; };
    CountableGlue prev = glue_countable(sys, stream, 0.25, 1);
    for (std::size_t d = 2; d <= 6; ++d) {
        const auto next = glue_countable(sys, stream, 0.25, d);
        for (long c = prev.stable_through - 40; c <= prev.stable_through; ++c)
            CHECK(prev.point.base.at(c) == next.point.base.at(c));
        CHECK(next.stable_through > prev.stable_through);
        prev = next;
    }
    std::vector<OrbitSegment> five;
    for (std::size_t i = 0; i < 5; ++i) five.push_back(stream(i));
    CHECK(glue_segments(sys, five, 0.25).point == glue_countable(sys, stream, 0.25, 5).point);
    auto constant = [&](std::size_t) { return OrbitSegment{fixed(s, 1, 0.0), 2.0}; };
    CHECK(glue_countable(sys, constant, 0.25, 4).point.base.is_periodic());
}
