#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "thermoflow/orbits_ldp.hpp"

using namespace thermoflow;
using namespace testsupport;

namespace {

FlowSystem unit(const Sft& s) { return FlowSystem(s, std::vector<double>(s.size(), 1.0)); }

double binary_entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

WeakStarConfig depth(int d) {
    WeakStarConfig c;
    c.depth = d;
    return c;
}

}  // namespace

TEST_CASE("orbit measures") {
    const FlowSystem rose = unit(rose2());
    const Word a{0}, ab{0, 2};
    const auto ma = orbit_measure(rose, a);
    CHECK(ma.frequency(a) == doctest::Approx(1.0));
    CHECK(ma.mass() == doctest::Approx(1.0));
    const auto mab = orbit_measure(rose, ab);
    CHECK(mab.frequency(Word{0}) == doctest::Approx(0.5));
    CHECK(mab.frequency(Word{2}) == doctest::Approx(0.5));
    CHECK(mab.marginal_defect() < 1e-12);
    CHECK_THROWS_AS(orbit_measure(rose, Word{0, 1}), ModelError);

    // empirical measure over one period of a periodic point equals μ_γ
    const FlowSystem g(golden(), {1.0, 2.0});
    const Word cyc{0, 0, 1};
    const auto mu = orbit_measure(g, cyc);
    const SuspPoint x{BiWord::periodic(golden(), cyc), 0.0};
    CHECK(weak_star_distance(empirical_measure(g, x, 4.0), mu) < 1e-12);
    CHECK(weak_star_distance(empirical_measure(g, x, 40.0), mu) < 1e-12);
}

TEST_CASE("weak* distance") {
    const FlowSystem two = unit(full2());
    const SuspendedMeasure half(two, MarkovMeasure::bernoulli(full2(), {0.5, 0.5}));
    const SuspendedMeasure six(two, MarkovMeasure::bernoulli(full2(), {0.4, 0.6}));
    auto cfg = depth(1);
    cfg.height_weight = 0;
    CHECK(weak_star_distance(measure_statistics(half, cfg), six) == doctest::Approx(0.1));
    const auto a = measure_statistics(half);
    CHECK(weak_star_distance(a, half) == 0.0);
    CHECK(a.mass() == doctest::Approx(1.0));
    CHECK_THROWS_AS(weak_star_distance(a, measure_statistics(six, depth(3))), ParameterError);

    std::mt19937_64 rng(17);
    const FlowSystem g(golden(), {1.0, 2.0});
    std::vector<EmpiricalMeasure> pool;
    for (int i = 0; i < 8; ++i) pool.push_back(measure_statistics(SuspendedMeasure(g, random_markov(golden(), rng))));
    for (int i = 0; i < 8; ++i) pool.push_back(empirical_measure(g, random_point(g, rng), 7.5));
    const double diam = weak_star_diameter(pool[0]);
    for (const auto& p : pool) {
        CHECK(p.marginal_defect() < 1e-12);
        CHECK(p.mass() == doctest::Approx(1.0));
        for (const auto& q : pool) {
            CHECK(weak_star_distance(p, q) == doctest::Approx(weak_star_distance(q, p)));
            CHECK(weak_star_distance(p, q) <= diam + 1e-12);
            for (const auto& r : pool) CHECK(weak_star_distance(p, r) <= weak_star_distance(p, q) + weak_star_distance(q, r) + 1e-12);
        }
    }
}

TEST_CASE("empirical measures compose along the orbit") {
    // 𝓔_{2t}(x) = ½𝓔_t(x) + ½𝓔_t(f_t x)
    std::mt19937_64 rng(3);
    const FlowSystem g(golden(), {1.0, 2.0});
    for (int i = 0; i < 30; ++i) {
        const SuspPoint x = random_point(g, rng);
        auto sum = empirical_measure(g, x, 3.7);
        sum.accumulate(empirical_measure(g, flow(g, x, 3.7), 3.7), 1.0);
        sum.scale(0.5);
        CHECK(weak_star_distance(sum, empirical_measure(g, x, 7.4)) < 1e-12);
    }
}

TEST_CASE("weighted orbit measures") {
    const FlowSystem rose = unit(rose2());
    const Potential zero = CylinderPotential::constant(rose2(), 0);
    const auto one = weighted_orbit_measure(rose, zero, 1.0);
    CHECK(one.orbits == 4);
    for (Symbol s = 0; s < 4; ++s) CHECK(one.measure.frequency(Word{s}) == doctest::Approx(0.25));
    CHECK_THROWS_AS(weighted_orbit_measure(rose, zero, 0.5), ParameterError);

    // a single orbit of period ≤ t gives its own measure
    const FlowSystem g(golden(), {1.0, 2.0});
    const auto only = weighted_orbit_measure(g, CylinderPotential::constant(golden(), 0), 1.5);
    CHECK(only.orbits == 1);
    CHECK(weak_star_distance(only.measure, orbit_measure(g, Word{0})) < 1e-12);

    const auto twelve = weighted_orbit_measure(rose, zero, 12.0, {}, 4);
    CHECK(std::abs(twelve.measure.frequency(Word{0, 2}) - 1.0 / 12) < 0.02);
    CHECK(twelve.measure.marginal_defect() < 1e-12);
    const auto serial = weighted_orbit_measure(rose, zero, 12.0, {}, 1);
    CHECK(weak_star_distance(serial.measure, twelve.measure) == 0.0);
}

TEST_CASE("equidistribution toward the equilibrium state") {
    const FlowSystem rose = unit(rose2());
    for (const auto& phi : {CylinderPotential::constant(rose2(), 0), CylinderPotential::per_symbol(rose2(), {0.3, 0.3, -0.2, -0.2})}) {
        const SuspendedMeasure eq = equilibrium_state(rose, phi);
        double last = 1e9;
        for (double t : {4.0, 8.0, 12.0}) {
            const double d = weak_star_distance(weighted_orbit_measure(rose, phi, t, {}, 4).measure, eq);
            CHECK(d <= last);
            last = d;
        }
        CHECK(last < 0.05);
    }
}

TEST_CASE("observable range") {
    const FlowSystem two = unit(full2());
    const auto ind = CylinderPotential::per_symbol(full2(), {0, 1});
    const auto [lo, hi] = observable_range(two, ind);
    CHECK(lo == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(hi == doctest::Approx(1.0));
    // on golden with roofs (1,2), time fraction in symbol 1 peaks on the cycle 01
    const FlowSystem g(golden(), {1.0, 2.0});
    const auto [glo, ghi] = observable_range(g, CylinderPotential::per_symbol(golden(), {0, 1}));
    CHECK(glo == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ghi == doctest::Approx(2.0 / 3));
}

TEST_CASE("rate function for Bernoulli deviations") {
    const FlowSystem two = unit(full2());
    const auto zero = CylinderPotential::constant(full2(), 0);
    const auto ind = CylinderPotential::per_symbol(full2(), {0, 1});
    const std::vector<double> grid{0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.6};
    const double want = std::log(2.0) - binary_entropy(0.6);
    const auto leg = rate_function(two, zero, ind, grid, RateMethod::legendre);
    const auto dir = rate_function(two, zero, ind, grid, RateMethod::direct);
    CHECK(leg.mean == doctest::Approx(0.5));
    CHECK(leg.points[0].q == 0.0);
    CHECK(dir.points[0].q == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(leg.points[2].q - want) < 1e-6);
    CHECK(std::abs(dir.points[2].q - want) < 1e-3);
    CHECK(leg.points[5].q == doctest::Approx(std::log(2.0)).epsilon(1e-4));
    CHECK(dir.points[5].q == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(std::isinf(leg.points[6].q));
    CHECK(std::isinf(dir.points[6].q));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        CHECK(leg.points[i].q <= leg.points[i + 1].q);
        CHECK(dir.points[i].q <= dir.points[i + 1].q);
    }
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(leg.points[i].q - dir.points[i].q) < 2 * 0.02);
    // convex on the interior grid
    for (std::size_t i = 1; i + 1 < 5; ++i) {
        const double l = grid[i - 1], m = grid[i], r = grid[i + 1];
        const double chord = leg.points[i - 1].q + (leg.points[i + 1].q - leg.points[i - 1].q) * (m - l) / (r - l);
        CHECK(leg.points[i].q <= chord + 1e-9);
    }
}

TEST_CASE("rate function methods agree on a suspension") {
    const FlowSystem g(golden(), {1.0, 2.0});
    const auto phi = CylinderPotential::per_symbol(golden(), {0.2, -0.1});
    const auto psi = CylinderPotential::per_symbol(golden(), {1, 0});
    const std::vector<double> grid{0.0, 0.05, 0.1, 0.15};
    const auto leg = rate_function(g, phi, psi, grid, RateMethod::legendre);
    const auto dir = rate_function(g, phi, psi, grid, RateMethod::direct);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(leg.points[i].q - dir.points[i].q) < 2 * 0.02);
    CHECK(leg.points[3].q > leg.points[1].q);
}

TEST_CASE("deviation frequencies") {
    const FlowSystem two = unit(full2());
    const SuspendedMeasure m(two, MarkovMeasure::bernoulli(full2(), {0.5, 0.5}));
    const auto ind = CylinderPotential::per_symbol(full2(), {0, 1});
    const auto all = deviation_frequency(m, ind, 0.0, 10.0, 2000, 1);
    CHECK(all.frequency == 1.0);
    CHECK(all.log_rate == 0.0);
    const auto a = deviation_frequency(m, ind, 0.1, 20.0, 20000, 9, 1);
    const auto b = deviation_frequency(m, ind, 0.1, 20.0, 20000, 9, 3);
    CHECK(a.hits == b.hits);
    CHECK(a.resolved);
    CHECK(a.ci_lo <= a.log_rate);
    CHECK(a.log_rate <= a.ci_hi);
    const auto c = deviation_frequency(m, ind, 0.2, 20.0, 20000, 9, 2);
    CHECK(c.log_rate < a.log_rate);
    // exact binomial tail at t=20 for the unit-roof shift with a fiber offset
    // stays close to the sampled frequency
    CHECK(a.frequency > 0.2);
    CHECK(a.frequency < 0.5);
    const auto none = deviation_frequency(m, ind, 0.6, 10.0, 100, 2);
    CHECK(none.hits == 0);
    CHECK(!none.resolved);
    CHECK(std::isinf(none.log_rate));
    CHECK(std::isfinite(none.ci_hi));
}
