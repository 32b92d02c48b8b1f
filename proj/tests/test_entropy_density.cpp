#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "thermoflow/entropy_density.hpp"

using namespace thermoflow;
using namespace testsupport;

namespace {

FlowSystem unit(const Sft& s) { return FlowSystem(s, std::vector<double>(s.size(), 1.0)); }

double binary_entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

const double kGolden = (1 + std::sqrt(5.0)) / 2;

MarkovMeasure parry(const Sft& s) { return MarkovMeasure::from_matrix(s, {{1 / kGolden, 1 / (kGolden * kGolden)}, {1, 0}}); }

ApproxTarget bernoulli_mix(double eta) {
    return {unit(full2()),
            {MarkovMeasure::bernoulli(full2(), {0.1, 0.9}), MarkovMeasure::bernoulli(full2(), {0.9, 0.1})},
            {0.5, 0.5},
            eta};
}

}  // namespace

TEST_CASE("empirical measure of a generic point") {
    const FlowSystem two = unit(full2());
    const auto mu = MarkovMeasure::bernoulli(full2(), {0.5, 0.5});
    std::mt19937_64 rng(11);
    const auto path = mu.sample_path(rng, 10010, 0, {});
    Word w;
    for (int s : path) w.push_back(mu.emit(s));
    const auto e = empirical_measure(two, {embed_word(full2(), w), 0.0}, 1e4);
    CHECK(std::abs(e.frequency(Word{0}) - 0.5) < 0.02);
    CHECK(std::abs(e.frequency(Word{1}) - 0.5) < 0.02);
}

TEST_CASE("separated generic sets") {
    const FlowSystem two = unit(full2());
    const auto half = MarkovMeasure::bernoulli(full2(), {0.5, 0.5});
    const auto s = separated_generic_set(two, half, 0.6, 40, 0.3, 1);
    CHECK(s.log_count_lower >= 24.0);
    CHECK(s.h_typical > 0.6);
    CHECK(s.h_typical < std::log(2.0));
    CHECK(s.members.size() == 16);
    CHECK(s.min_separation > 3 * s.epsilon);

    const FlowSystem g = unit(golden());
    const auto gs = separated_generic_set(g, parry(golden()), 0.4, 60, 0.3, 2);
    CHECK(gs.log_count_lower >= 0.4 * 60);

    const auto single = separated_generic_set(two, half, 0.0, 10, 0.5, 3);
    CHECK(single.log_count_lower >= 0.0);
    CHECK(!single.members.empty());

    CHECK_THROWS_WITH_AS(separated_generic_set(two, half, 0.68, 5, 0.3, 4), doctest::Contains("increase t"), ParameterError);
    CHECK_THROWS_AS(separated_generic_set(two, half, 0.7, 40, 0.3, 4), ParameterError);
}

TEST_CASE("glued generic family") {
    const auto target = bernoulli_mix(0.1);
    const auto f = glue_generic_family(target, 1000, 3, 7);
    CHECK(f.sets.size() == 2);
    CHECK(f.times[0] == doctest::Approx(500));
    CHECK(f.checks.size() == 3 * 4);
    CHECK(f.worst_check <= 5 * target.eta);
    CHECK(f.min_pair_separation > f.delta / 2);
    CHECK(f.rate > f.rate_bound);
    CHECK(f.certified());
    CHECK(f.log_count_lower ==
          doctest::Approx(3 * (f.sets[0].log_count_lower + f.sets[1].log_count_lower) - 5 * std::log(static_cast<double>(f.partition))));
    CHECK(f.log_c == doctest::Approx(2 * std::log(static_cast<double>(f.partition))));

    const auto one = glue_generic_family(target, 1000, 1, 7);
    CHECK(one.log_count_lower ==
          doctest::Approx(one.sets[0].log_count_lower + one.sets[1].log_count_lower - std::log(static_cast<double>(one.partition))));

    ApproxTarget solo{unit(full2()), {MarkovMeasure::bernoulli(full2(), {0.5, 0.5})}, {1.0}, 0.3};
    const auto p1 = glue_generic_family(solo, 60, 1, 5);
    CHECK(p1.log_count_lower == doctest::Approx(p1.sets[0].log_count_lower));

    CHECK_THROWS_WITH_AS(glue_generic_family(target, 200, 3, 7), doctest::Contains("regime"), ParameterError);
}

TEST_CASE("ergodic approximation") {
    const auto mix = bernoulli_mix(0.05);
    const auto r = ergodic_approximation(mix);
    CHECK(r.h_target == doctest::Approx(binary_entropy(0.9)));
    CHECK(r.distance < 0.05);
    CHECK(std::abs(r.h_nu - binary_entropy(0.9)) < 0.05);
    CHECK(r.distance == doctest::Approx(weak_star_distance(mix.statistics(), SuspendedMeasure(mix.system, r.nu))));

    // generic orbits of ν: long windows stay close to the target
    const SuspendedMeasure sn(mix.system, r.nu);
    const auto lambda = mix.statistics();
    std::mt19937_64 rng(21);
    const int c = 2048;
    const auto path = r.nu.sample_path(rng, 100 * c + 16, 0, {});
    Word w;
    for (int s : path) w.push_back(r.nu.emit(s));
    const SuspPoint x{embed_word(full2(), w), 0.0};
    double worst = 0;
    for (int k = 0; k < 100; ++k) worst = std::max(worst, weak_star_distance(empirical_measure(mix.system, flow(mix.system, x, k * c), c), lambda));
    CHECK(worst < 6 * mix.eta);

    ApproxTarget ergodic{unit(full2()), {MarkovMeasure::bernoulli(full2(), {0.3, 0.7})}, {1.0}, 0.05};
    const auto same = ergodic_approximation(ergodic);
    CHECK(same.distance == 0.0);
    CHECK(same.h_nu == same.h_target);

    ApproxTarget blend{FlowSystem(full2(), {1.0, 2.0}), {parry(full2()), MarkovMeasure::bernoulli(full2(), {0.5, 0.5})}, {0.3, 0.7}, 0.05};
    const auto b = ergodic_approximation(blend);
    CHECK(b.distance < 0.05);
    CHECK(std::abs(b.h_nu - b.h_target) < 0.05);

    CHECK_THROWS_WITH_AS(ergodic_approximation(bernoulli_mix(1e-4), {}, 64), doctest::Contains("least achievable"), ParameterError);
    CHECK_THROWS_AS(ergodic_approximation(ApproxTarget{unit(full2()), {parry(full2())}, {0.5}, 0.05}), ParameterError);
}
