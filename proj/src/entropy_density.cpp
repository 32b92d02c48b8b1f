#include "thermoflow/entropy_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "thermoflow/errors.hpp"

namespace thermoflow {

namespace {

double flow_entropy(const FlowSystem& sys, const MarkovMeasure& mu) { return mu.entropy() / SuspendedMeasure(sys, mu).mean_roof; }

// one-sided Wilson lower bound
double wilson_lower(std::uint64_t hits, std::uint64_t n, double z) {
    const double nn = static_cast<double>(n), p = static_cast<double>(hits) / nn;
    const double centre = (p + z * z / (2 * nn)) / (1 + z * z / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / (1 + z * z / nn);
    return std::max(0.0, centre - half);
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void ApproxTarget::validate() const {
    if (components.empty()) throw ParameterError("target needs at least one component");
    if (weights.size() != components.size()) throw ParameterError("one weight per component");
    double sum = 0;
    for (double a : weights) {
        if (!(a > 0 && a <= 1)) throw ParameterError("weights must lie in (0, 1]");
        sum += a;
    }
    if (std::abs(sum - 1) > 1e-9) throw ParameterError("weights must sum to 1");
    if (!(eta > 0)) throw ParameterError("eta must be positive");
    for (const auto& c : components)
        if (c.alphabet() != system.sft().size()) throw ModelError("component on a different alphabet");
}

double ApproxTarget::entropy() const {
    double h = 0;
    for (std::size_t i = 0; i < size(); ++i) h += weights[i] * flow_entropy(system, components[i]);
    return h;
}

EmpiricalMeasure ApproxTarget::statistics(const WeakStarConfig& cfg) const {
    EmpiricalMeasure e(system, cfg);
    for (std::size_t i = 0; i < size(); ++i) e.accumulate(measure_statistics(component(i), cfg), weights[i]);
    return e;
}

SuspPoint GenericSet::point(const FlowSystem& sys, std::size_t i) const { return {embed_word(sys.sft(), members.at(i), 0), 0.0}; }

GenericSet separated_generic_set(const FlowSystem& sys, const MarkovMeasure& mu, double h, double t, double eta,
                                 std::uint64_t seed, const GenericOptions& opt) {
    if (!(t > 0) || !(eta > 0) || !(h >= 0)) throw ParameterError("generic set needs t > 0, eta > 0, h >= 0");
    if (opt.samples == 0) throw ParameterError("generic set needs samples");
    const SuspendedMeasure sm(sys, mu);
    const double hmu = mu.entropy() / sm.mean_roof;
    if (h > 0 && h >= hmu) throw ParameterError("growth rate must stay below the entropy of the measure");
    GenericSet out;
    out.t = t;
    out.h = h;
    out.h_typical = h > 0 ? (h + hmu) / 2 : 0;
    out.eta = eta;
    out.epsilon = expansivity_scale(sys) / 3;
    out.samples = opt.samples;
    const auto target = measure_statistics(sm, opt.weak_star);
    const int len = static_cast<int>(std::ceil(t / sys.min_roof())) + opt.weak_star.depth + 2;
    std::mt19937_64 rng(seed);
    std::set<Word> seen;
    for (std::uint64_t i = 0; i < opt.samples; ++i) {
        const auto path = mu.sample_path(rng, len, 0, {});
        Word w;
        for (int s : path) w.push_back(mu.emit(s));
        std::size_t n = 0;
        for (double used = 0; used < t; ++n) used += sys.roof(w[n]);
        const Word prefix(w.begin(), w.begin() + static_cast<long>(n));
        if (-std::log(mu.cylinder(prefix)) < t * out.h_typical) continue;
        const SuspPoint x{embed_word(sys.sft(), w, 0), 0.0};
        if (weak_star_distance(empirical_measure(sys, x, t, opt.weak_star), target) > eta) continue;
        ++out.hits;
        if (out.members.size() < opt.keep && seen.insert(prefix).second) out.members.push_back(w);
    }
    out.mass_lower = wilson_lower(out.hits, out.samples, opt.z);
    out.log_count_lower = out.mass_lower > 0 ? std::log(out.mass_lower) + t * out.h_typical : -std::numeric_limits<double>::infinity();
    if (h == 0 && out.hits > 0) out.log_count_lower = std::max(0.0, out.log_count_lower);
    if (out.hits == 0 || out.log_count_lower < t * h)
        throw ParameterError("increase t: generic set certificate log#Γ >= " + std::to_string(out.log_count_lower) +
                             " below t·h = " + std::to_string(t * h));
    out.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.members.size(); ++i)
        for (std::size_t j = i + 1; j < out.members.size(); ++j)
            out.min_separation = std::min(out.min_separation, shadow_sup(sys, out.point(sys, i), {out.point(sys, j), t}, 3 * out.epsilon));
    return out;
}

GluedFamily glue_generic_family(const ApproxTarget& target, double t, int m, std::uint64_t seed, const GlueOptions& opt) {
    target.validate();
    if (m < 1) throw ParameterError("need m >= 1 blocks");
    if (opt.glued_samples < 2) throw ParameterError("need at least two glued samples");
    const FlowSystem& sys = target.system;
    const std::size_t p = target.size();
    GluedFamily out;
    out.t = t;
    out.m = m;
    out.eta = target.eta;
    out.delta = expansivity_scale(sys) / 3;
    out.transition_bound = max_transition_time(sys, out.delta);
    const auto lambda = target.statistics(opt.generic.weak_star);
    out.diameter = weak_star_diameter(lambda);
    const double overhead = static_cast<double>(p) * out.transition_bound / t;
    if (p > 1 && !(overhead < target.eta / out.diameter))
        throw ParameterError("regime: p·τ·max r / t = " + std::to_string(overhead) + " must be below η/M = " +
                             std::to_string(target.eta / out.diameter));

    double sum_h = 0, sum_log = 0;
    for (std::size_t i = 0; i < p; ++i) {
        const double ti = target.weights[i] * t;
        const double hi = std::max(0.0, flow_entropy(sys, target.components[i]) - target.eta / 2);
        out.times.push_back(ti);
        out.sets.push_back(separated_generic_set(sys, target.components[i], hi, ti, target.eta, substream(seed, i), opt.generic));
        sum_h += hi;
        sum_log += out.sets.back().log_count_lower;
    }
    const double zeta = out.delta / 2 * sys.min_roof();
    out.partition = p > 1 || m > 1 ? static_cast<int>(std::ceil(out.transition_bound / zeta)) : 1;
    out.log_c = static_cast<double>(p) * std::log(static_cast<double>(out.partition));
    out.log_count_lower = m * sum_log - (static_cast<double>(m * p) - 1) * std::log(static_cast<double>(out.partition));
    out.rate = out.log_count_lower / (t * m);
    out.rate_bound = target.entropy() - target.eta - (sum_h + out.log_c) / t;

    std::mt19937_64 rng(substream(seed, p + 1));
    std::vector<SuspPoint> glued;
    std::vector<std::vector<std::size_t>> choices;
    double horizon = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < opt.glued_samples; ++g) {
        std::vector<OrbitSegment> segs;
        std::vector<std::size_t> pick;
        for (int k = 0; k < m; ++k)
            for (std::size_t i = 0; i < p; ++i) {
                const auto& set = out.sets[i];
                const std::size_t c = std::uniform_int_distribution<std::size_t>(0, set.members.size() - 1)(rng);
                pick.push_back(c);
                segs.push_back({set.point(sys, c), out.times[i]});
            }
        const auto res = glue_segments(sys, segs, out.delta);
        auto start = [&](std::size_t j) { return j == 0 ? 0.0 : res.block_starts[j] + res.transition_times[j - 1]; };
        const double end = start(segs.size() - 1) + segs.back().duration;
        for (int k = 0; k < m; ++k) {
            const double b = start(static_cast<std::size_t>(k) * p);
            const double c = (k + 1 < m ? start(static_cast<std::size_t>(k + 1) * p) : end) - b;
            const double d = weak_star_distance(empirical_measure(sys, flow(sys, res.point, b), c, opt.generic.weak_star), lambda);
            out.checks.push_back({g, k, d});
            out.worst_check = std::max(out.worst_check, d);
        }
        horizon = std::min(horizon, end);
        glued.push_back(res.point);
        choices.push_back(pick);
    }
    out.min_pair_separation = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g + 1 < glued.size(); ++g)
        if (choices[g] != choices[g + 1])
            out.min_pair_separation = std::min(out.min_pair_separation, shadow_sup(sys, glued[g], {glued[g + 1], horizon}, out.delta));
    return out;
}

MarkovMeasure block_chain(const ApproxTarget& target, double block_time) {
    target.validate();
    const FlowSystem& sys = target.system;
    const Sft& sft = sys.sft();
    const std::size_t p = target.size();
    // state layout: component blocks (phase, state), then gap words
    std::vector<int> length(p);
    std::vector<std::size_t> offset(p);
    std::vector<Symbol> emit;
    for (std::size_t i = 0; i < p; ++i) {
        const auto& c = target.components[i];
        const double mean_roof = SuspendedMeasure(sys, c).mean_roof;
        length[i] = std::max(1, static_cast<int>(std::lround(target.weights[i] * block_time / mean_roof)));
        offset[i] = emit.size();
        for (int j = 0; j < length[i]; ++j)
            for (std::size_t s = 0; s < c.states(); ++s) emit.push_back(c.emit(static_cast<int>(s)));
    }
    auto state = [&](std::size_t i, int phase, int s) {
        return static_cast<int>(offset[i] + static_cast<std::size_t>(phase) * target.components[i].states() + static_cast<std::size_t>(s));
    };
    SparseMatrix kernel(emit.size());
    std::vector<double> visits(emit.size(), 0.0);  // expected visits per pass
    for (std::size_t i = 0; i < p; ++i) {
        const auto& c = target.components[i];
        for (int j = 0; j < length[i]; ++j)
            for (std::size_t s = 0; s < c.states(); ++s) visits[static_cast<std::size_t>(state(i, j, static_cast<int>(s)))] = c.pi()[s];
        for (int j = 0; j + 1 < length[i]; ++j)
            for (std::size_t s = 0; s < c.states(); ++s)
                for (auto [v, q] : c.row(static_cast<int>(s))) kernel[static_cast<std::size_t>(state(i, j, static_cast<int>(s)))].push_back({state(i, j + 1, v), q});
    }
    for (std::size_t i = 0; i < p; ++i) {
        const auto& c = target.components[i];
        const std::size_t ni = (i + 1) % p;
        const auto& next = target.components[ni];
        std::vector<double> last(sft.size(), 0.0);
        for (std::size_t s = 0; s < c.states(); ++s) last[static_cast<std::size_t>(c.emit(static_cast<int>(s)))] += c.pi()[s];
        // gap words keyed by (last symbol, next start state)
        std::vector<std::vector<int>> entry(sft.size(), std::vector<int>(next.states(), -1));
        for (std::size_t a = 0; a < sft.size(); ++a) {
            if (last[a] == 0) continue;
            for (std::size_t s = 0; s < next.states(); ++s) {
                const int start = state(ni, 0, static_cast<int>(s));
                const Word gap = shortest_gap(sft, static_cast<Symbol>(a), next.emit(static_cast<int>(s)));
                if (gap.empty()) {
                    entry[a][s] = start;
                    continue;
                }
                int prev = -1;
                for (Symbol g : gap) {
                    const int id = static_cast<int>(emit.size());
                    emit.push_back(g);
                    kernel.emplace_back();
                    visits.push_back(last[a] * next.pi()[s]);
                    if (prev < 0)
                        entry[a][s] = id;
                    else
                        kernel[static_cast<std::size_t>(prev)].push_back({id, 1.0});
                    prev = id;
                }
                kernel[static_cast<std::size_t>(prev)].push_back({start, 1.0});
            }
        }
        for (std::size_t s = 0; s < c.states(); ++s) {
            auto& row = kernel[static_cast<std::size_t>(state(i, length[i] - 1, static_cast<int>(s)))];
            const auto a = static_cast<std::size_t>(c.emit(static_cast<int>(s)));
            for (std::size_t v = 0; v < next.states(); ++v) row.push_back({entry[a][v], next.pi()[v]});
        }
    }
    const double pass = std::accumulate(visits.begin(), visits.end(), 0.0);
    for (double& v : visits) v /= pass;
    return MarkovMeasure(sft, emit, kernel, visits);
}

ApproxReport ergodic_approximation(const ApproxTarget& target, const WeakStarConfig& cfg, double max_block_time) {
    target.validate();
    const auto lambda = target.statistics(cfg);
    const double h = target.entropy();
    if (target.size() == 1)
        return {target.components[0], 0.0, weak_star_distance(lambda, target.component(0)), h, h};
    double best = std::numeric_limits<double>::infinity();
    for (double T = 16; T <= max_block_time; T *= 2) {
        MarkovMeasure nu = block_chain(target, T);
        const SuspendedMeasure sn(target.system, nu);
        const double d = weak_star_distance(lambda, sn);
        const double hn = nu.entropy() / sn.mean_roof;
        if (d < target.eta && std::abs(hn - h) < target.eta) return {std::move(nu), T, d, h, hn};
        best = std::min(best, std::max(d, std::abs(hn - h)));
    }
    throw ParameterError("eta infeasible within the block time limit; least achievable about " + std::to_string(best));
}

}  // namespace thermoflow
