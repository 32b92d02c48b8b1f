#pragma once

#include <cstdint>
#include <vector>

#include "thermoflow/statistics.hpp"

namespace thermoflow {

/// λ = Σ a_i μ_i, a convex combination of ergodic Markov measures on one system.
/// Weights are flow-time proportions.
struct ApproxTarget {
    FlowSystem system;
    std::vector<MarkovMeasure> components;
    std::vector<double> weights;
    double eta = 0.05;

    void validate() const;
    std::size_t size() const noexcept { return components.size(); }
    SuspendedMeasure component(std::size_t i) const { return SuspendedMeasure(system, components[i]); }
    /// Σ a_i h(μ_i), flow entropy
    double entropy() const;
    EmpiricalMeasure statistics(const WeakStarConfig& cfg = {}) const;
};

struct GenericOptions {
    std::uint64_t samples = 2000;
    std::size_t keep = 16;     // representatives stored for gluing and checks
    double z = 3.0;            // one-sided Wilson quantile for the mass bound
    WeakStarConfig weak_star;
};

/// Γ = points at height 0 whose symbols over [0, t) form a prefix u with
/// −log μ(u) ≥ t·h_typical and whose 𝓔_t lies within η of μ. The prefixes
/// are disjoint cylinders, so #Γ ≥ μ(Γ)·e^{t·h_typical}; μ(Γ) is bounded below
/// from `samples` stationary paths.
struct GenericSet {
    double t = 0;
    double h = 0;              // requested growth rate
    double h_typical = 0;      // cylinder threshold, between h and h_μ
    double eta = 0;
    double epsilon = 0;        // members are (t, 3ε)-separated
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    double mass_lower = 0;
    double log_count_lower = 0;
    std::vector<Word> members;  // distinct prefixes plus lookahead, each starting at coordinate 0
    double min_separation = 0;  // least sup_s d(f_s x, f_s y) over member pairs

    SuspPoint point(const FlowSystem& sys, std::size_t i) const;
};

GenericSet separated_generic_set(const FlowSystem& sys, const MarkovMeasure& mu, double h, double t, double eta,
                                 std::uint64_t seed, const GenericOptions& opt = {});

struct BlockCheck {
    std::size_t member = 0;
    int block = 0;
    double distance = 0;  // D(𝓔_c(f_{b_k} y), λ)
};

/// Φ_m: m blocks, each gluing one member of Γ_1, …, Γ_p.
struct GluedFamily {
    double t = 0;
    int m = 0;
    double eta = 0;
    std::vector<double> times;     // t_i = a_i·t
    std::vector<GenericSet> sets;
    double delta = 0;              // gluing scale
    double transition_bound = 0;   // τ·max r per transition
    double diameter = 0;           // M
    int partition = 0;             // k
    double log_c = 0;              // log C = p·log k
    /// m·Σ log #Γ_i − (mp−1)·log k
    double log_count_lower = 0;
    double rate = 0;               // log_count_lower / (t m)
    double rate_bound = 0;         // h_λ − η − (Σ h_i + log C)/t
    std::vector<BlockCheck> checks;
    double worst_check = 0;
    double min_pair_separation = 0;

    bool certified() const { return rate > rate_bound && worst_check <= 5 * eta && min_pair_separation > delta / 2; }
};

struct GlueOptions {
    GenericOptions generic;
    std::size_t glued_samples = 4;
};

GluedFamily glue_generic_family(const ApproxTarget& target, double t, int m, std::uint64_t seed, const GlueOptions& opt = {});

struct ApproxReport {
    MarkovMeasure nu;
    double block_time = 0;    // flow time of one pass through all components
    double distance = 0;      // D(λ, ν)
    double h_target = 0;
    double h_nu = 0;
};

/// Ergodic ν with D(λ, ν) < η and |h_ν − h_λ| < η: a block chain cycling through
/// the components, spending time ≈ a_i·T in μ_i and joining with shortest gaps.
ApproxReport ergodic_approximation(const ApproxTarget& target, const WeakStarConfig& cfg = {}, double max_block_time = 16384);

/// The block chain with pass time ≈ T, exposed for inspection.
MarkovMeasure block_chain(const ApproxTarget& target, double block_time);

}  // namespace thermoflow
