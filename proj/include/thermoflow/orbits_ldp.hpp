#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "thermoflow/statistics.hpp"

namespace thermoflow {

struct WeightedOrbits {
    EmpiricalMeasure measure;
    double normalizer = 0;     // C(t) = Σ e^{Φ(γ)}
    std::size_t orbits = 0;
};

/// (1/C(t)) Σ_{γ ∈ Per(t)} e^{Φ(γ)} μ_γ over primitive closed orbits of least period ≤ t.
WeightedOrbits weighted_orbit_measure(const FlowSystem& sys, const Potential& phi, double t, const WeakStarConfig& cfg = {},
                                      int threads = 1);

enum class RateMethod { legendre, direct };

struct RatePoint {
    double eps = 0;
    double q = 0;  // +∞ when no invariant measure meets the constraint
};

struct RateTable {
    double pressure = 0;
    double mean = 0;           // ∫ψ dm for the equilibrium state m of φ
    double psi_min = 0;        // range of ∫ψ over invariant measures
    double psi_max = 0;
    double grid_step = 0;      // direct method kernel grid, 0 for legendre
    std::vector<RatePoint> points;
};

/// q(ε) = P(φ) − sup{h_ν + ∫φ dν : |∫ψ dν − ∫ψ dm| ≥ ε}.
/// legendre: q̃(u) = sup_β βu − (P(φ+βψ) − P(φ)) by golden section on |β| ≤ 20/‖ψ‖.
/// direct: maximize over Markov kernels on a simplex grid with the given step.
RateTable rate_function(const FlowSystem& sys, const CylinderPotential& phi, const CylinderPotential& psi,
                        const std::vector<double>& eps_grid, RateMethod method, double grid_step = 0.02);

/// Least and largest ∫ψ over invariant measures (extreme cycle means).
std::pair<double, double> observable_range(const FlowSystem& sys, const CylinderPotential& psi);

struct DeviationResult {
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    double frequency = 0;
    double log_rate = 0;   // (1/t) log frequency; −∞ with no hits
    double ci_lo = 0;      // 95% Wilson interval, on the log-rate scale
    double ci_hi = 0;
    bool resolved = true;  // at least 10 hits
};

/// Monte Carlo estimate of m{x : |(1/t)∫₀ᵗ ψ(f_s x) ds − ∫ψ dm| ≥ ε}.
/// Sample i draws from its own generator seeded by (seed, i), so the result
/// does not depend on `threads`.
DeviationResult deviation_frequency(const SuspendedMeasure& m, const CylinderPotential& psi, double eps, double t,
                                    std::uint64_t samples, std::uint64_t seed, int threads = 1);

}  // namespace thermoflow
