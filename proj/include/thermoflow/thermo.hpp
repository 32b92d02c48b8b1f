#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "thermoflow/potential.hpp"

namespace thermoflow {

using SparseRow = std::vector<std::pair<int, double>>;
using SparseMatrix = std::vector<SparseRow>;

/// Stationary Markov chain on a finite state set; every state emits one symbol
/// of an Sft. States are plain symbols, higher blocks, or (phase, symbol) pairs.
/// Entropy and cylinder formulas below assume the state path is recoverable
/// from the emitted symbols up to a deterministic phase, which holds for all
/// chains built in this library.
class MarkovMeasure {
public:
    /// Computes π when `pi` is empty, otherwise validates it.
    MarkovMeasure(const Sft& sft, std::vector<Symbol> emit, SparseMatrix kernel, std::vector<double> pi = {});

    /// States are the symbols.
    static MarkovMeasure from_matrix(const Sft& sft, const std::vector<std::vector<double>>& p);
    /// i.i.d. letters; every transition of sft must be allowed.
    static MarkovMeasure bernoulli(const Sft& sft, const std::vector<double>& p);

    std::size_t states() const noexcept { return emit_.size(); }
    Symbol emit(int s) const { return emit_[static_cast<std::size_t>(s)]; }
    const std::vector<Symbol>& emissions() const noexcept { return emit_; }
    const SparseRow& row(int s) const { return kernel_[static_cast<std::size_t>(s)]; }
    const SparseMatrix& kernel() const noexcept { return kernel_; }
    const SparseMatrix& reverse_kernel() const noexcept { return reverse_; }
    const std::vector<double>& pi() const noexcept { return pi_; }
    std::size_t alphabet() const noexcept { return alphabet_; }

    /// −Σ π_i P_ij log P_ij
    double entropy() const;
    /// Probability that coordinates 0 … |w|−1 read w.
    double cylinder(std::span<const Symbol> w) const;

    /// Draw the states at coordinates 0 … len−1 of a stationary path whose
    /// state at `pivot` has law proportional to π·weight.
    std::vector<int> sample_path(std::mt19937_64& rng, int len, int pivot, const std::vector<double>& weight) const;

private:
    std::size_t alphabet_ = 0;
    std::vector<Symbol> emit_;
    SparseMatrix kernel_;
    SparseMatrix reverse_;  // time-reversed kernel
    std::vector<double> pi_;
};

/// Flow-invariant measure: base chain times Lebesgue on fibers, normalized.
struct SuspendedMeasure {
    FlowSystem system;
    MarkovMeasure base;
    double mean_roof = 0;

    SuspendedMeasure(FlowSystem sys, MarkovMeasure m);
    double state_roof(int s) const { return system.roof(base.emit(s)); }
};

/// Uniformly random kernel supported on the transitions (Dirichlet(1) rows).
MarkovMeasure random_markov(const Sft& sft, std::mt19937_64& rng);

struct PerronData {
    double value = 0;
    std::vector<double> right;
    std::vector<double> left;
    int iterations = 0;
};

/// Perron root and eigenvectors of a nonnegative irreducible matrix, by power
/// iteration on M + I from the all-ones vector. Stops when the Collatz–Wielandt
/// bounds agree to 1e−13 relative; throws ConvergenceError after 10⁵ steps.
PerronData perron(const SparseMatrix& m);

enum class PressureMethod { spectral, separated, gurevic };
std::string to_string(PressureMethod m);
PressureMethod pressure_method(const std::string& name);

struct PressureOptions {
    double horizon = 12;          // t for separated, max period for gurevic
    int grid_points = 13;         // regression grid on [horizon/2, horizon]
    double bracket = 1e-11;       // spectral bisection width
    std::vector<int> approx_widths{2, 4, 6};
};

struct PressureResult {
    double value = 0;
    double error = 0;
    PressureMethod method = PressureMethod::spectral;
    std::vector<std::pair<std::string, double>> diagnostics;
};

/// M(s)_{uv} = exp(φ̂(u) − s r(u)) on the allowed block transitions.
SparseMatrix pressure_matrix(const BlockSystem& b, double s);

PressureResult pressure(const FlowSystem& sys, const Potential& phi, PressureMethod method, const PressureOptions& opt = {});

/// Gibbs measure of a cylinder potential from Perron data of M(P).
SuspendedMeasure equilibrium_state(const FlowSystem& sys, const Potential& phi, int approx_width = 6);

struct EntropyMean {
    double entropy = 0;  // flow entropy h_base / mean roof
    double mean = 0;     // ∫φ dμ
};

EntropyMean entropy_and_mean(const SuspendedMeasure& mu, const Potential& phi, int approx_width = 6);

/// Scale below which distinct orbits are told apart: ½·min(1, min roof).
double expansivity_scale(const FlowSystem& sys);

/// μ(B_t(x, ρ)): cylinder of the symbols within margin_for(ρ) of the fibers
/// visited on [0, t], times the height window [h−ρ, h+ρ] clipped to the fiber.
double ball_measure(const SuspendedMeasure& mu, const SuspPoint& x, double t, double rho);

struct GibbsStats {
    std::vector<double> t;
    std::vector<double> min_ratio;
    std::vector<double> max_ratio;
    double pressure = 0;
    double band(std::size_t i) const { return max_ratio[i] / min_ratio[i]; }
};

/// Ratios μ(B_t(x,ρ)) / e^{−tP(φ)+Φ(x,t)} over μ-distributed points x.
GibbsStats gibbs_ratio_stats(const SuspendedMeasure& mu, const Potential& phi, double rho, const std::vector<double>& t_grid,
                             int samples, std::uint64_t seed);

struct BowenTable {
    std::vector<double> s;
    std::vector<double> v;
    std::vector<int> pairs;  // accepted shadowing pairs per S
};

/// sup |Φ(x,S) − Φ(y,S)| over sampled pairs whose orbits stay ε-close on [0, S].
BowenTable bowen_constant_estimate(const FlowSystem& sys, const Potential& phi, double eps, const std::vector<double>& s_grid,
                                   int samples, std::uint64_t seed);

}  // namespace thermoflow
