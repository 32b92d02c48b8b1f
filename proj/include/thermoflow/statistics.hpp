#pragma once

#include <vector>

#include "thermoflow/thermo.hpp"

namespace thermoflow {

/// Truncation of the weak* metric D: cylinders up to `depth` with weight
/// decay^k at depth k, plus a fiber-height histogram.
struct WeakStarConfig {
    int depth = 6;
    double decay = 0.5;
    double height_bin = 0;     // 0: one eighth of the least roof
    double height_weight = 0.5;
};

/// Time-weighted cylinder frequencies (word read forward from the current
/// fiber) and the fraction of time spent in each height bin.
class EmpiricalMeasure {
public:
    EmpiricalMeasure(const FlowSystem& sys, const WeakStarConfig& cfg);

    int depth() const noexcept { return depth_; }
    std::size_t alphabet() const noexcept { return n_; }
    double bin_width() const noexcept { return bin_; }
    double decay() const noexcept { return decay_; }
    double height_weight() const noexcept { return height_weight_; }

    double frequency(std::span<const Symbol> w) const;
    const std::vector<double>& table(int k) const { return freq_[static_cast<std::size_t>(k - 1)]; }
    const std::vector<double>& heights() const noexcept { return heights_; }
    double mass() const;

    /// this += c·other
    void accumulate(const EmpiricalMeasure& other, double c);
    void scale(double c);
    /// Largest violation of Σ_a freq(wa) = freq(w).
    double marginal_defect() const;

    /// Adds residence `time` on a fiber whose forward word starts at `word`
    /// (length ≥ depth) and occupies heights [h0, h0 + time).
    void add_fiber(std::span<const Symbol> word, double h0, double time);
    /// Adds `mass` to the cylinder tables only.
    void add_word(std::span<const Symbol> word, double mass);
    /// Adds `mass` to the single table entry of w.
    void add_cylinder(std::span<const Symbol> w, double mass);
    /// Adds `mass` spread uniformly over heights [a, b).
    void add_heights(double a, double b, double mass);

private:
    std::size_t n_;
    int depth_;
    double decay_, height_weight_, bin_;
    std::vector<std::vector<double>> freq_;
    std::vector<double> heights_;
};

EmpiricalMeasure empirical_measure(const FlowSystem& sys, const SuspPoint& x, double t, const WeakStarConfig& cfg = {});
/// μ_γ, exact residence frequencies around a cyclic word.
EmpiricalMeasure orbit_measure(const FlowSystem& sys, std::span<const Symbol> cycle, const WeakStarConfig& cfg = {});
/// Statistics of a flow-invariant Markov measure, exact from (π, P).
EmpiricalMeasure measure_statistics(const SuspendedMeasure& mu, const WeakStarConfig& cfg = {});

double weak_star_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double weak_star_distance(const EmpiricalMeasure& a, const SuspendedMeasure& b);

/// Upper bound on D between any two probability statistics.
double weak_star_diameter(const EmpiricalMeasure& shape);

}  // namespace thermoflow
