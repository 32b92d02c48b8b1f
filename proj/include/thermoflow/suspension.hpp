#pragma once

#include <functional>
#include <vector>

#include "thermoflow/sft.hpp"

namespace thermoflow {

/// Shift plus a positive roof, one value per symbol.
class FlowSystem {
public:
    FlowSystem(Sft sft, std::vector<double> roof);

    const Sft& sft() const noexcept { return sft_; }
    const std::vector<double>& roof() const noexcept { return roof_; }
    double roof(Symbol s) const { return roof_[static_cast<std::size_t>(s)]; }
    double max_roof() const noexcept { return max_roof_; }
    double min_roof() const noexcept { return min_roof_; }

    friend bool operator==(const FlowSystem& a, const FlowSystem& b) { return a.sft_ == b.sft_ && a.roof_ == b.roof_; }

private:
    Sft sft_;
    std::vector<double> roof_;
    double max_roof_ = 0, min_roof_ = 0;
};

/// Point (x, s) of the suspension with 0 ≤ s < r(x₀).
struct SuspPoint {
    BiWord base;
    double height = 0;
    friend bool operator==(const SuspPoint&, const SuspPoint&) = default;
};

struct OrbitSegment {
    SuspPoint start;
    double duration = 0;
};

struct GluingResult {
    SuspPoint point;
    /// τ_1 … τ_{k−1}
    std::vector<double> transition_times;
    /// s_0 = 0 and s_j = Σ_{i≤j} t_i + Σ_{i<j} τ_i; segment j+1 starts at s_j + τ_j.
    std::vector<double> block_starts;
    /// base coordinate of the point at which each segment starts
    std::vector<long> segment_fibers;
    /// last coordinate of each copied window
    std::vector<long> window_ends;
    int margin = 0;
};

struct ClosedOrbit {
    Word cycle;  // Lyndon representative
    double period = 0;
    SuspPoint point;  // the point that shadows the segment
};

struct CloseResult {
    ClosedOrbit orbit;
    double sup_distance = 0;
    double excess = 0;  // period − duration
};

void check_point(const FlowSystem& sys, const SuspPoint& p);

/// φ_t. Negative t flows backwards.
SuspPoint flow(const FlowSystem& sys, const SuspPoint& p, double t);

/// 2^{-n}, n the least |i| ≤ horizon with x_i ≠ y_i; 0 when none.
double symbolic_distance(const BiWord& x, const BiWord& y, int horizon);

/// Bowen–Walters distance restricted to chains with at most one crossing.
/// Horizontal legs sit at normalized height s/r(x₀).
double bw_distance(const FlowSystem& sys, const SuspPoint& p, const SuspPoint& q, int horizon = 32);

/// Largest bw_distance(φ_s y, φ_s x) over s on a grid of [0, t] with step ≤ δ/4.
double shadow_sup(const FlowSystem& sys, const SuspPoint& y, const OrbitSegment& seg, double delta, int horizon = 32);
bool shadows(const FlowSystem& sys, const SuspPoint& y, const OrbitSegment& seg, double delta, int horizon = 32);

/// Least m ≥ 0 with 2^{-(m+1)} < δ: symbols matched on each side to stay δ-close.
int margin_for(double delta);

/// Transition time bound of the gluing at scale δ in symbols, τ(δ) = min_gap_bound + 2m(δ).
int symbolic_transition_bound(const Sft& sft, double delta);

/// (τ(δ)+2)·max r; attained whenever δ·2^{m+1} ≥ 3/2.
double nominal_transition_bound(const FlowSystem& sys, double delta);
/// (τ(δ)+3)·max r; holds for every δ.
double max_transition_time(const FlowSystem& sys, double delta);
/// Period excess of close_segment, (τ(δ)+3)·max r.
double closing_constant(const FlowSystem& sys, double delta);

GluingResult glue_segments(const FlowSystem& sys, const std::vector<OrbitSegment>& segs, double delta);

CloseResult close_segment(const FlowSystem& sys, const OrbitSegment& seg, double delta);

struct CountableGlue {
    SuspPoint point;
    /// coordinates ≤ stable_through never change when more segments are added
    long stable_through = 0;
    GluingResult detail;
};

CountableGlue glue_countable(const FlowSystem& sys, const std::function<OrbitSegment(std::size_t)>& stream, double delta,
                             std::size_t depth);

}  // namespace thermoflow
