#pragma once

#include <string>
#include <vector>

#include "thermoflow/suspension.hpp"

namespace thermoflow {

struct GraphEdge {
    int from = 0;
    int to = 0;
    double length = 1;
};

/// Compact metric graph. Connected, first Betti number ≥ 2, every vertex of
/// degree ≥ 2 (loops count twice).
class MetricGraph {
public:
    MetricGraph(int vertices, std::vector<GraphEdge> edges);

    int vertices() const noexcept { return n_; }
    const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
    int betti() const noexcept { return static_cast<int>(edges_.size()) - n_ + 1; }

private:
    int n_;
    std::vector<GraphEdge> edges_;
};

/// Geodesics are points of the suspension of the non-backtracking edge shift:
/// the base word lists directed edges, the height is the distance already
/// travelled along edge 0. Time is arclength.
using Geodesic = SuspPoint;

struct ClosedGeodesic {
    Word cycle;  // Lyndon representative of directed edges
    double period = 0;
};

struct GraphPoint {
    int edge = 0;         // undirected edge index
    double offset = 0;    // distance from edges[edge].from
};

struct DgxValue {
    double value = 0;  // integral over [−T, T] for the best lift pair
    double error = 0;  // tail allowance; the metric lies in [value, value + error]
};

/// Directed edge 2i runs from→to along edge i, 2i+1 runs back.
/// Transition e→e′ allowed iff head(e) = tail(e′) and e′ ≠ reverse(e).
FlowSystem build_edge_sft(const MetricGraph& g);

class GraphFlow {
public:
    explicit GraphFlow(MetricGraph g);

    const MetricGraph& graph() const noexcept { return graph_; }
    const FlowSystem& system() const noexcept { return system_; }

    int tail(Symbol e) const;
    int head(Symbol e) const;
    static Symbol reverse(Symbol e) noexcept { return e ^ 1; }
    double length(Symbol e) const { return system_.roof(e); }
    double max_length() const noexcept { return system_.max_roof(); }
    double min_length() const noexcept { return system_.min_roof(); }

    /// Half the length of the shortest closed geodesic.
    double epsilon0() const noexcept { return epsilon0_; }
    /// Separation scale used for expansivity and pressure; equals ε₀.
    double expansivity_scale() const noexcept { return epsilon0_; }

    double vertex_distance(int u, int w) const { return vdist_[static_cast<std::size_t>(u * graph_.vertices() + w)]; }
    GraphPoint position(const Geodesic& g) const;
    double point_distance(const GraphPoint& p, const GraphPoint& q) const;
    /// d_X(γ1(0), γ2(0))
    double distance_at_zero(const Geodesic& a, const Geodesic& b) const;

    /// Tree distance at time t between lifts synchronized at the shared vertex
    /// nearest to time 0 within ±window edges.
    double lift_distance(const Geodesic& a, const Geodesic& b, double t, int window) const;

    DgxValue dgx(const Geodesic& a, const Geodesic& b, double tail_horizon = 12) const;

    std::vector<ClosedGeodesic> closed_geodesics(double max_period) const;

    /// Geodesic running around a closed word, at arclength offset `phase`.
    Geodesic periodic_geodesic(const Word& cycle, double phase = 0) const;

private:
    struct Alignment;
    std::vector<Alignment> alignments(const Geodesic& a, const Geodesic& b, double window_time, double cap) const;
    double bridge(Symbol in1, Symbol out1, Symbol in2, Symbol out2) const;

    MetricGraph graph_;
    FlowSystem system_;
    double epsilon0_ = 0;
    std::vector<double> vdist_;
    // shortest non-backtracking bridge lengths between transitions (in, out) at a vertex
    std::vector<int> transition_index_;
    std::vector<double> bridge_;
    std::size_t transitions_ = 0;
};

}  // namespace thermoflow
