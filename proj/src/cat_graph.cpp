#include "thermoflow/cat_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "thermoflow/cycles.hpp"
#include "thermoflow/errors.hpp"

namespace thermoflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

MetricGraph::MetricGraph(int vertices, std::vector<GraphEdge> edges) : n_(vertices), edges_(std::move(edges)) {
    if (n_ < 1) throw ModelError("graph needs at least one vertex");
    std::vector<int> degree(static_cast<std::size_t>(n_), 0);
    std::vector<int> parent(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        return v;
    };
    for (const auto& e : edges_) {
        if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_) throw ModelError("edge endpoint out of range");
        if (!(e.length > 0) || !std::isfinite(e.length)) throw ModelError("edge lengths must be positive and finite");
        ++degree[static_cast<std::size_t>(e.from)];
        ++degree[static_cast<std::size_t>(e.to)];
        parent[static_cast<std::size_t>(find(e.from))] = find(e.to);
    }
    for (int v = 0; v < n_; ++v)
        if (find(v) != find(0)) throw ModelError("graph is not connected");
    if (betti() == 1) throw ModelError("fundamental group is Z: excluded case");
    if (betti() < 1) throw ModelError("elementary fundamental group");
    for (int v = 0; v < n_; ++v)
        if (degree[static_cast<std::size_t>(v)] <= 1) throw ModelError("vertex " + std::to_string(v) + " has degree <= 1");
}

FlowSystem build_edge_sft(const MetricGraph& g) {
    const auto& edges = g.edges();
    const std::size_t n = 2 * edges.size();
    auto tail = [&](std::size_t e) { return e % 2 == 0 ? edges[e / 2].from : edges[e / 2].to; };
    auto head = [&](std::size_t e) { return e % 2 == 0 ? edges[e / 2].to : edges[e / 2].from; };
    std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
    std::vector<std::string> names;
    std::vector<double> roof;
    for (std::size_t e = 0; e < n; ++e) {
        names.push_back("e" + std::to_string(e / 2) + (e % 2 ? "~" : ""));
        roof.push_back(edges[e / 2].length);
        for (std::size_t f = 0; f < n; ++f)
            if (head(e) == tail(f) && f != (e ^ 1U)) m[e][f] = 1;
    }
    Sft sft(m, names);
    if (!is_irreducible(sft)) throw SpecificationError();
    return FlowSystem(std::move(sft), std::move(roof));
}

int GraphFlow::tail(Symbol e) const {
    const auto& ed = graph_.edges()[static_cast<std::size_t>(e / 2)];
    return e % 2 == 0 ? ed.from : ed.to;
}

int GraphFlow::head(Symbol e) const {
    const auto& ed = graph_.edges()[static_cast<std::size_t>(e / 2)];
    return e % 2 == 0 ? ed.to : ed.from;
}

GraphFlow::GraphFlow(MetricGraph g) : graph_(std::move(g)), system_(build_edge_sft(graph_)) {
    const int nv = graph_.vertices();
    const auto ne = static_cast<Symbol>(system_.sft().size());

    vdist_.assign(static_cast<std::size_t>(nv * nv), kInf);
    for (int v = 0; v < nv; ++v) vdist_[static_cast<std::size_t>(v * nv + v)] = 0;
    for (const auto& e : graph_.edges()) {
        auto& a = vdist_[static_cast<std::size_t>(e.from * nv + e.to)];
        auto& b = vdist_[static_cast<std::size_t>(e.to * nv + e.from)];
        a = std::min(a, e.length);
        b = std::min(b, e.length);
    }
    for (int k = 0; k < nv; ++k)
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) {
                const double via = vdist_[static_cast<std::size_t>(i * nv + k)] + vdist_[static_cast<std::size_t>(k * nv + j)];
                auto& d = vdist_[static_cast<std::size_t>(i * nv + j)];
                if (via < d) d = via;
            }

    // shortest closed non-backtracking walk: Dijkstra on the edge graph from each edge back to itself
    using Item = std::pair<double, Symbol>;
    double shortest = kInf;
    for (Symbol start = 0; start < ne; ++start) {
        std::vector<double> dist(static_cast<std::size_t>(ne), kInf);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[static_cast<std::size_t>(start)] = length(start);
        pq.push({length(start), start});
        while (!pq.empty()) {
            auto [d, e] = pq.top();
            pq.pop();
            if (d > dist[static_cast<std::size_t>(e)]) continue;
            for (Symbol f : system_.sft().successors(e)) {
                if (f == start) shortest = std::min(shortest, d);
                const double nd = d + length(f);
                if (nd < dist[static_cast<std::size_t>(f)]) {
                    dist[static_cast<std::size_t>(f)] = nd;
                    pq.push({nd, f});
                }
            }
        }
    }
    epsilon0_ = shortest / 2;

    // bridges between transitions
    transition_index_.assign(static_cast<std::size_t>(ne * ne), -1);
    std::vector<std::pair<Symbol, Symbol>> trans;
    for (Symbol a = 0; a < ne; ++a)
        for (Symbol b : system_.sft().successors(a)) {
            transition_index_[static_cast<std::size_t>(a * ne + b)] = static_cast<int>(trans.size());
            trans.push_back({a, b});
        }
    transitions_ = trans.size();
    bridge_.assign(transitions_ * transitions_, kInf);
    for (std::size_t i = 0; i < transitions_; ++i) {
        const auto [in1, out1] = trans[i];
        const int u = head(in1);
        std::vector<double> dist(static_cast<std::size_t>(ne), kInf);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (Symbol e = 0; e < ne; ++e) {
            if (tail(e) != u || e == out1 || e == reverse(in1)) continue;
            dist[static_cast<std::size_t>(e)] = length(e);
            pq.push({length(e), e});
        }
        while (!pq.empty()) {
            auto [d, e] = pq.top();
            pq.pop();
            if (d > dist[static_cast<std::size_t>(e)]) continue;
            for (Symbol f : system_.sft().successors(e)) {
                const double nd = d + length(f);
                if (nd < dist[static_cast<std::size_t>(f)]) {
                    dist[static_cast<std::size_t>(f)] = nd;
                    pq.push({nd, f});
                }
            }
        }
        for (std::size_t j = 0; j < transitions_; ++j) {
            const auto [in2, out2] = trans[j];
            const int w = head(in2);
            double best = kInf;
            for (Symbol e = 0; e < ne; ++e)
                if (head(e) == w && e != reverse(out2) && e != in2) best = std::min(best, dist[static_cast<std::size_t>(e)]);
            bridge_[i * transitions_ + j] = best;
        }
    }
}

double GraphFlow::bridge(Symbol in1, Symbol out1, Symbol in2, Symbol out2) const {
    const auto ne = static_cast<Symbol>(system_.sft().size());
    const int i = transition_index_[static_cast<std::size_t>(in1 * ne + out1)];
    const int j = transition_index_[static_cast<std::size_t>(in2 * ne + out2)];
    return bridge_[static_cast<std::size_t>(i) * transitions_ + static_cast<std::size_t>(j)];
}

GraphPoint GraphFlow::position(const Geodesic& g) const {
    const Symbol e = g.base.at(0);
    GraphPoint p;
    p.edge = e / 2;
    p.offset = e % 2 == 0 ? g.height : length(e) - g.height;
    return p;
}

double GraphFlow::point_distance(const GraphPoint& p, const GraphPoint& q) const {
    const auto& ep = graph_.edges()[static_cast<std::size_t>(p.edge)];
    const auto& eq = graph_.edges()[static_cast<std::size_t>(q.edge)];
    const int pv[2] = {ep.from, ep.to};
    const double pd[2] = {p.offset, ep.length - p.offset};
    const int qv[2] = {eq.from, eq.to};
    const double qd[2] = {q.offset, eq.length - q.offset};
    double best = kInf;
    if (p.edge == q.edge) best = std::abs(p.offset - q.offset);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) best = std::min(best, pd[i] + vertex_distance(pv[i], qv[j]) + qd[j]);
    return best;
}

double GraphFlow::distance_at_zero(const Geodesic& a, const Geodesic& b) const {
    return point_distance(position(a), position(b));
}

// ------------------------------------------------------------------ lifts

struct GraphFlow::Alignment {
    double p1 = 0, p2 = 0;  // times at which the lifts pass the aligned vertices
    double bridge = 0;      // 0 for a shared vertex
    double c[2][2] = {{0, 0}, {0, 0}};  // common prefix of rays; index 0 forward, 1 backward

    double at(double t) const {
        const double a = t - p1, b = t - p2;
        const double da = std::abs(a), db = std::abs(b);
        if (bridge > 0) return da + bridge + db;
        const double c_ab = c[a >= 0 ? 0 : 1][b >= 0 ? 0 : 1];
        return da + db - 2 * std::min({da, db, c_ab});
    }
};

namespace {

// time from γ(0) back to the tail of fiber k
double fiber_time(const FlowSystem& sys, const Geodesic& g, long k) {
    double t = -g.height;
    for (long c = 0; c < k; ++c) t += sys.roof(g.base.at(c));
    for (long c = k; c < 0; ++c) t -= sys.roof(g.base.at(c));
    return t;
}

}  // namespace

std::vector<GraphFlow::Alignment> GraphFlow::alignments(const Geodesic& a, const Geodesic& b, double window_time,
                                                        double cap) const {
    struct Occ {
        long k;
        double p;
        Symbol in, out;
    };
    auto occurrences = [&](const Geodesic& g) {
        std::vector<Occ> out;
        long lo = 0;
        while (fiber_time(system_, g, lo) > -window_time) --lo;
        long hi = 0;
        while (fiber_time(system_, g, hi) < window_time) ++hi;
        double t = fiber_time(system_, g, lo);
        for (long k = lo; k <= hi; ++k) {
            if (std::abs(t) <= window_time) out.push_back({k, t, g.base.at(k - 1), g.base.at(k)});
            t += system_.roof(g.base.at(k));
        }
        return out;
    };
    const auto oa = occurrences(a);
    const auto ob = occurrences(b);

    auto ray = [&](const Geodesic& g, long k, int dir, long i) -> Symbol {
        return dir == 0 ? g.base.at(k + i) : reverse(g.base.at(k - 1 - i));
    };
    auto prefix = [&](long k1, int d1, long k2, int d2) {
        double len = 0;
        for (long i = 0;; ++i) {
            const Symbol e = ray(a, k1, d1, i);
            if (e != ray(b, k2, d2, i)) return len;
            len += length(e);
            if (len > cap) return kInf;
        }
    };

    std::vector<Alignment> out;
    for (const auto& x : oa) {
        for (const auto& y : ob) {
            Alignment al;
            al.p1 = x.p;
            al.p2 = y.p;
            if (tail(x.out) == tail(y.out)) {
                for (int d1 = 0; d1 < 2; ++d1)
                    for (int d2 = 0; d2 < 2; ++d2) al.c[d1][d2] = prefix(x.k, d1, y.k, d2);
                out.push_back(al);
            }
            const double br = bridge(x.in, x.out, y.in, y.out);
            if (std::isfinite(br) && std::abs(x.p) + br + std::abs(y.p) <= 2 * window_time + cap) {
                Alignment bl;
                bl.p1 = x.p;
                bl.p2 = y.p;
                bl.bridge = br;
                out.push_back(bl);
            }
        }
    }
    return out;
}

double GraphFlow::lift_distance(const Geodesic& a, const Geodesic& b, double t, int window) const {
    if (window < 1) throw ParameterError("window must be >= 1");
    for (const Geodesic* g : {&a, &b}) {
        const double lo = fiber_time(system_, *g, -window), hi = fiber_time(system_, *g, window + 1);
        if (t < lo || t > hi) throw ParameterError("insufficient unwinding");
    }
    double window_time = 0;
    for (const Geodesic* g : {&a, &b})
        window_time = std::max({window_time, -fiber_time(system_, *g, -window), fiber_time(system_, *g, window)});
    const double cap = 2 * window_time + std::abs(t) + max_length();
    const auto als = alignments(a, b, window_time, cap);
    const Alignment* best = nullptr;
    for (const auto& al : als) {
        if (al.bridge > 0) continue;
        if (!best || std::abs(al.p1) + std::abs(al.p2) < std::abs(best->p1) + std::abs(best->p2) - 1e-12 ||
            (std::abs(std::abs(al.p1) + std::abs(al.p2) - std::abs(best->p1) - std::abs(best->p2)) <= 1e-12 &&
             std::abs(al.p1 - al.p2) < std::abs(best->p1 - best->p2)))
            best = &al;
    }
    if (!best) {
        for (const auto& al : als)
            if (!best || al.at(0) < best->at(0)) best = &al;
    }
    if (!best) throw ParameterError("insufficient unwinding");
    return best->at(t);
}

namespace {

// ∫_u^v (α + βt) e^{−2|t|} dt for an interval not containing 0 in its interior
double piece_integral(double u, double v, double fu, double fv) {
    if (v <= u) return 0;
    const double beta = (fv - fu) / (v - u);
    const double alpha = fu - beta * u;
    if (u >= 0) {
        auto F = [&](double t) { return -std::exp(-2 * t) * (alpha / 2 + beta * t / 2 + beta / 4); };
        return F(v) - F(u);
    }
    auto G = [&](double t) { return std::exp(2 * t) * (alpha / 2 + beta * t / 2 - beta / 4); };
    return G(v) - G(u);
}

}  // namespace

DgxValue GraphFlow::dgx(const Geodesic& a, const Geodesic& b, double tail_horizon) const {
    check_point(system_, a);
    check_point(system_, b);
    if (tail_horizon < 1) throw ParameterError("tail_horizon must be >= 1");
    const double T = tail_horizon;

    auto integrate = [&](const Alignment& al) {
        std::vector<double> cuts{-T, 0.0, T, al.p1, al.p2, 0.5 * (al.p1 + al.p2)};
        if (al.bridge == 0) {
            for (const auto& row : al.c)
                for (double c : row)
                    if (std::isfinite(c))
                        for (double p : {al.p1, al.p2}) {
                            cuts.push_back(p + c);
                            cuts.push_back(p - c);
                        }
        }
        std::sort(cuts.begin(), cuts.end());
        double total = 0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double u = std::max(cuts[i], -T), v = std::min(cuts[i + 1], T);
            if (v <= u) continue;
            total += piece_integral(u, v, al.at(u), al.at(v));
        }
        const double tail = std::exp(-2 * T) * (al.at(T) / 2 + 0.5) + std::exp(-2 * T) * (al.at(-T) / 2 + 0.5);
        return DgxValue{total, tail};
    };

    // seed: nearest alignment, then widen to every alignment that could beat it
    const double cap = 4 * T + 4 * max_length();
    double window_time = 2 * max_length();
    auto seeds = alignments(a, b, window_time, cap);
    while (seeds.empty()) {
        window_time *= 2;
        seeds = alignments(a, b, window_time, cap);
    }
    // the value of a lift pair is at least its distance at time 0
    double upper = kInf;
    for (const auto& al : seeds) {
        const auto v = integrate(al);
        upper = std::min(upper, v.value + v.error);
    }
    const double reach = upper + max_length();
    const auto all = alignments(a, b, reach, cap + 2 * reach);
    DgxValue best{kInf, 0};
    double best_upper = kInf;
    for (const auto& al : all) {
        if (al.at(0) > best_upper) continue;
        const auto v = integrate(al);
        if (v.value < best.value) best.value = v.value;
        best_upper = std::min(best_upper, v.value + v.error);
    }
    best.error = best_upper - best.value;
    return best;
}

std::vector<ClosedGeodesic> GraphFlow::closed_geodesics(double max_period) const {
    if (!(max_period > 0)) throw ParameterError("max_period must be positive");
    std::vector<ClosedGeodesic> out;
    for_each_primitive_cycle(system_.sft(), system_.roof(), max_period * (1 + 1e-12),
                             [&](std::span<const Symbol> w, double len) {
                                 out.push_back({Word(w.begin(), w.end()), len});
                             });
    std::sort(out.begin(), out.end(), [](const ClosedGeodesic& x, const ClosedGeodesic& y) {
        return x.period != y.period ? x.period < y.period : x.cycle < y.cycle;
    });
    return out;
}

Geodesic GraphFlow::periodic_geodesic(const Word& cycle, double phase) const {
    const SuspPoint start{BiWord::periodic(system_.sft(), cycle), 0.0};
    return flow(system_, start, phase);
}

}  // namespace thermoflow
