#include "thermoflow/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermoflow/errors.hpp"

namespace thermoflow {

FlowSystem::FlowSystem(Sft sft, std::vector<double> roof) : sft_(std::move(sft)), roof_(std::move(roof)) {
    if (roof_.size() != sft_.size()) throw ModelError("roof must have one value per symbol");
    for (double r : roof_)
        if (!(r > 0) || !std::isfinite(r)) throw ModelError("roof values must be positive and finite");
    max_roof_ = *std::max_element(roof_.begin(), roof_.end());
    min_roof_ = *std::min_element(roof_.begin(), roof_.end());
}

void check_point(const FlowSystem& sys, const SuspPoint& p) {
    const auto& b = p.base;
    const auto n = static_cast<Symbol>(sys.sft().size());
    auto in_range = [n](const Word& w) {
        return std::all_of(w.begin(), w.end(), [n](Symbol s) { return s >= 0 && s < n; });
    };
    if (b.left_tail().empty() || !in_range(b.left_tail()) || !in_range(b.core()) || !in_range(b.right_tail()))
        throw ModelError("point does not belong to this system");
    if (!(p.height >= 0) || p.height >= sys.roof(b.at(0))) throw ModelError("point height outside its fiber");
}

SuspPoint flow(const FlowSystem& sys, const SuspPoint& p, double t) {
    double h = p.height + t;
    long k = 0;
    while (h >= sys.roof(p.base.at(k))) {
        h -= sys.roof(p.base.at(k));
        ++k;
    }
    while (h < 0) {
        --k;
        h += sys.roof(p.base.at(k));
    }
    // a backward step can land exactly on the roof after rounding
    if (h >= sys.roof(p.base.at(k))) {
        h = 0;
        ++k;
    }
    if (k == 0) return {p.base, h};
    return {p.base.shifted(k), h};
}

namespace {

double symdist_offset(const BiWord& x, long kx, const BiWord& y, long ky, int horizon) {
    for (int n = 0; n <= horizon; ++n) {
        if (x.at(kx + n) != y.at(ky + n) || x.at(kx - n) != y.at(ky - n)) return std::ldexp(1.0, -n);
    }
    return 0.0;
}

struct Window {
    long lo = 0, hi = 0;  // inclusive coordinates of the source point
    long fibers = 0;      // K: fiber index holding the end point
    Word word;
};

Window segment_window(const FlowSystem& sys, const OrbitSegment& seg, int m, double rho) {
    if (!(seg.duration >= 0) || !std::isfinite(seg.duration)) throw ParameterError("segment duration must be finite and >= 0");
    const auto& x = seg.start.base;
    double h = seg.start.height + seg.duration;
    long k = 0;
    while (h >= sys.roof(x.at(k))) {
        h -= sys.roof(x.at(k));
        ++k;
    }
    const double w_end = h / sys.roof(x.at(k));
    const double w_start = seg.start.height / sys.roof(x.at(0));
    Window win;
    win.fibers = k;
    win.hi = k + m + 1;
    bool trimmed_end = false;
    if (w_end < rho - 1) {
        win.hi = k + m;
        trimmed_end = true;
    }
    win.lo = -m;
    if (m >= 1 && w_start > 2 - rho && !(k == 0 && trimmed_end)) win.lo = -(m - 1);
    win.word = x.window(win.lo, win.hi - win.lo + 1);
    return win;
}

}  // namespace

double symbolic_distance(const BiWord& x, const BiWord& y, int horizon) { return symdist_offset(x, 0, y, 0, horizon); }

namespace {

// time from the bottom of fiber 0 to the bottom of fiber i along the orbit
double fiber_offset(const FlowSystem& sys, const BiWord& x, long i) {
    double t = 0;
    for (long c = 0; c < i; ++c) t += sys.roof(x.at(c));
    for (long c = i; c < 0; ++c) t -= sys.roof(x.at(c));
    return t;
}

constexpr long kShiftReach = 2;

double bw_one_way(const FlowSystem& sys, const SuspPoint& p, const SuspPoint& q, int horizon) {
    const BiWord& x = p.base;
    const BiWord& y = q.base;
    double off_x[2 * kShiftReach + 2], off_y[2 * kShiftReach + 2];
    for (long i = -kShiftReach; i <= kShiftReach + 1; ++i) {
        off_x[i + kShiftReach] = fiber_offset(sys, x, i);
        off_y[i + kShiftReach] = fiber_offset(sys, y, i);
    }
    double best = std::numeric_limits<double>::infinity();
    for (long i = -kShiftReach; i <= kShiftReach; ++i) {
        const double bx = off_x[i + kShiftReach], rx = sys.roof(x.at(i));
        for (long j = -kShiftReach; j <= kShiftReach; ++j) {
            const double by = off_y[j + kShiftReach], ry = sys.roof(y.at(j));
            // vertical legs alone already cost this much
            const double floor_cost = std::max(0.0, std::max(bx - p.height, p.height - bx - rx)) +
                                      std::max(0.0, std::max(by - q.height, q.height - by - ry));
            if (floor_cost >= best) continue;
            const double d0 = symdist_offset(x, i, y, j, horizon);
            const double d1 = symdist_offset(x, i + 1, y, j + 1, horizon);
            const double wp = std::clamp((p.height - bx) / rx, 0.0, 1.0);
            const double wq = std::clamp((q.height - by) / ry, 0.0, 1.0);
            for (double w : {0.0, 1.0, wp, wq}) {
                const double cost = std::abs(bx + w * rx - p.height) + (1 - w) * d0 + w * d1 +
                                    std::abs(by + w * ry - q.height);
                best = std::min(best, cost);
            }
        }
    }
    return best;
}

bool point_less(const SuspPoint& a, const SuspPoint& b) {
    if (a.height != b.height) return a.height < b.height;
    if (a.base.origin() != b.base.origin()) return a.base.origin() < b.base.origin();
    if (a.base.core() != b.base.core()) return a.base.core() < b.base.core();
    if (a.base.left_tail() != b.base.left_tail()) return a.base.left_tail() < b.base.left_tail();
    return a.base.right_tail() < b.base.right_tail();
}

}  // namespace

double bw_distance(const FlowSystem& sys, const SuspPoint& p, const SuspPoint& q, int horizon) {
    check_point(sys, p);
    check_point(sys, q);
    if (horizon < 1) throw ParameterError("horizon must be >= 1");
    // evaluate in a fixed order so the result is exactly symmetric
    return point_less(q, p) ? bw_one_way(sys, q, p, horizon) : bw_one_way(sys, p, q, horizon);
}

double shadow_sup(const FlowSystem& sys, const SuspPoint& y, const OrbitSegment& seg, double delta, int horizon) {
    if (!(delta > 0)) throw ParameterError("delta must be positive");
    const double t = seg.duration;
    const long steps = std::max(1L, static_cast<long>(std::ceil(t / (delta / 4))));
    const double step = t / static_cast<double>(steps);
    double worst = bw_distance(sys, y, seg.start, horizon);
    SuspPoint a = y, b = seg.start;
    for (long i = 1; i <= steps; ++i) {
        if (step == 0) break;
        a = flow(sys, a, step);
        b = flow(sys, b, step);
        worst = std::max(worst, bw_distance(sys, a, b, horizon));
    }
    return worst;
}

bool shadows(const FlowSystem& sys, const SuspPoint& y, const OrbitSegment& seg, double delta, int horizon) {
    return shadow_sup(sys, y, seg, delta, horizon) < delta;
}

int margin_for(double delta) {
    if (!(delta > 0)) throw ParameterError("delta must be positive");
    int m = 0;
    while (std::ldexp(1.0, -(m + 1)) >= delta) ++m;
    return m;
}

int symbolic_transition_bound(const Sft& sft, double delta) { return min_gap_bound(sft) + 2 * margin_for(delta); }

double nominal_transition_bound(const FlowSystem& sys, double delta) {
    return (symbolic_transition_bound(sys.sft(), delta) + 2) * sys.max_roof();
}

double max_transition_time(const FlowSystem& sys, double delta) {
    return (symbolic_transition_bound(sys.sft(), delta) + 3) * sys.max_roof();
}

double closing_constant(const FlowSystem& sys, double delta) { return max_transition_time(sys, delta); }

GluingResult glue_segments(const FlowSystem& sys, const std::vector<OrbitSegment>& segs, double delta) {
    if (segs.empty()) throw ParameterError("glue_segments needs at least one segment");
    const Sft& sft = sys.sft();
    if (!is_irreducible(sft)) throw SpecificationError();
    for (const auto& s : segs) check_point(sys, s.start);
    const int m = margin_for(delta);
    const double rho = delta * std::ldexp(1.0, m + 1);

    std::vector<Window> wins;
    for (const auto& s : segs) wins.push_back(segment_window(sys, s, m, rho));

    const BiWord& first = segs.front().start.base;
    const BiWord& last = segs.back().start.base;

    // left extension: x_1 on [A, lo_1) with A aligned to the left tail period
    const long lt = static_cast<long>(first.left_tail().size());
    long A = -first.origin();
    while (A > wins.front().lo) A -= lt;
    const long rt = static_cast<long>(last.right_tail().size());
    long B = static_cast<long>(last.core().size()) - last.origin();
    while (B < wins.back().hi + 1) B += rt;

    Word core = first.window(A, wins.front().lo - A);
    GluingResult out;
    out.margin = m;
    std::vector<long> window_start;  // y coordinate where each window begins
    for (std::size_t j = 0; j < wins.size(); ++j) {
        const long here = static_cast<long>(core.size()) + A;  // y coordinate of the next symbol
        window_start.push_back(here);
        out.segment_fibers.push_back(here - wins[j].lo);
        core.insert(core.end(), wins[j].word.begin(), wins[j].word.end());
        out.window_ends.push_back(here + static_cast<long>(wins[j].word.size()) - 1);
        if (j + 1 < wins.size()) {
            const Word gap = glue_words(sft, wins[j].word, wins[j + 1].word);
            core.insert(core.end(), gap.begin(), gap.end());
        }
    }
    const Word tail = last.window(wins.back().hi + 1, B - wins.back().hi - 1);
    core.insert(core.end(), tail.begin(), tail.end());

    const BiWord y = BiWord::make(sft, first.left_tail(), core, last.right_tail(), -A);
    out.point = {y, segs.front().start.height};

    out.block_starts.push_back(0.0);
    for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
        double span = 0;
        for (long c = out.segment_fibers[j]; c < out.segment_fibers[j + 1]; ++c) span += sys.roof(y.at(c));
        const double tau = span - segs[j].start.height + segs[j + 1].start.height - segs[j].duration;
        out.transition_times.push_back(std::max(0.0, tau));
        const double prev_tau = j == 0 ? 0.0 : out.transition_times[j - 1];
        out.block_starts.push_back(out.block_starts.back() + prev_tau + segs[j].duration);
    }
    return out;
}

CloseResult close_segment(const FlowSystem& sys, const OrbitSegment& seg, double delta) {
    const Sft& sft = sys.sft();
    if (!is_irreducible(sft)) throw SpecificationError();
    check_point(sys, seg.start);
    const int m = margin_for(delta);
    const double rho = delta * std::ldexp(1.0, m + 1);
    const Window win = segment_window(sys, seg, m, rho);
    // a window that already repeats closes up without a gap
    const auto n = win.word.size();
    std::size_t period = n;
    for (std::size_t p = 1; p < n; ++p) {
        bool repeats = true;
        for (std::size_t i = p; i < n && repeats; ++i) repeats = win.word[i] == win.word[i - p];
        if (repeats) {
            period = p;
            break;
        }
    }
    Word cyc(win.word.begin(), win.word.begin() + static_cast<long>(period));
    if (period == n) {
        const Word gap = glue_words(sft, win.word, win.word);
        cyc.insert(cyc.end(), gap.begin(), gap.end());
    }

    CloseResult out;
    const BiWord base = BiWord::periodic(sft, cyc, -win.lo);
    out.orbit.point = {base, seg.start.height};
    out.orbit.cycle = base.left_tail();
    double length = 0;
    for (Symbol s : out.orbit.cycle) length += sys.roof(s);
    out.orbit.period = length;
    out.excess = length - seg.duration;
    out.sup_distance = shadow_sup(sys, out.orbit.point, seg, delta);
    return out;
}

CountableGlue glue_countable(const FlowSystem& sys, const std::function<OrbitSegment(std::size_t)>& stream, double delta,
                             std::size_t depth) {
    if (depth == 0) throw ParameterError("glue_countable: depth must be >= 1");
    std::vector<OrbitSegment> segs;
    for (std::size_t i = 0; i < depth; ++i) segs.push_back(stream(i));
    CountableGlue out;
    out.detail = glue_segments(sys, segs, delta);
    out.point = out.detail.point;
    out.stable_through = out.detail.window_ends.back();
    return out;
}

}  // namespace thermoflow
