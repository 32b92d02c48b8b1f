#include "thermoflow/statistics.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "thermoflow/errors.hpp"

namespace thermoflow {

EmpiricalMeasure::EmpiricalMeasure(const FlowSystem& sys, const WeakStarConfig& cfg)
    : n_(sys.sft().size()), depth_(cfg.depth), decay_(cfg.decay), height_weight_(cfg.height_weight),
      bin_(cfg.height_bin > 0 ? cfg.height_bin : sys.min_roof() / 8) {
    if (depth_ < 1) throw ParameterError("weak* depth must be at least 1");
    if (!(decay_ > 0 && decay_ < 1)) throw ParameterError("weak* decay must lie in (0, 1)");
    std::size_t size = 1;
    for (int k = 1; k <= depth_; ++k) {
        size *= n_;
        freq_.emplace_back(size, 0.0);
    }
    heights_.assign(static_cast<std::size_t>(std::ceil(sys.max_roof() / bin_ - 1e-9)), 0.0);
}

double EmpiricalMeasure::frequency(std::span<const Symbol> w) const {
    if (w.empty() || static_cast<int>(w.size()) > depth_) throw ParameterError("word length outside the statistics depth");
    std::size_t c = 0;
    for (Symbol s : w) c = c * n_ + static_cast<std::size_t>(s);
    return freq_[w.size() - 1][c];
}

double EmpiricalMeasure::mass() const { return std::accumulate(freq_[0].begin(), freq_[0].end(), 0.0); }

void EmpiricalMeasure::accumulate(const EmpiricalMeasure& o, double c) {
    if (o.n_ != n_ || o.depth_ != depth_ || o.heights_.size() != heights_.size()) throw ParameterError("depth mismatch between statistics");
    for (std::size_t k = 0; k < freq_.size(); ++k)
        for (std::size_t i = 0; i < freq_[k].size(); ++i) freq_[k][i] += c * o.freq_[k][i];
    for (std::size_t i = 0; i < heights_.size(); ++i) heights_[i] += c * o.heights_[i];
}

void EmpiricalMeasure::scale(double c) {
    for (auto& t : freq_)
        for (double& v : t) v *= c;
    for (double& v : heights_) v *= c;
}

double EmpiricalMeasure::marginal_defect() const {
    double worst = 0;
    for (std::size_t k = 0; k + 1 < freq_.size(); ++k)
        for (std::size_t i = 0; i < freq_[k].size(); ++i) {
            double sum = 0;
            for (std::size_t a = 0; a < n_; ++a) sum += freq_[k + 1][i * n_ + a];
            worst = std::max(worst, std::abs(sum - freq_[k][i]));
        }
    return worst;
}

void EmpiricalMeasure::add_word(std::span<const Symbol> word, double mass) {
    std::size_t c = 0;
    for (int k = 0; k < depth_; ++k) {
        c = c * n_ + static_cast<std::size_t>(word[static_cast<std::size_t>(k)]);
        freq_[static_cast<std::size_t>(k)][c] += mass;
    }
}

void EmpiricalMeasure::add_cylinder(std::span<const Symbol> w, double mass) {
    std::size_t c = 0;
    for (Symbol s : w) c = c * n_ + static_cast<std::size_t>(s);
    freq_[w.size() - 1][c] += mass;
}

void EmpiricalMeasure::add_heights(double a, double b, double mass) {
    if (b <= a) return;
    const double density = mass / (b - a);
    auto i = static_cast<std::size_t>(a / bin_);
    for (; i < heights_.size(); ++i) {
        const double lo = std::max(a, bin_ * static_cast<double>(i));
        const double hi = std::min(b, bin_ * static_cast<double>(i + 1));
        if (hi <= lo) {
            if (bin_ * static_cast<double>(i) >= b) break;
            continue;
        }
        heights_[i] += density * (hi - lo);
    }
}

void EmpiricalMeasure::add_fiber(std::span<const Symbol> word, double h0, double time) {
    add_word(word, time);
    add_heights(h0, h0 + time, time);
}

EmpiricalMeasure empirical_measure(const FlowSystem& sys, const SuspPoint& x, double t, const WeakStarConfig& cfg) {
    if (!(t > 0)) throw ParameterError("empirical measure needs t > 0");
    EmpiricalMeasure e(sys, cfg);
    double left = t, h = x.height;
    for (long k = 0; left > 0; ++k) {
        const double stay = std::min(sys.roof(x.base.at(k)) - h, left);
        e.add_fiber(x.base.window(k, cfg.depth), h, stay);
        left -= stay;
        h = 0;
    }
    e.scale(1 / t);
    return e;
}

EmpiricalMeasure orbit_measure(const FlowSystem& sys, std::span<const Symbol> cycle, const WeakStarConfig& cfg) {
    if (cycle.empty() || !sys.sft().cyclically_admissible(cycle)) throw ModelError("closed orbit word not cyclically admissible");
    EmpiricalMeasure e(sys, cfg);
    const std::size_t n = cycle.size();
    Word w(static_cast<std::size_t>(cfg.depth));
    double period = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = cycle[(i + k) % n];
        const double r = sys.roof(cycle[i]);
        e.add_fiber(w, 0, r);
        period += r;
    }
    e.scale(1 / period);
    return e;
}

EmpiricalMeasure measure_statistics(const SuspendedMeasure& mu, const WeakStarConfig& cfg) {
    EmpiricalMeasure e(mu.system, cfg);
    const auto& m = mu.base;
    const std::size_t ns = m.states();
    // walk the word tree carrying the forward probability vector
    Word w;
    std::function<void(const std::vector<double>&)> rec = [&](const std::vector<double>& f) {
        const double p = std::accumulate(f.begin(), f.end(), 0.0);
        if (p <= 0) return;
        e.add_cylinder(w, p * mu.system.roof(w[0]) / mu.mean_roof);
        if (static_cast<int>(w.size()) == cfg.depth) return;
        std::vector<std::vector<double>> next(m.alphabet(), std::vector<double>(ns, 0.0));
        std::vector<bool> hit(m.alphabet(), false);
        for (std::size_t s = 0; s < ns; ++s) {
            if (f[s] == 0) continue;
            for (auto [t, q] : m.row(static_cast<int>(s))) {
                const auto a = static_cast<std::size_t>(m.emit(t));
                next[a][static_cast<std::size_t>(t)] += f[s] * q;
                hit[a] = true;
            }
        }
        for (std::size_t a = 0; a < m.alphabet(); ++a) {
            if (!hit[a]) continue;
            w.push_back(static_cast<Symbol>(a));
            rec(next[a]);
            w.pop_back();
        }
    };
    for (std::size_t a = 0; a < m.alphabet(); ++a) {
        std::vector<double> f(ns, 0.0);
        for (std::size_t s = 0; s < ns; ++s)
            if (static_cast<std::size_t>(m.emit(static_cast<int>(s))) == a) f[s] = m.pi()[s];
        w.assign(1, static_cast<Symbol>(a));
        rec(f);
    }
    for (std::size_t s = 0; s < ns; ++s) {
        const double r = mu.state_roof(static_cast<int>(s));
        e.add_heights(0, r, m.pi()[s] * r / mu.mean_roof);
    }
    return e;
}

double weak_star_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.alphabet() != b.alphabet() || a.depth() != b.depth() || a.heights().size() != b.heights().size() ||
        a.bin_width() != b.bin_width())
        throw ParameterError("depth mismatch between statistics");
    double d = 0, w = 1;
    for (int k = 1; k <= a.depth(); ++k) {
        w *= a.decay();
        const auto& x = a.table(k);
        const auto& y = b.table(k);
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
        d += w * s;
    }
    double h = 0;
    for (std::size_t i = 0; i < a.heights().size(); ++i) h += std::abs(a.heights()[i] - b.heights()[i]);
    return d + a.height_weight() * h;
}

double weak_star_distance(const EmpiricalMeasure& a, const SuspendedMeasure& b) {
    WeakStarConfig cfg;
    cfg.depth = a.depth();
    cfg.decay = a.decay();
    cfg.height_bin = a.bin_width();
    cfg.height_weight = a.height_weight();
    return weak_star_distance(a, measure_statistics(b, cfg));
}

double weak_star_diameter(const EmpiricalMeasure& shape) {
    double d = 0, w = 1;
    for (int k = 1; k <= shape.depth(); ++k) {
        w *= shape.decay();
        d += 2 * w;
    }
    return d + 2 * shape.height_weight();
}

}  // namespace thermoflow
