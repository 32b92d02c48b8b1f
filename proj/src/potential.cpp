#include "thermoflow/potential.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "thermoflow/errors.hpp"

namespace thermoflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// 8-point Gauss–Legendre on [−1, 1]
constexpr double kGaussX[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGaussW[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
    const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15 * tol) return left + right + diff / 15;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0;
    const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 24);
}

}  // namespace

CylinderPotential::CylinderPotential(const Sft& sft, int width, int anchor, const std::map<Word, double>& table)
    : n_(sft.size()), width_(width), anchor_(anchor) {
    if (width < 1) throw ModelError("cylinder width must be at least 1");
    if (anchor < 0 || anchor >= width) throw ModelError("cylinder anchor must lie inside the word");
    values_.assign(ipow(n_, width), kNaN);
    for (const auto& [w, v] : table) {
        if (static_cast<int>(w.size()) != width) throw ModelError("cylinder table word of wrong width");
        if (!sft.admissible(w)) throw ModelError("cylinder table word not admissible");
        if (!std::isfinite(v)) throw ModelError("cylinder table value not finite");
        values_[code(w)] = v;
    }
    for (const auto& w : admissible_words(sft, width)) {
        const double v = values_[code(w)];
        if (std::isnan(v)) throw ModelError("cylinder table does not cover every admissible word");
        sup_ = std::max(sup_, std::abs(v));
    }
}

CylinderPotential CylinderPotential::per_symbol(const Sft& sft, const std::vector<double>& values) {
    if (values.size() != sft.size()) throw ModelError("one value per symbol expected");
    std::map<Word, double> t;
    for (std::size_t i = 0; i < values.size(); ++i) t[{static_cast<Symbol>(i)}] = values[i];
    return CylinderPotential(sft, 1, 0, t);
}

std::size_t CylinderPotential::code(std::span<const Symbol> word) const {
    std::size_t c = 0;
    for (Symbol s : word) c = c * n_ + static_cast<std::size_t>(s);
    return c;
}

double CylinderPotential::at(std::span<const Symbol> word) const {
    if (static_cast<int>(word.size()) != width_) throw ModelError("cylinder lookup with a word of wrong width");
    const double v = values_[code(word)];
    if (std::isnan(v)) throw ModelError("cylinder lookup off the language");
    return v;
}

double CylinderPotential::on_fiber(const BiWord& x, long k) const {
    std::size_t c = 0;
    for (int i = 0; i < width_; ++i) c = c * n_ + static_cast<std::size_t>(x.at(k - anchor_ + i));
    return values_[c];
}

CylinderPotential CylinderPotential::operator+(const CylinderPotential& o) const {
    if (n_ != o.n_) throw ModelError("potentials over different alphabets");
    CylinderPotential r;
    r.n_ = n_;
    r.anchor_ = std::max(anchor_, o.anchor_);
    r.width_ = r.anchor_ + std::max(width_ - anchor_, o.width_ - o.anchor_);
    r.values_.assign(ipow(n_, r.width_), kNaN);
    Word w(static_cast<std::size_t>(r.width_), 0);
    for (std::size_t c = 0; c < r.values_.size(); ++c) {
        std::size_t t = c;
        for (int i = r.width_ - 1; i >= 0; --i) {
            w[static_cast<std::size_t>(i)] = static_cast<Symbol>(t % n_);
            t /= n_;
        }
        const double a = values_[code(std::span(w).subspan(static_cast<std::size_t>(r.anchor_ - anchor_), static_cast<std::size_t>(width_)))];
        const double b = o.values_[o.code(std::span(w).subspan(static_cast<std::size_t>(r.anchor_ - o.anchor_), static_cast<std::size_t>(o.width_)))];
        r.values_[c] = a + b;
        if (std::isfinite(r.values_[c])) r.sup_ = std::max(r.sup_, std::abs(r.values_[c]));
    }
    return r;
}

CylinderPotential CylinderPotential::scaled(double c) const {
    CylinderPotential r = *this;
    for (double& v : r.values_) v *= c;
    r.sup_ = sup_ * std::abs(c);
    return r;
}

double birkhoff(const FlowSystem& sys, const Potential& phi, const OrbitSegment& seg) {
    if (seg.duration < 0) throw ParameterError("negative duration");
    if (const auto* cyl = std::get_if<CylinderPotential>(&phi)) {
        double total = 0, left = seg.duration, h = seg.start.height;
        for (long k = 0; left > 0; ++k) {
            const double stay = std::min(sys.roof(seg.start.base.at(k)) - h, left);
            total += cyl->on_fiber(seg.start.base, k) * stay;
            left -= stay;
            h = 0;
        }
        return total;
    }
    const auto& dp = std::get<DistancePotential>(phi);
    auto f = [&](double s) { return dp(flow(sys, seg.start, s)); };
    // split at fiber crossings so the integrand is smooth on each piece
    double total = 0, at = 0, h = seg.start.height;
    for (long k = 0; at < seg.duration; ++k) {
        const double stay = std::min(sys.roof(seg.start.base.at(k)) - h, seg.duration - at);
        total += integrate(f, at, at + stay, 1e-8 * stay);
        at += stay;
        h = 0;
    }
    return total;
}

double cycle_integral(const FlowSystem& sys, const CylinderPotential& phi, std::span<const Symbol> cycle) {
    const long n = static_cast<long>(cycle.size());
    Word w(static_cast<std::size_t>(phi.width()));
    double total = 0;
    for (long i = 0; i < n; ++i) {
        for (int k = 0; k < phi.width(); ++k) {
            long c = (i - phi.anchor() + k) % n;
            if (c < 0) c += n;
            w[static_cast<std::size_t>(k)] = cycle[static_cast<std::size_t>(c)];
        }
        total += phi.at(w) * sys.roof(cycle[static_cast<std::size_t>(i)]);
    }
    return total;
}

double orbit_integral(const FlowSystem& sys, const Potential& phi, const Word& cycle) {
    if (const auto* cyl = std::get_if<CylinderPotential>(&phi)) return cycle_integral(sys, *cyl, cycle);
    double period = 0;
    for (Symbol s : cycle) period += sys.roof(s);
    return birkhoff(sys, phi, {{BiWord::periodic(sys.sft(), cycle), 0.0}, period});
}

CylinderPotential approximate(const FlowSystem& sys, const DistancePotential& phi, int width) {
    const int anchor = width / 2;
    std::map<Word, double> table;
    for (const auto& w : admissible_words(sys.sft(), width)) {
        const BiWord x = embed_word(sys.sft(), w, -anchor);
        const double r = sys.roof(x.at(0));
        double avg = 0;
        for (int i = 0; i < 8; ++i) avg += kGaussW[i] / 2 * phi({x, r / 2 * (1 + kGaussX[i])});
        table[w] = avg;
    }
    return CylinderPotential(sys.sft(), width, anchor, table);
}

std::vector<Word> admissible_words(const Sft& sft, int length) {
    std::vector<Word> out;
    if (length <= 0) return out;
    Word w;
    std::function<void()> rec = [&] {
        if (static_cast<int>(w.size()) == length) {
            out.push_back(w);
            return;
        }
        if (w.empty()) {
            for (Symbol a = 0; a < static_cast<Symbol>(sft.size()); ++a) {
                w.push_back(a);
                rec();
                w.pop_back();
            }
            return;
        }
        for (Symbol b : sft.successors(w.back())) {
            w.push_back(b);
            rec();
            w.pop_back();
        }
    };
    rec();
    return out;
}

BlockSystem block_system(const FlowSystem& sys, int width, int anchor) {
    BlockSystem b;
    b.width = width;
    b.anchor = anchor;
    b.states = admissible_words(sys.sft(), width);
    std::map<Word, int> index;
    for (std::size_t i = 0; i < b.states.size(); ++i) index[b.states[i]] = static_cast<int>(i);
    b.succ.resize(b.states.size());
    for (std::size_t i = 0; i < b.states.size(); ++i) {
        const Word& u = b.states[i];
        b.emit.push_back(u[static_cast<std::size_t>(anchor)]);
        b.roof.push_back(sys.roof(b.emit.back()));
        Word next(u.begin() + 1, u.end());
        next.push_back(0);
        for (Symbol c : sys.sft().successors(u.back())) {
            next.back() = c;
            b.succ[i].push_back(index.at(next));
        }
    }
    b.fiber.assign(b.states.size(), 0.0);
    return b;
}

BlockSystem block_system(const FlowSystem& sys, const CylinderPotential& phi) {
    BlockSystem b = block_system(sys, phi.width(), phi.anchor());
    for (std::size_t i = 0; i < b.states.size(); ++i) b.fiber[i] = phi.at(b.states[i]) * b.roof[i];
    return b;
}

}  // namespace thermoflow
