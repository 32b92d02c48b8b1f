#include "thermoflow/sft.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

#include "thermoflow/errors.hpp"
#include "thermoflow/cycles.hpp"

namespace thermoflow {

Sft::Sft(const std::vector<std::vector<int>>& transitions, std::vector<std::string> names)
    : n_(transitions.size()), names_(std::move(names)) {
    if (n_ == 0) throw ModelError("SFT needs at least one symbol");
    bits_.assign(n_ * n_, 0);
    succ_.resize(n_);
    pred_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (transitions[i].size() != n_) throw ModelError("transition matrix is not square");
        for (std::size_t j = 0; j < n_; ++j) {
            const int v = transitions[i][j];
            if (v != 0 && v != 1) throw ModelError("transition matrix must be 0/1");
            if (v == 1) {
                bits_[i * n_ + j] = 1;
                succ_[i].push_back(static_cast<Symbol>(j));
                pred_[j].push_back(static_cast<Symbol>(i));
            }
        }
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (succ_[i].empty() || pred_[i].empty())
            throw ModelError("symbol " + std::to_string(i) + " is stranded (no successor or no predecessor)");
    }
    if (names_.empty()) {
        for (std::size_t i = 0; i < n_; ++i) names_.push_back(std::to_string(i));
    } else if (names_.size() != n_) {
        throw ModelError("symbol name count does not match matrix size");
    }
}

std::vector<std::vector<int>> Sft::matrix() const {
    std::vector<std::vector<int>> m(n_, std::vector<int>(n_, 0));
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m[i][j] = bits_[i * n_ + j];
    return m;
}

bool Sft::admissible(std::span<const Symbol> w) const {
    for (Symbol s : w)
        if (s < 0 || static_cast<std::size_t>(s) >= n_) return false;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (!allowed(w[i - 1], w[i])) return false;
    return true;
}

bool Sft::cyclically_admissible(std::span<const Symbol> w) const {
    return !w.empty() && admissible(w) && allowed(w.back(), w.front());
}

std::vector<std::vector<int>> path_lengths(const Sft& sft) {
    const auto n = sft.size();
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
    for (std::size_t a = 0; a < n; ++a) {
        std::deque<Symbol> queue;
        for (Symbol b : sft.successors(static_cast<Symbol>(a))) {
            if (dist[a][static_cast<std::size_t>(b)] < 0) {
                dist[a][static_cast<std::size_t>(b)] = 1;
                queue.push_back(b);
            }
        }
        while (!queue.empty()) {
            const Symbol c = queue.front();
            queue.pop_front();
            for (Symbol d : sft.successors(c)) {
                if (dist[a][static_cast<std::size_t>(d)] < 0) {
                    dist[a][static_cast<std::size_t>(d)] = dist[a][static_cast<std::size_t>(c)] + 1;
                    queue.push_back(d);
                }
            }
        }
    }
    return dist;
}

bool is_irreducible(const Sft& sft) {
    for (const auto& row : path_lengths(sft))
        for (int d : row)
            if (d < 0) return false;
    return true;
}

int min_gap_bound(const Sft& sft) {
    int tau = 0;
    for (const auto& row : path_lengths(sft)) {
        for (int d : row) {
            if (d < 0) throw SpecificationError();
            tau = std::max(tau, d - 1);
        }
    }
    return tau;
}

Word shortest_gap(const Sft& sft, Symbol from, Symbol to) {
    const auto n = sft.size();
    // Edge distance from each symbol to `to` (0 at `to` itself).
    std::vector<int> to_target(n, -1);
    std::deque<Symbol> queue{to};
    to_target[static_cast<std::size_t>(to)] = 0;
    while (!queue.empty()) {
        const Symbol c = queue.front();
        queue.pop_front();
        for (Symbol p : sft.predecessors(c)) {
            if (to_target[static_cast<std::size_t>(p)] < 0) {
                to_target[static_cast<std::size_t>(p)] = to_target[static_cast<std::size_t>(c)] + 1;
                queue.push_back(p);
            }
        }
    }
    int edges = -1;
    for (Symbol s : sft.successors(from)) {
        const int d = to_target[static_cast<std::size_t>(s)];
        if (d >= 0 && (edges < 0 || d + 1 < edges)) edges = d + 1;
    }
    if (edges < 0) throw SpecificationError();

    Word gap;
    Symbol current = from;
    while (edges > 1) {
        // successors are stored in increasing order
        for (Symbol s : sft.successors(current)) {
            if (to_target[static_cast<std::size_t>(s)] == edges - 1) {
                gap.push_back(s);
                current = s;
                break;
            }
        }
        --edges;
    }
    return gap;
}

Word glue_words(const Sft& sft, const Word& v, const Word& w) {
    if (v.empty() || w.empty()) return {};
    if (!sft.admissible(v) || !sft.admissible(w)) throw ParameterError("glue_words: inadmissible input word");
    if (!is_irreducible(sft)) throw SpecificationError();
    return shortest_gap(sft, v.back(), w.front());
}

std::vector<GapWitness> gap_witnesses(const Sft& sft) {
    if (!is_irreducible(sft)) throw SpecificationError();
    std::vector<GapWitness> out;
    for (std::size_t a = 0; a < sft.size(); ++a)
        for (std::size_t b = 0; b < sft.size(); ++b)
            out.push_back({static_cast<Symbol>(a), static_cast<Symbol>(b),
                           shortest_gap(sft, static_cast<Symbol>(a), static_cast<Symbol>(b))});
    return out;
}

bool is_primitive(std::span<const Symbol> w) {
    const auto n = w.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
        if (periodic) return false;
    }
    return n > 0;
}

bool is_lyndon(std::span<const Symbol> w) {
    if (w.empty()) return false;
    std::size_t k = 0;
    for (std::size_t j = 1; j < w.size(); ++j) {
        if (w[k] < w[j]) k = 0;
        else if (w[k] == w[j]) ++k;
        else return false;
    }
    return k == 0;
}

Word canonical_rotation(std::span<const Symbol> w) {
    Word best(w.begin(), w.end());
    Word rot = best;
    for (std::size_t r = 1; r < w.size(); ++r) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

std::uint64_t trace_of_power(const Sft& sft, int n) {
    const auto m = sft.size();
    std::vector<std::uint64_t> power(m * m, 0), base(m * m, 0), tmp(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        power[i * m + i] = 1;
        for (std::size_t j = 0; j < m; ++j) base[i * m + j] = sft.allowed(static_cast<Symbol>(i), static_cast<Symbol>(j)) ? 1 : 0;
    }
    for (int step = 0; step < n; ++step) {
        std::fill(tmp.begin(), tmp.end(), 0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < m; ++k)
                if (power[i * m + k] != 0)
                    for (std::size_t j = 0; j < m; ++j) tmp[i * m + j] += power[i * m + k] * base[k * m + j];
        power.swap(tmp);
    }
    std::uint64_t tr = 0;
    for (std::size_t i = 0; i < m; ++i) tr += power[i * m + i];
    return tr;
}

PrimitiveCycles enumerate_primitive_cycles(const Sft& sft, int max_len) {
    if (max_len < 1) throw ParameterError("enumerate_primitive_cycles: max_len must be >= 1");
    PrimitiveCycles out;
    std::vector<double> unit(sft.size(), 1.0);
    for_each_primitive_cycle(sft, unit, static_cast<double>(max_len) + 0.5,
                             [&](std::span<const Symbol> w, double) { out.cycles.emplace_back(w.begin(), w.end()); });
    std::sort(out.cycles.begin(), out.cycles.end(), [](const Word& a, const Word& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });

    std::vector<std::uint64_t> by_len(static_cast<std::size_t>(max_len) + 1, 0);
    for (const auto& c : out.cycles) ++by_len[c.size()];
    out.traces.assign(static_cast<std::size_t>(max_len) + 1, 0);
    for (int n = 1; n <= max_len; ++n) {
        std::uint64_t points = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) points += static_cast<std::uint64_t>(d) * by_len[static_cast<std::size_t>(d)];
        const auto tr = trace_of_power(sft, n);
        if (points != tr)
            throw std::logic_error("periodic point count " + std::to_string(points) + " != trace(A^" + std::to_string(n) +
                                   ") = " + std::to_string(tr));
        out.traces[static_cast<std::size_t>(n)] = tr;
    }
    return out;
}

// ---------------------------------------------------------------- BiWord

namespace {

long floor_mod(long a, long n) {
    const long r = a % n;
    return r < 0 ? r + n : r;
}

Word primitive_root(const Word& w) {
    const auto n = w.size();
    for (std::size_t p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
        if (periodic) return Word(w.begin(), w.begin() + static_cast<long>(p));
    }
    return w;
}

void rotate_right(Word& w) { std::rotate(w.rbegin(), w.rbegin() + 1, w.rend()); }
void rotate_left(Word& w) { std::rotate(w.begin(), w.begin() + 1, w.end()); }

}  // namespace

BiWord BiWord::make(const Sft& sft, Word left_tail, Word core, Word right_tail, long origin) {
    if (left_tail.empty() || right_tail.empty()) throw ParameterError("BiWord tails must be nonempty");
    if (!sft.cyclically_admissible(left_tail) || !sft.cyclically_admissible(right_tail) || !sft.admissible(core))
        throw ParameterError("BiWord: inadmissible tail or core");
    const Symbol after_left = core.empty() ? right_tail.front() : core.front();
    if (!sft.allowed(left_tail.back(), after_left)) throw ParameterError("BiWord: inadmissible left seam");
    if (!core.empty() && !sft.allowed(core.back(), right_tail.front()))
        throw ParameterError("BiWord: inadmissible right seam");

    BiWord b;
    b.left_ = primitive_root(left_tail);
    b.right_ = primitive_root(right_tail);
    b.core_ = std::move(core);
    b.origin_ = origin;

    bool changed = true;
    while (changed && !b.core_.empty()) {
        changed = false;
        while (!b.core_.empty() && b.core_.back() == b.right_.back()) {
            rotate_right(b.right_);
            b.core_.pop_back();
            changed = true;
        }
        while (!b.core_.empty() && b.core_.front() == b.left_.front()) {
            rotate_left(b.left_);
            b.core_.erase(b.core_.begin());
            b.origin_ -= 1;
            changed = true;
        }
    }
    if (b.core_.empty()) {
        const std::size_t limit = b.left_.size() * b.right_.size() + 1;
        for (std::size_t it = 0; it < limit && b.left_ != b.right_ && b.left_.back() == b.right_.back(); ++it) {
            rotate_right(b.left_);
            rotate_right(b.right_);
            b.origin_ += 1;
        }
        if (b.left_ == b.right_) {
            // periodic: least rotation, origin reduced modulo the period
            const long n = static_cast<long>(b.left_.size());
            Word best = b.left_;
            long shift = 0;
            Word rot = b.left_;
            for (long k = 1; k < n; ++k) {
                rotate_left(rot);
                if (rot < best) {
                    best = rot;
                    shift = k;
                }
            }
            // best = u rotated left by shift, so position p of u is position p - shift of best
            b.left_ = best;
            b.right_ = best;
            b.origin_ = floor_mod(b.origin_ - shift, n);
        }
    }
    return b;
}

BiWord BiWord::periodic(const Sft& sft, const Word& cycle, long phase) {
    if (!sft.cyclically_admissible(cycle)) throw ParameterError("BiWord::periodic: cycle not cyclically admissible");
    return make(sft, cycle, {}, cycle, phase);
}

Symbol BiWord::at(long coordinate) const {
    const long p = origin_ + coordinate;
    const long c = static_cast<long>(core_.size());
    if (p < 0) return left_[static_cast<std::size_t>(floor_mod(p, static_cast<long>(left_.size())))];
    if (p < c) return core_[static_cast<std::size_t>(p)];
    return right_[static_cast<std::size_t>(floor_mod(p - c, static_cast<long>(right_.size())))];
}

Word BiWord::window(long from, long length) const {
    Word w;
    w.reserve(static_cast<std::size_t>(std::max(0L, length)));
    for (long i = 0; i < length; ++i) w.push_back(at(from + i));
    return w;
}

BiWord BiWord::shifted(long k) const {
    BiWord b = *this;
    b.origin_ += k;
    if (b.is_periodic()) b.origin_ = floor_mod(b.origin_, static_cast<long>(b.left_.size()));
    return b;
}

BiWord embed_word(const Sft& sft, const Word& w, long first) {
    if (w.empty()) throw ModelError("cannot embed an empty word");
    Word left{w.front()};
    const Word lg = shortest_gap(sft, w.front(), w.front());
    left.insert(left.end(), lg.begin(), lg.end());
    Word right = shortest_gap(sft, w.back(), w.back());
    right.push_back(w.back());
    return BiWord::make(sft, std::move(left), w, std::move(right), -first);
}

}  // namespace thermoflow
