#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace thermoflow {

using Symbol = int;
using Word = std::vector<Symbol>;

/// Vertex shift given by a 0/1 transition matrix. Entry (i, j) says the
/// two-letter word "ij" is allowed. Immutable once built.
class Sft {
public:
    /// Throws ModelError when the matrix is not square, not 0/1, or leaves
    /// some symbol without a successor or a predecessor.
    explicit Sft(const std::vector<std::vector<int>>& transitions, std::vector<std::string> names = {});

    std::size_t size() const noexcept { return n_; }
    bool allowed(Symbol a, Symbol b) const noexcept { return bits_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)] != 0; }
    const std::vector<Symbol>& successors(Symbol a) const { return succ_[static_cast<std::size_t>(a)]; }
    const std::vector<Symbol>& predecessors(Symbol a) const { return pred_[static_cast<std::size_t>(a)]; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::vector<std::vector<int>> matrix() const;

    bool admissible(std::span<const Symbol> w) const;
    /// Admissible including the wrap-around pair (last, first).
    bool cyclically_admissible(std::span<const Symbol> w) const;

    friend bool operator==(const Sft& a, const Sft& b) { return a.n_ == b.n_ && a.bits_ == b.bits_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
    std::vector<std::vector<Symbol>> succ_;
    std::vector<std::vector<Symbol>> pred_;
    std::vector<std::string> names_;
};

bool is_irreducible(const Sft& sft);

/// Edge-count distances between symbols (-1 when unreachable). Entry (a, a)
/// is the length of the shortest return loop, not 0.
std::vector<std::vector<int>> path_lengths(const Sft& sft);

/// Least τ such that any v, w in the language admit u with |u| ≤ τ and vuw
/// admissible. Throws SpecificationError for reducible input.
int min_gap_bound(const Sft& sft);

/// Shortest, then lexicographically least, u with a·u·b admissible.
Word shortest_gap(const Sft& sft, Symbol from, Symbol to);

/// Gap word joining v to w (empty when either is empty).
Word glue_words(const Sft& sft, const Word& v, const Word& w);

struct GapWitness {
    Symbol from;
    Symbol to;
    Word gap;
};

/// One shortest gap per ordered symbol pair; the longest of them realizes min_gap_bound.
std::vector<GapWitness> gap_witnesses(const Sft& sft);

bool is_primitive(std::span<const Symbol> w);
/// Strictly smaller than each of its nontrivial rotations.
bool is_lyndon(std::span<const Symbol> w);
/// Least rotation of a primitive word.
Word canonical_rotation(std::span<const Symbol> w);

struct PrimitiveCycles {
    /// Lyndon representatives, sorted by length then lexicographically.
    std::vector<Word> cycles;
    /// trace(A^n) for n = 1..max_len; index 0 unused.
    std::vector<std::uint64_t> traces;
};

/// All primitive cyclically admissible words up to rotation with length ≤ max_len.
/// Verifies Σ_{d | n} d·#{primitive of length d} = trace(A^n) for every n.
PrimitiveCycles enumerate_primitive_cycles(const Sft& sft, int max_len);

std::uint64_t trace_of_power(const Sft& sft, int n);

/// Eventually periodic bi-infinite sequence
///   … L L L · C · R R R …
/// in a frame where C occupies positions [0, |C|), L ends at position −1 and
/// R starts at |C|. Coordinate i of the sequence is frame position origin + i.
/// Construction validates admissibility and canonicalizes: tails primitive,
/// core minimal, and for an empty core the L/R seam pushed as far left as possible.
class BiWord {
public:
    BiWord() = default;
    static BiWord make(const Sft& sft, Word left_tail, Word core, Word right_tail, long origin = 0);
    /// Periodic point …www… with coordinate 0 at w[phase].
    static BiWord periodic(const Sft& sft, const Word& cycle, long phase = 0);

    const Word& left_tail() const noexcept { return left_; }
    const Word& core() const noexcept { return core_; }
    const Word& right_tail() const noexcept { return right_; }
    long origin() const noexcept { return origin_; }

    Symbol at(long coordinate) const;
    /// Symbols at coordinates [from, from + length).
    Word window(long from, long length) const;
    BiWord shifted(long k) const;
    bool is_periodic() const noexcept { return core_.empty() && left_ == right_; }

    friend bool operator==(const BiWord&, const BiWord&) = default;

private:
    Word left_, core_, right_;
    long origin_ = 0;
};

/// Admissible word w placed at coordinates first, first+1, …, padded on both
/// sides by the shortest loops through its end letters.
BiWord embed_word(const Sft& sft, const Word& w, long first = 0);

}  // namespace thermoflow
