#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <numeric>
#include <set>

#include "thermoflow/errors.hpp"
#include "thermoflow/sft.hpp"

using namespace thermoflow;

namespace {

Sft full2() { return Sft({{1, 1}, {1, 1}}); }
Sft golden() { return Sft({{1, 1}, {1, 0}}); }
// directed edges a, ā, b, b̄ of the two-petal rose; successor ≠ reversal
Sft rose2() { return Sft({{1, 0, 1, 1}, {0, 1, 1, 1}, {1, 1, 1, 0}, {1, 1, 0, 1}}); }

// all words of length n over k symbols, admissible in sft
std::vector<Word> all_words(const Sft& sft, int n) {
    std::vector<Word> out;
    Word w(static_cast<std::size_t>(n), 0);
    const int k = static_cast<int>(sft.size());
    while (true) {
        if (sft.admissible(w)) out.push_back(w);
        int i = n - 1;
        while (i >= 0 && w[static_cast<std::size_t>(i)] == k - 1) w[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++w[static_cast<std::size_t>(i)];
    }
    if (n == 0) out = {Word{}};
    return out;
}

// brute-force least gap length between symbols by trying every word
int brute_gap(const Sft& sft, Symbol a, Symbol b, int max_len) {
    for (int len = 0; len <= max_len; ++len) {
        for (const auto& u : all_words(sft, len)) {
            Word w{a};
            w.insert(w.end(), u.begin(), u.end());
            w.push_back(b);
            if (sft.admissible(w)) return len;
        }
    }
    return -1;
}

Sft random_irreducible(std::mt19937_64& rng, int max_symbols) {
    std::uniform_int_distribution<int> nd(1, max_symbols);
    std::bernoulli_distribution coin(0.4);
    while (true) {
        const int n = nd(rng);
        std::vector<std::vector<int>> m(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
        for (auto& row : m)
            for (auto& v : row) v = coin(rng) ? 1 : 0;
        try {
            Sft s(m);
            if (is_irreducible(s)) return s;
        } catch (const ModelError&) {
        }
    }
}

}  // namespace

TEST_CASE("construction rejects malformed matrices") {
    CHECK_THROWS_AS(Sft({{1, 1}, {1}}), ModelError);
    CHECK_THROWS_AS(Sft({{2, 0}, {0, 1}}), ModelError);
    CHECK_THROWS_AS(Sft({{1, 1}, {0, 0}}), ModelError);
    CHECK_NOTHROW(Sft(std::vector<std::vector<int>>{{1}}));
}

TEST_CASE("irreducibility") {
    CHECK(is_irreducible(full2()));
    CHECK_FALSE(is_irreducible(Sft({{1, 0}, {0, 1}})));
    CHECK(is_irreducible(golden()));
    CHECK(is_irreducible(rose2()));
}

TEST_CASE("min gap bound matches brute force") {
    CHECK(min_gap_bound(full2()) == 0);
    CHECK(min_gap_bound(golden()) == 1);
    CHECK(min_gap_bound(rose2()) == 1);
    CHECK_THROWS_WITH_AS(min_gap_bound(Sft({{1, 0}, {0, 1}})), "weak specification fails", SpecificationError);
    for (const auto& s : {full2(), golden(), rose2()}) {
        int worst = 0;
        for (Symbol a = 0; a < static_cast<Symbol>(s.size()); ++a)
            for (Symbol b = 0; b < static_cast<Symbol>(s.size()); ++b) worst = std::max(worst, brute_gap(s, a, b, 3));
        CHECK(worst == min_gap_bound(s));
    }
}

TEST_CASE("glue words") {
    CHECK(glue_words(golden(), {1}, {1}) == Word{0});
    CHECK(glue_words(golden(), {0}, {1}).empty());
    CHECK(glue_words(full2(), {1, 0}, {1}).empty());
    // a followed by ā needs one edge; smallest allowed after a that precedes ā is b (index 2)
    CHECK(glue_words(rose2(), {0}, {1}) == Word{2});
    CHECK(glue_words(golden(), {}, {1}).empty());
}

TEST_CASE("gap property on random shifts") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Sft s = random_irreducible(rng, 6);
        const int tau = min_gap_bound(s);
        const auto n = static_cast<Symbol>(s.size());
        std::uniform_int_distribution<Symbol> sym(0, n - 1);
        for (int rep = 0; rep < 10; ++rep) {
            const Symbol a = sym(rng), b = sym(rng);
            const Word u = glue_words(s, {a}, {b});
            Word w{a};
            w.insert(w.end(), u.begin(), u.end());
            w.push_back(b);
            CHECK(s.admissible(w));
            CHECK(static_cast<int>(u.size()) <= tau);
            CHECK(static_cast<int>(u.size()) == brute_gap(s, a, b, tau));
        }
        // permutation invariance
        std::vector<int> perm(s.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto m = s.matrix();
        auto pm = m;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                pm[static_cast<std::size_t>(perm[i])][static_cast<std::size_t>(perm[j])] = m[i][j];
        CHECK(min_gap_bound(Sft(pm)) == tau);
    }
}

TEST_CASE("primitive cycles") {
    auto f = enumerate_primitive_cycles(full2(), 1);
    CHECK(f.cycles == std::vector<Word>{{0}, {1}});
    auto g = enumerate_primitive_cycles(golden(), 2);
    CHECK(g.cycles == std::vector<Word>{{0}, {0, 1}});
    CHECK(g.traces[2] == 3);
    auto r = enumerate_primitive_cycles(rose2(), 1);
    CHECK(r.cycles.size() == 4);
    auto r2 = enumerate_primitive_cycles(rose2(), 2);
    CHECK(r2.cycles.size() == 8);
}

TEST_CASE("periodic point counts equal traces up to length 12") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Sft s = random_irreducible(rng, 3);
        const auto pc = enumerate_primitive_cycles(s, 12);  // throws on mismatch
        for (int n = 1; n <= 8; ++n) {
            std::uint64_t brute = 0;
            for (const auto& w : all_words(s, n))
                if (s.cyclically_admissible(w)) ++brute;
            CHECK(brute == pc.traces[static_cast<std::size_t>(n)]);
        }
    }
}

TEST_CASE("lyndon helpers") {
    CHECK(is_lyndon(Word{0, 0, 1}));
    CHECK_FALSE(is_lyndon(Word{0, 1, 0}));
    CHECK_FALSE(is_lyndon(Word{0, 1, 0, 1}));
    CHECK(is_primitive(Word{0, 1, 1}));
    CHECK_FALSE(is_primitive(Word{1, 1}));
    CHECK(canonical_rotation(Word{1, 0, 1, 1}) == Word{0, 1, 1, 1});
}

TEST_CASE("biword canonical form") {
    const Sft s = full2();
    const BiWord a = BiWord::make(s, {0, 0}, {0, 1, 1}, {1}, 0);
    CHECK(a.left_tail() == Word{0});
    CHECK(a.core().empty());
    for (long i = -5; i < 6; ++i) CHECK(a.at(i) == (i < 1 ? 0 : 1));
    const BiWord b = BiWord::make(s, {0}, {}, {1}, -1);
    CHECK(a == b);

    const BiWord p = BiWord::periodic(s, {1, 0}, 0);
    const BiWord q = BiWord::periodic(s, {0, 1}, 1);
    CHECK(p == q);
    CHECK(p.is_periodic());
    CHECK(p.shifted(2) == p);
    CHECK(p.shifted(1).at(0) == 0);
    const BiWord t = BiWord::periodic(s, {1, 1, 0}, 0);
    for (long i = -7; i < 7; ++i) CHECK(t.at(i) == Word{1, 1, 0}[static_cast<std::size_t>(((i % 3) + 3) % 3)]);
    CHECK(t == BiWord::periodic(s, {0, 1, 1}, 1));

    const BiWord c = BiWord::make(s, {0, 1}, {1, 1, 0}, {1, 0}, 3);
    for (long i = -10; i < 10; ++i) CHECK(c.shifted(4).at(i) == c.at(i + 4));
    CHECK_THROWS_AS(BiWord::make(golden(), {1}, {}, {0}, 0), ParameterError);
}

TEST_CASE("biword canonicalization preserves sequences") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const Sft s = random_irreducible(rng, 3);
        auto cycles = enumerate_primitive_cycles(s, 4).cycles;
        std::uniform_int_distribution<std::size_t> pick(0, cycles.size() - 1);
        Word L = cycles[pick(rng)], R = cycles[pick(rng)];
        Word core = glue_words(s, L, R);
        if (!s.allowed(L.back(), core.empty() ? R.front() : core.front())) continue;
        Word lefty = L;
        lefty.insert(lefty.end(), L.begin(), L.end());
        std::uniform_int_distribution<long> org(-6, 6);
        const long origin = org(rng);
        const BiWord b = BiWord::make(s, lefty, core, R, origin);
        // reference sequence from the raw representation
        for (long i = -15; i < 15; ++i) {
            const long p = origin + i;
            Symbol expect;
            if (p < 0) expect = lefty[static_cast<std::size_t>(((p % static_cast<long>(lefty.size())) + static_cast<long>(lefty.size())) % static_cast<long>(lefty.size()))];
            else if (p < static_cast<long>(core.size())) expect = core[static_cast<std::size_t>(p)];
            else expect = R[static_cast<std::size_t>((p - static_cast<long>(core.size())) % static_cast<long>(R.size()))];
            CHECK(b.at(i) == expect);
        }
        CHECK(BiWord::make(s, b.left_tail(), b.core(), b.right_tail(), b.origin()) == b);
    }
}
