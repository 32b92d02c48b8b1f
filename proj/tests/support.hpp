#pragma once

#include <random>
#include <vector>

#include "thermoflow/errors.hpp"
#include "thermoflow/sft.hpp"
#include "thermoflow/suspension.hpp"

namespace testsupport {

using namespace thermoflow;

inline Sft full2() { return Sft({{1, 1}, {1, 1}}); }
inline Sft golden() { return Sft({{1, 1}, {1, 0}}); }
inline Sft rose2() { return Sft({{1, 0, 1, 1}, {0, 1, 1, 1}, {1, 1, 1, 0}, {1, 1, 0, 1}}); }

inline Sft random_irreducible(std::mt19937_64& rng, int max_symbols, double density = 0.4) {
    std::uniform_int_distribution<int> nd(1, max_symbols);
    std::bernoulli_distribution coin(density);
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

inline Word random_walk(const Sft& sft, std::mt19937_64& rng, Symbol from, int len) {
    Word w;
    Symbol cur = from;
    for (int i = 0; i < len; ++i) {
        const auto& succ = sft.successors(cur);
        std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
        cur = succ[pick(rng)];
        w.push_back(cur);
    }
    return w;
}

/// Random eventually periodic point: cycle tails joined by a random walk.
inline BiWord random_biword(const Sft& sft, std::mt19937_64& rng, int max_core = 10) {
    const auto cycles = enumerate_primitive_cycles(sft, 4).cycles;
    std::uniform_int_distribution<std::size_t> pick(0, cycles.size() - 1);
    const Word L = cycles[pick(rng)];
    const Word R = cycles[pick(rng)];
    std::uniform_int_distribution<int> len(0, max_core);
    Word core = random_walk(sft, rng, L.back(), len(rng));
    const Word joint = core.empty() ? glue_words(sft, L, R) : glue_words(sft, core, R);
    core.insert(core.end(), joint.begin(), joint.end());
    if (core.empty() && !sft.allowed(L.back(), R.front())) core = glue_words(sft, L, R);
    std::uniform_int_distribution<long> org(-4, static_cast<long>(core.size()) + 4);
    return BiWord::make(sft, L, core, R, org(rng));
}

inline SuspPoint random_point(const FlowSystem& sys, std::mt19937_64& rng, int max_core = 10) {
    const BiWord b = random_biword(sys.sft(), rng, max_core);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {b, u(rng) * sys.roof(b.at(0))};
}

inline std::vector<double> random_roof(std::size_t n, std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> r(n);
    for (auto& v : r) v = u(rng);
    return r;
}

}  // namespace testsupport
