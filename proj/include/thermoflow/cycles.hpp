#pragma once

#include <span>
#include <vector>

#include "thermoflow/sft.hpp"

namespace thermoflow {

/// Calls fn(word, weight) once per primitive cyclically admissible word, up to
/// rotation (Lyndon representative), whose total symbol weight is ≤ budget.
/// Weights must be positive. Prefixes that cannot extend to a Lyndon word are
/// pruned with Duval's scan.
template <class Fn>
void for_each_primitive_cycle(const Sft& sft, std::span<const double> weight, double budget, Fn&& fn) {
    const auto n = static_cast<Symbol>(sft.size());
    Word word;
    std::vector<std::size_t> duval;  // duval[j] = comparison index after reading word[0..j]
    struct Frame {
        Symbol next;
        double used;
    };
    for (Symbol first = 0; first < n; ++first) {
        const double w0 = weight[static_cast<std::size_t>(first)];
        if (w0 > budget) continue;
        word.assign(1, first);
        duval.assign(1, 0);
        std::vector<Frame> stack{{first, w0}};
        if (sft.allowed(first, first)) fn(std::span<const Symbol>(word), w0);
        while (!stack.empty()) {
            Frame& top = stack.back();
            const auto& succ = sft.successors(word.back());
            // find next successor ≥ first not yet tried
            Symbol chosen = -1;
            for (Symbol s : succ) {
                if (s >= top.next && s >= first) {
                    chosen = s;
                    break;
                }
            }
            if (chosen < 0 || top.used + weight[static_cast<std::size_t>(chosen)] > budget) {
                // successors are sorted, so larger ones may still fit only if weights differ
                if (chosen >= 0) {
                    top.next = chosen + 1;
                    continue;
                }
                stack.pop_back();
                word.pop_back();
                duval.pop_back();
                continue;
            }
            top.next = chosen + 1;
            const std::size_t k = duval.back();
            std::size_t nk;
            if (word[k] < chosen) nk = 0;
            else if (word[k] == chosen) nk = k + 1;
            else continue;
            const double used = top.used + weight[static_cast<std::size_t>(chosen)];
            word.push_back(chosen);
            duval.push_back(nk);
            if (nk == 0 && sft.allowed(chosen, first)) fn(std::span<const Symbol>(word), used);
            stack.push_back({0, used});
        }
    }
}

}  // namespace thermoflow
