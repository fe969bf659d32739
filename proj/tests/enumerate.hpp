#pragma once

// Exhaustive enumeration of wald topologies for small leaf counts: walk every
// subset of pairwise-admissible partial splits in index order and keep the
// ones the validating constructor accepts. Counts grow quickly (662 already
// for six labels minus one), so callers stay at n <= 5.

#include <bit>
#include <vector>

#include "wald/errors.hpp"
#include "wald/split.hpp"
#include "wald/topology.hpp"

namespace wald::testutil {

inline std::vector<Split> all_partial_splits(int n) {
    std::vector<Split> out;
    const LeafMask full = (LeafMask{1} << n) - 1;
    for (LeafMask s = 1; s <= full; ++s) {
        if (std::popcount(s) < 2) continue;
        LeafMask lowest = s & (~s + 1);
        for (LeafMask a = s; a; a = (a - 1) & s)
            if ((a & lowest) && a != s) out.emplace_back(a, s & ~a);
    }
    return out;
}

// Necessary pairwise condition for membership in one split system: equal
// supports must be compatible, different supports must be disjoint.
inline bool admissible_pair(const Split& x, const Split& y) {
    LeafMask sx = x.support(), sy = y.support();
    if (sx == sy) return split_compatible(x, y);
    return (sx & sy) == 0;
}

inline void enumerate_rec(int n, const std::vector<Split>& cand, std::size_t start,
                          std::vector<Split>& chosen, std::vector<WaldTopology>& out) {
    try {
        out.emplace_back(n, chosen);
    } catch (const WaldError&) {
        // pairwise admissible but some pair of leaves is not separated yet;
        // supersets may still be valid, so keep recursing
    }
    if (static_cast<int>(chosen.size()) == 2 * n - 3) return;
    for (std::size_t i = start; i < cand.size(); ++i) {
        bool ok = true;
        for (const Split& c : chosen)
            if (!admissible_pair(c, cand[i])) {
                ok = false;
                break;
            }
        if (!ok) continue;
        chosen.push_back(cand[i]);
        enumerate_rec(n, cand, i + 1, chosen, out);
        chosen.pop_back();
    }
}

inline std::vector<WaldTopology> all_topologies(int n) {
    std::vector<Split> cand = all_partial_splits(n);
    std::vector<Split> chosen;
    std::vector<WaldTopology> out;
    enumerate_rec(n, cand, 0, chosen, out);
    return out;
}

}  // namespace wald::testutil
