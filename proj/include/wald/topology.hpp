#pragma once

#include <string>
#include <vector>

#include "wald/split.hpp"

namespace wald {

// A compatible split system E over leaves 1..N together with the leaf
// partition it induces: one block per distinct split support, plus a
// singleton for every uncovered leaf. Construction validates everything:
// pairwise compatibility inside each block, pairwise disjoint-or-identical
// supports, and the separation condition (any two leaves of one block are
// separated by some split of that block). Splits are kept sorted, so two
// topologies are equal iff their split vectors are.
class WaldTopology {
public:
    WaldTopology(int n_leaves, std::vector<Split> splits);

    static WaldTopology forest_infinity(int n_leaves);

    int n_leaves() const { return n_; }
    const std::vector<Split>& splits() const { return splits_; }
    const std::vector<LeafMask>& blocks() const { return blocks_; }

    LeafMask block_of(int leaf) const;
    // Index into splits(), or -1 when absent.
    int index_of(const Split& e) const;
    bool contains(const Split& e) const { return index_of(e) >= 0; }

    // Indices of the splits separating u and v; empty when u = v or the two
    // leaves live in different blocks.
    std::vector<int> edges_on_path(int u, int v) const;

    // Deterministic textual identifier, "-" for the empty topology.
    std::string id() const;

    bool operator==(const WaldTopology& o) const {
        return n_ == o.n_ && splits_ == o.splits_;
    }

private:
    int n_;
    std::vector<Split> splits_;
    std::vector<LeafMask> blocks_;
};

// Free-function spelling of the validating constructor.
WaldTopology validate_topology(const std::vector<Split>& splits, int n_leaves);

}  // namespace wald
