#include "wald/topology.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "wald/errors.hpp"

namespace wald {

WaldTopology::WaldTopology(int n_leaves, std::vector<Split> splits)
    : n_(n_leaves), splits_(std::move(splits)) {
    if (n_ < 2 || n_ > max_leaves)
        throw std::invalid_argument("leaf count must be in 2.." + std::to_string(max_leaves));
    const LeafMask all = (n_ == max_leaves) ? ~LeafMask{0} : (LeafMask{1} << n_) - 1;

    std::sort(splits_.begin(), splits_.end());
    for (std::size_t i = 0; i + 1 < splits_.size(); ++i)
        if (splits_[i] == splits_[i + 1])
            throw std::invalid_argument("duplicate split " + to_string(splits_[i]));

    for (const Split& e : splits_)
        if (e.support() & ~all)
            throw std::invalid_argument("split " + to_string(e) + " uses labels beyond " +
                                        std::to_string(n_));

    // Supports must be pairwise disjoint or identical; identical-support
    // splits must be pairwise compatible.
    for (std::size_t i = 0; i < splits_.size(); ++i) {
        for (std::size_t j = i + 1; j < splits_.size(); ++j) {
            LeafMask si = splits_[i].support(), sj = splits_[j].support();
            if (si == sj) {
                if (!split_compatible(splits_[i], splits_[j]))
                    throw IncompatibleSplits(to_string(splits_[i]), to_string(splits_[j]));
            } else if (si & sj) {
                throw OverlappingBlocks(to_string(splits_[i]), to_string(splits_[j]));
            }
        }
    }

    LeafMask covered = 0;
    for (const Split& e : splits_) {
        LeafMask s = e.support();
        if (!(covered & s)) blocks_.push_back(s);
        covered |= s;
    }
    for (int u = 1; u <= n_; ++u)
        if (!(covered & leaf_bit(u))) blocks_.push_back(leaf_bit(u));
    std::sort(blocks_.begin(), blocks_.end(),
              [](LeafMask x, LeafMask y) { return std::countr_zero(x) < std::countr_zero(y); });

    // Separation: every pair inside one block is split apart by some split.
    for (LeafMask b : blocks_) {
        std::vector<int> leaves = labels_from_mask(b);
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            for (std::size_t j = i + 1; j < leaves.size(); ++j) {
                bool separated = false;
                for (const Split& e : splits_)
                    if (e.separates(leaves[i], leaves[j])) { separated = true; break; }
                if (!separated) throw SeparationViolated(leaves[i], leaves[j]);
            }
        }
    }

    if (splits_.size() > static_cast<std::size_t>(2 * n_ - 3))
        throw std::invalid_argument("split system exceeds 2N-3 elements");
}

WaldTopology WaldTopology::forest_infinity(int n_leaves) {
    return WaldTopology(n_leaves, {});
}

LeafMask WaldTopology::block_of(int leaf) const {
    LeafMask bit = leaf_bit(leaf);
    for (LeafMask b : blocks_)
        if (b & bit) return b;
    throw std::invalid_argument("leaf " + std::to_string(leaf) + " beyond leaf count");
}

int WaldTopology::index_of(const Split& e) const {
    auto it = std::lower_bound(splits_.begin(), splits_.end(), e);
    if (it != splits_.end() && *it == e) return static_cast<int>(it - splits_.begin());
    return -1;
}

std::vector<int> WaldTopology::edges_on_path(int u, int v) const {
    std::vector<int> out;
    if (u == v) return out;
    for (std::size_t i = 0; i < splits_.size(); ++i)
        if (splits_[i].separates(u, v)) out.push_back(static_cast<int>(i));
    return out;
}

std::string WaldTopology::id() const {
    if (splits_.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < splits_.size(); ++i) {
        if (i) out += ';';
        out += to_string(splits_[i]);
    }
    return out;
}

WaldTopology validate_topology(const std::vector<Split>& splits, int n_leaves) {
    return WaldTopology(n_leaves, splits);
}

}  // namespace wald
