#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wald {

// Leaf sets are bitmasks: bit (label-1) is set when leaf `label` is in the
// set. This caps the leaf count at 64, which is far beyond what exhaustive
// recognition can handle anyway.
using LeafMask = std::uint64_t;

constexpr int max_leaves = 64;

LeafMask leaf_bit(int label);
LeafMask mask_from_labels(const std::vector<int>& labels);
std::vector<int> labels_from_mask(LeafMask m);
int smallest_label(LeafMask m);

// An unordered bipartition {A, B} of its support A ∪ B. Canonical
// orientation: block a holds the smallest label of the support, so {A,B} and
// {B,A} compare equal. Ordering is lexicographic on the canonical (a, b)
// pair, which gives every split collection a deterministic order.
class Split {
public:
    Split(LeafMask a, LeafMask b);

    LeafMask a() const { return a_; }
    LeafMask b() const { return b_; }
    LeafMask support() const { return a_ | b_; }
    bool separates(int u, int v) const;

    friend auto operator<=>(const Split&, const Split&) = default;

private:
    LeafMask a_;
    LeafMask b_;
};

Split make_split(const std::vector<int>& a, const std::vector<int>& b);

// True iff at least one of A∩C, A∩D, B∩C, B∩D is empty.
bool split_compatible(const Split& e1, const Split& e2);

// (A∩block)|(B∩block) when both intersections are nonempty, absent otherwise.
std::optional<Split> restrict_split(const Split& e, LeafMask block);

// "1,2|3,4" style rendering, used in error messages and topology ids.
std::string to_string(const Split& e);
std::string to_string(LeafMask m);

}  // namespace wald
