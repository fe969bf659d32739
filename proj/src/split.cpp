#include "wald/split.hpp"

#include <bit>
#include <stdexcept>

namespace wald {

LeafMask leaf_bit(int label) {
    if (label < 1 || label > max_leaves)
        throw std::invalid_argument("leaf label out of range: " + std::to_string(label));
    return LeafMask{1} << (label - 1);
}

LeafMask mask_from_labels(const std::vector<int>& labels) {
    LeafMask m = 0;
    for (int u : labels) m |= leaf_bit(u);
    return m;
}

std::vector<int> labels_from_mask(LeafMask m) {
    std::vector<int> out;
    while (m) {
        int i = std::countr_zero(m);
        out.push_back(i + 1);
        m &= m - 1;
    }
    return out;
}

int smallest_label(LeafMask m) {
    if (m == 0) throw std::invalid_argument("empty leaf mask");
    return std::countr_zero(m) + 1;
}

Split::Split(LeafMask a, LeafMask b) : a_(a), b_(b) {
    if (a_ == 0 || b_ == 0) throw std::invalid_argument("split blocks must be nonempty");
    if (a_ & b_) throw std::invalid_argument("split blocks must be disjoint");
    if (std::countr_zero(b_) < std::countr_zero(a_)) std::swap(a_, b_);
}

bool Split::separates(int u, int v) const {
    LeafMask bu = leaf_bit(u), bv = leaf_bit(v);
    return ((a_ & bu) && (b_ & bv)) || ((a_ & bv) && (b_ & bu));
}

Split make_split(const std::vector<int>& a, const std::vector<int>& b) {
    return Split(mask_from_labels(a), mask_from_labels(b));
}

bool split_compatible(const Split& e1, const Split& e2) {
    return (e1.a() & e2.a()) == 0 || (e1.a() & e2.b()) == 0 ||
           (e1.b() & e2.a()) == 0 || (e1.b() & e2.b()) == 0;
}

std::optional<Split> restrict_split(const Split& e, LeafMask block) {
    LeafMask ra = e.a() & block;
    LeafMask rb = e.b() & block;
    if (ra == 0 || rb == 0) return std::nullopt;
    return Split(ra, rb);
}

std::string to_string(LeafMask m) {
    std::string out;
    bool first = true;
    for (int u : labels_from_mask(m)) {
        if (!first) out += ',';
        out += std::to_string(u);
        first = false;
    }
    return out;
}

std::string to_string(const Split& e) {
    return to_string(e.a()) + "|" + to_string(e.b());
}

}  // namespace wald
