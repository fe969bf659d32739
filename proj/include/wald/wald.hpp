#pragma once

#include <vector>

#include "wald/topology.hpp"

namespace wald {

// A point of wald space: a topology plus one weight λ ∈ (0,1) per split,
// stored parallel to topology().splits(). The empty topology with no weights
// is the completely disconnected forest F_∞.
class Wald {
public:
    Wald(WaldTopology topology, std::vector<double> lambda);

    static Wald forest_infinity(int n_leaves);

    const WaldTopology& topology() const { return topology_; }
    const std::vector<double>& lambda() const { return lambda_; }
    int n_leaves() const { return topology_.n_leaves(); }

    double weight_of(const Split& e) const;  // throws UnknownSplit

    bool operator==(const Wald& o) const {
        return topology_ == o.topology_ && lambda_ == o.lambda_;
    }

private:
    WaldTopology topology_;
    std::vector<double> lambda_;
};

}  // namespace wald
