#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wald/wald.hpp"

namespace wald {

// Decomposition of E induced by a comparison E' <= E. Every split of E lands
// in exactly one part: R_{e'} for the unique e' it restricts to, the
// disappearing set (valid restriction, but not a split of E'), or the cut set
// (no valid restriction to any E'-block).
struct OrderWitness {
    std::vector<std::pair<Split, std::vector<Split>>> corresponding;  // (e', R_{e'})
    std::vector<Split> disappearing;
    std::vector<Split> cut;

    // Both empty iff E = E'.
    bool equal_topologies() const { return disappearing.empty() && cut.empty(); }

    const std::vector<Split>* r_set(const Split& e_prime) const;
};

// Witness present iff E' <= E in the grove partial order (Refinement,
// Restriction and Cut all hold). Absence means "not comparable this way
// round", not an error.
std::optional<OrderWitness> partial_order_compare(const WaldTopology& e_prime,
                                                  const WaldTopology& e);

// Forward boundary construction: the corner coordinates lambda* in [0,1]^E
// (aligned with e.splits()) whose continued embedding equals phi of `sub`.
// Disappearing splits get 0, cut splits get 1, and each member of R_{e'}
// gets an equal share 1 - (1-lambda'_{e'})^(1/|R_{e'}|).
std::vector<double> boundary_lambda_star(const Wald& sub, const WaldTopology& e,
                                         const OrderWitness& witness);

// Reverse construction: recover the boundary wald from corner coordinates
// lambda* in [0,1]^E. Blocks are the connectivity classes of the continued
// matrix, splits are the valid restrictions of splits with nonzero weight,
// and weights multiply up as 1 - prod(1 - lambda*). Throws NotInWaldSpace
// when the continued matrix leaves the embedded space (some off-diagonal
// entry hits 1, or the restricted system fails validation), DomainError when
// any lambda* is outside [0,1].
Wald sub_wald_from_boundary(const WaldTopology& e, const std::vector<double>& lambda_star);

}  // namespace wald
