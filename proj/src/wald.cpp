#include "wald/wald.hpp"

#include <stdexcept>

#include "wald/errors.hpp"

namespace wald {

Wald::Wald(WaldTopology topology, std::vector<double> lambda)
    : topology_(std::move(topology)), lambda_(std::move(lambda)) {
    if (lambda_.size() != topology_.splits().size())
        throw std::invalid_argument("weight count does not match split count");
    for (std::size_t i = 0; i < lambda_.size(); ++i)
        if (!(lambda_[i] > 0.0) || !(lambda_[i] < 1.0))
            throw std::invalid_argument("weight of split " + to_string(topology_.splits()[i]) +
                                        " must lie strictly in (0,1)");
}

Wald Wald::forest_infinity(int n_leaves) {
    return Wald(WaldTopology::forest_infinity(n_leaves), {});
}

double Wald::weight_of(const Split& e) const {
    int i = topology_.index_of(e);
    if (i < 0) throw UnknownSplit("split " + to_string(e) + " is not in the topology");
    return lambda_[static_cast<std::size_t>(i)];
}

}  // namespace wald
