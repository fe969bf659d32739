#include "wald/forest_json.hpp"

#include <stdexcept>
#include <vector>

namespace wald {

nlohmann::json wald_to_json(const Wald& w) {
    nlohmann::json splits = nlohmann::json::array();
    const auto& topo = w.topology();
    for (std::size_t i = 0; i < topo.splits().size(); ++i) {
        const Split& e = topo.splits()[i];
        splits.push_back({{"a", labels_from_mask(e.a())},
                          {"b", labels_from_mask(e.b())},
                          {"lambda", w.lambda()[i]}});
    }
    return {{"n_leaves", topo.n_leaves()}, {"splits", splits}};
}

Wald wald_from_json(const nlohmann::json& j) {
    try {
        int n = j.at("n_leaves").get<int>();
        std::vector<Split> splits;
        std::vector<double> lambda;
        for (const auto& js : j.at("splits")) {
            auto a = js.at("a").get<std::vector<int>>();
            auto b = js.at("b").get<std::vector<int>>();
            splits.push_back(make_split(a, b));
            lambda.push_back(js.at("lambda").get<double>());
        }
        // construction order must match the canonical topology order
        WaldTopology topo(n, splits);
        std::vector<double> ordered(lambda.size());
        for (std::size_t i = 0; i < splits.size(); ++i) {
            int k = topo.index_of(splits[i]);
            if (k < 0) throw std::logic_error("split lost during canonicalization");
            ordered[k] = lambda[i];
        }
        return Wald(topo, ordered);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("forest json schema violation: ") + e.what());
    }
}

}  // namespace wald
