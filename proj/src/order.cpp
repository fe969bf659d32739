#include "wald/order.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "wald/errors.hpp"

namespace wald {

const std::vector<Split>* OrderWitness::r_set(const Split& e_prime) const {
    for (const auto& [ep, r] : corresponding)
        if (ep == e_prime) return &r;
    return nullptr;
}

std::optional<OrderWitness> partial_order_compare(const WaldTopology& e_prime,
                                                  const WaldTopology& e) {
    if (e_prime.n_leaves() != e.n_leaves())
        throw std::invalid_argument("topologies compare only over one leaf set");

    // Refinement: every E'-block sits inside some E-block.
    for (LeafMask bp : e_prime.blocks()) {
        bool contained = false;
        for (LeafMask b : e.blocks())
            if ((bp & ~b) == 0) { contained = true; break; }
        if (!contained) return std::nullopt;
    }

    // Cut: two distinct E'-blocks inside one E-block are separated wholesale
    // by some split of E.
    const auto& bps = e_prime.blocks();
    for (std::size_t i = 0; i < bps.size(); ++i) {
        for (std::size_t j = i + 1; j < bps.size(); ++j) {
            bool same_container = false;
            for (LeafMask b : e.blocks())
                if ((bps[i] & ~b) == 0 && (bps[j] & ~b) == 0) { same_container = true; break; }
            if (!same_container) continue;
            bool cut_found = false;
            for (const Split& f : e.splits()) {
                bool ij = (bps[i] & ~f.a()) == 0 && (bps[j] & ~f.b()) == 0;
                bool ji = (bps[i] & ~f.b()) == 0 && (bps[j] & ~f.a()) == 0;
                if (ij || ji) { cut_found = true; break; }
            }
            if (!cut_found) return std::nullopt;
        }
    }

    // Classify each split of E by its valid restriction. Compatibility of E
    // with the cut splits verified above makes that restriction unique.
    OrderWitness w;
    for (const Split& ep : e_prime.splits()) w.corresponding.emplace_back(ep, std::vector<Split>{});
    for (const Split& f : e.splits()) {
        std::optional<Split> restriction;
        for (LeafMask bp : e_prime.blocks()) {
            auto r = restrict_split(f, bp);
            if (!r) continue;
            if (restriction)
                throw std::logic_error("split restricts to two blocks despite the cut property");
            restriction = r;
        }
        if (!restriction) {
            w.cut.push_back(f);
        } else {
            int k = e_prime.index_of(*restriction);
            if (k >= 0)
                w.corresponding[static_cast<std::size_t>(k)].second.push_back(f);
            else
                w.disappearing.push_back(f);
        }
    }

    // Restriction: every split of E' must actually arise, i.e. R_{e'} != {}.
    for (const auto& [ep, r] : w.corresponding)
        if (r.empty()) return std::nullopt;

    return w;
}

std::vector<double> boundary_lambda_star(const Wald& sub, const WaldTopology& e,
                                         const OrderWitness& witness) {
    std::vector<double> star(e.splits().size(), 0.0);
    for (const Split& f : witness.cut) star[static_cast<std::size_t>(e.index_of(f))] = 1.0;
    for (const Split& f : witness.disappearing)
        star[static_cast<std::size_t>(e.index_of(f))] = 0.0;
    for (const auto& [ep, r] : witness.corresponding) {
        double lam = sub.weight_of(ep);
        double share = 1.0 - std::pow(1.0 - lam, 1.0 / static_cast<double>(r.size()));
        for (const Split& f : r) star[static_cast<std::size_t>(e.index_of(f))] = share;
    }
    return star;
}

Wald sub_wald_from_boundary(const WaldTopology& e, const std::vector<double>& lambda_star) {
    const auto& splits = e.splits();
    if (lambda_star.size() != splits.size())
        throw std::invalid_argument("lambda* must cover every split of the topology");
    for (double v : lambda_star)
        if (!(v >= 0.0) || !(v <= 1.0))
            throw DomainError("lambda* entries must lie in [0,1]");

    const int n = e.n_leaves();

    // An off-diagonal entry of the continued matrix equals one exactly when
    // every split on the path carries weight zero; such a matrix is singular
    // and lies outside the embedded space.
    for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v < n + 1; ++v) {
            if (e.block_of(u) != e.block_of(v)) continue;
            bool all_zero = true;
            for (int k : e.edges_on_path(u, v))
                if (lambda_star[static_cast<std::size_t>(k)] != 0.0) { all_zero = false; break; }
            if (all_zero)
                throw NotInWaldSpace("entry (" + std::to_string(u) + "," + std::to_string(v) +
                                     ") of the continued matrix equals 1");
        }
    }

    // rho* within the original blocks; zero across them.
    std::vector<double> rho(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [&](int u, int v) -> double& {
        return rho[static_cast<std::size_t>(u - 1) * n + (v - 1)];
    };
    for (int u = 1; u <= n; ++u) {
        at(u, u) = 1.0;
        for (int v = u + 1; v <= n; ++v) {
            double p = 0.0;
            if (e.block_of(u) == e.block_of(v)) {
                p = 1.0;
                for (int k : e.edges_on_path(u, v))
                    p *= 1.0 - lambda_star[static_cast<std::size_t>(k)];
            }
            at(u, v) = at(v, u) = p;
        }
    }

    // New blocks: connectivity classes of rho* > 0 (union-find).
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (at(u, v) > 0.0) parent[static_cast<std::size_t>(find(v - 1))] = find(u - 1);
    std::vector<LeafMask> new_blocks;
    {
        std::map<int, LeafMask> acc;
        for (int u = 1; u <= n; ++u) acc[find(u - 1)] |= leaf_bit(u);
        for (const auto& [root, m] : acc) new_blocks.push_back(m);
    }

    // Splits of the boundary wald: valid restrictions of nonzero-weight
    // splits, with the surviving factors multiplied together.
    std::map<Split, double> one_minus;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (lambda_star[i] == 0.0) continue;
        std::optional<Split> restriction;
        for (LeafMask b : new_blocks) {
            auto r = restrict_split(splits[i], b);
            if (!r) continue;
            if (restriction)
                throw std::logic_error("boundary split restricts to two blocks");
            restriction = r;
        }
        if (!restriction) continue;  // separation absorbed by a full cut
        auto [it, inserted] = one_minus.try_emplace(*restriction, 1.0);
        it->second *= 1.0 - lambda_star[i];
    }

    std::vector<Split> new_splits;
    std::vector<double> new_lambda;
    for (const auto& [s, om] : one_minus) {
        new_splits.push_back(s);
        new_lambda.push_back(1.0 - om);
    }

    Wald result = [&] {
        try {
            WaldTopology topo(n, new_splits);
            // Weights were built in std::map order over canonical splits, and
            // the topology sorts the same way, so they line up.
            return Wald(std::move(topo), std::move(new_lambda));
        } catch (const WaldError& err) {
            throw NotInWaldSpace(std::string("restricted split system is invalid: ") + err.what());
        } catch (const std::invalid_argument& err) {
            throw NotInWaldSpace(std::string("restricted split system is invalid: ") + err.what());
        }
    }();

    // Cross-check: the boundary wald reproduces the continued matrix.
    for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v <= n; ++v) {
            double q = 0.0;
            if (result.topology().block_of(u) == result.topology().block_of(v)) {
                q = 1.0;
                for (int k : result.topology().edges_on_path(u, v))
                    q *= 1.0 - result.lambda()[static_cast<std::size_t>(k)];
            }
            if (std::abs(q - at(u, v)) > 1e-12)
                throw NotInWaldSpace("continued matrix is not the image of any wald");
        }
    }

    return result;
}

}  // namespace wald
