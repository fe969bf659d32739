#include "wald/graph_forest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "wald/errors.hpp"

namespace wald {

namespace {

std::string edge_name(const ForestGraph& g, const ForestGraph::Edge& e) {
    auto name = [&](int v) {
        int lab = g.label[static_cast<std::size_t>(v)];
        return lab > 0 ? std::to_string(lab) : "#" + std::to_string(v);
    };
    return name(e.u) + "-" + name(e.v);
}

}  // namespace

Wald graph_to_splits(const ForestGraph& g) {
    const int V = g.n_vertices;
    if (static_cast<int>(g.label.size()) != V)
        throw std::invalid_argument("label vector does not match vertex count");

    int n = 0;
    std::map<int, int> label_vertex;
    for (int v = 0; v < V; ++v) {
        int lab = g.label[static_cast<std::size_t>(v)];
        if (lab == 0) continue;
        if (lab < 0) throw std::invalid_argument("negative leaf label");
        if (label_vertex.count(lab)) throw DuplicateLabel(lab);
        label_vertex[lab] = v;
        n = std::max(n, lab);
    }
    if (n < 2) throw std::invalid_argument("a forest needs at least two leaf labels");
    if (n > max_leaves) throw std::invalid_argument("more than 64 leaf labels");
    for (int u = 1; u <= n; ++u)
        if (!label_vertex.count(u))
            throw std::invalid_argument("leaf labels must cover 1.." + std::to_string(n) +
                                        " but " + std::to_string(u) + " is missing");

    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(V));
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        if (e.u < 0 || e.u >= V || e.v < 0 || e.v >= V || e.u == e.v)
            throw std::invalid_argument("edge endpoints out of range");
        if (!(e.length > 0.0)) throw NonPositiveLength(edge_name(g, e));
        adj[static_cast<std::size_t>(e.u)].push_back({e.v, static_cast<int>(i)});
        adj[static_cast<std::size_t>(e.v)].push_back({e.u, static_cast<int>(i)});
    }

    // Forest check plus component masks via one DFS sweep.
    std::vector<int> comp(static_cast<std::size_t>(V), -1);
    std::vector<LeafMask> comp_mask;
    for (int s = 0; s < V; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        int c = static_cast<int>(comp_mask.size());
        comp_mask.push_back(0);
        std::vector<std::pair<int, int>> stack{{s, -1}};
        comp[static_cast<std::size_t>(s)] = c;
        while (!stack.empty()) {
            auto [v, in_edge] = stack.back();
            stack.pop_back();
            if (g.label[static_cast<std::size_t>(v)] > 0)
                comp_mask[static_cast<std::size_t>(c)] |= leaf_bit(g.label[static_cast<std::size_t>(v)]);
            for (auto [w, ei] : adj[static_cast<std::size_t>(v)]) {
                if (ei == in_edge) continue;
                if (comp[static_cast<std::size_t>(w)] >= 0)
                    throw std::invalid_argument("graph contains a cycle");
                comp[static_cast<std::size_t>(w)] = c;
                stack.push_back({w, ei});
            }
        }
    }

    for (int v = 0; v < V; ++v)
        if (g.label[static_cast<std::size_t>(v)] == 0 && adj[static_cast<std::size_t>(v)].size() < 2)
            throw std::invalid_argument("unlabeled vertex " + std::to_string(v) + " is a leaf");

    // Deleting an edge splits its component's labels in two; accumulate
    // lengths over equal splits.
    std::map<Split, double> total_length;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        LeafMask side = 0;
        std::vector<int> stack{e.u};
        std::vector<char> seen(static_cast<std::size_t>(V), 0);
        seen[static_cast<std::size_t>(e.u)] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (g.label[static_cast<std::size_t>(v)] > 0) side |= leaf_bit(g.label[static_cast<std::size_t>(v)]);
            for (auto [w, ei] : adj[static_cast<std::size_t>(v)]) {
                if (ei == static_cast<int>(i) || seen[static_cast<std::size_t>(w)]) continue;
                seen[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
        LeafMask whole = comp_mask[static_cast<std::size_t>(comp[static_cast<std::size_t>(e.u)])];
        LeafMask other = whole & ~side;
        if (side == 0 || other == 0)
            throw std::invalid_argument("edge " + edge_name(g, e) +
                                        " has a side without any leaf label");
        total_length[Split(side, other)] += e.length;
    }

    std::vector<Split> splits;
    std::vector<double> lambda;
    for (const auto& [s, len] : total_length) {
        splits.push_back(s);
        lambda.push_back(-std::expm1(-len));
    }
    return Wald(WaldTopology(n, std::move(splits)), std::move(lambda));
}

ForestGraph splits_to_graph(const Wald& w) {
    const WaldTopology& t = w.topology();
    ForestGraph g;

    for (LeafMask block : t.blocks()) {
        std::vector<int> leaves = labels_from_mask(block);
        if (leaves.size() == 1) {
            g.label.push_back(leaves[0]);
            ++g.n_vertices;
            continue;
        }
        const int r = leaves[0];

        // Laminar clusters relative to r: each split contributes the side
        // not containing r. Parents are the smallest strict containers.
        struct Cluster {
            LeafMask mask;
            int split_index;
        };
        std::vector<Cluster> clusters;
        for (std::size_t i = 0; i < t.splits().size(); ++i) {
            const Split& e = t.splits()[i];
            if (e.support() != block) continue;
            LeafMask c = (e.a() & leaf_bit(r)) ? e.b() : e.a();
            clusters.push_back({c, static_cast<int>(i)});
        }
        std::sort(clusters.begin(), clusters.end(), [](const Cluster& x, const Cluster& y) {
            int px = std::popcount(x.mask), py = std::popcount(y.mask);
            return px != py ? px > py : x.mask < y.mask;
        });

        const int root = g.n_vertices++;
        g.label.push_back(r);
        std::vector<int> node(clusters.size());
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            node[i] = g.n_vertices++;
            g.label.push_back(0);
            int parent = root;
            // Containers precede i in the sorted order; the last (smallest)
            // one containing clusters[i] is the parent.
            for (std::size_t j = 0; j < i; ++j)
                if ((clusters[i].mask & ~clusters[j].mask) == 0) parent = node[j];
            double lam = w.lambda()[static_cast<std::size_t>(clusters[i].split_index)];
            g.edges.push_back({parent, node[i], -std::log1p(-lam)});
        }

        // Each leaf labels the node of its smallest containing cluster; the
        // separation condition makes that assignment injective.
        for (std::size_t k = 1; k < leaves.size(); ++k) {
            int leaf = leaves[k];
            int target = -1;
            for (std::size_t i = 0; i < clusters.size(); ++i)
                if (clusters[i].mask & leaf_bit(leaf)) target = static_cast<int>(i);
            if (target < 0) throw std::logic_error("leaf not covered by any cluster");
            int vtx = node[static_cast<std::size_t>(target)];
            if (g.label[static_cast<std::size_t>(vtx)] != 0)
                throw std::logic_error("two leaves map to one vertex");
            g.label[static_cast<std::size_t>(vtx)] = leaf;
        }
    }

    return g;
}

bool phylo_equivalent(const ForestGraph& a, const ForestGraph& b, double tol) {
    Wald wa = graph_to_splits(a);
    Wald wb = graph_to_splits(b);
    if (!(wa.topology() == wb.topology())) return false;
    for (std::size_t i = 0; i < wa.lambda().size(); ++i)
        if (std::abs(wa.lambda()[i] - wb.lambda()[i]) > tol) return false;
    return true;
}

}  // namespace wald
