#include "wald/gen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wald/embedding.hpp"
#include "wald/errors.hpp"
#include "wald/graph_forest.hpp"
#include "wald/topology.hpp"

namespace wald {

namespace {

// grow a random binary tree over the given leaf vertices by edge subdivision
void grow_tree(ForestGraph& g, const std::vector<int>& leaves, Rng& rng) {
    if (leaves.size() == 2) {
        g.edges.push_back({leaves[0], leaves[1], 1.0});
        return;
    }
    std::vector<std::size_t> tree_edges;  // indices into g.edges
    g.edges.push_back({leaves[0], leaves[1], 1.0});
    tree_edges.push_back(g.edges.size() - 1);
    for (std::size_t k = 2; k < leaves.size(); ++k) {
        std::size_t pick = tree_edges[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(tree_edges.size()) - 1))];
        int mid = g.n_vertices++;
        g.label.push_back(0);
        int v = g.edges[pick].v;
        g.edges[pick].v = mid;
        g.edges.push_back({mid, v, 1.0});
        tree_edges.push_back(g.edges.size() - 1);
        g.edges.push_back({mid, leaves[k], 1.0});
        tree_edges.push_back(g.edges.size() - 1);
    }
}

}  // namespace

Wald random_wald(int n, Rng& rng, const GenOptions& opts) {
    if (n < 2 || n > static_cast<int>(max_leaves))
        throw std::invalid_argument("random_wald: leaf count out of range");
    // random ordered partition of the leaf labels
    std::vector<std::vector<int>> blocks;
    for (int label = 1; label <= n; ++label) {
        if (blocks.empty() || rng.uniform() < opts.block_prob)
            blocks.push_back({label});
        else
            blocks[static_cast<std::size_t>(
                       rng.uniform_int(0, static_cast<int>(blocks.size()) - 1))]
                .push_back(label);
    }

    ForestGraph g;
    g.n_vertices = n;
    g.label.resize(n);
    for (int label = 1; label <= n; ++label) g.label[label - 1] = label;
    for (const auto& block : blocks)
        if (block.size() >= 2) {
            std::vector<int> verts;
            for (int label : block) verts.push_back(label - 1);
            grow_tree(g, verts, rng);
        }

    std::vector<Split> splits = graph_to_splits(g).topology().splits();

    // separation-preserving contractions: drop a split only when the leaves
    // it separates stay pairwise separated by the remainder
    for (std::size_t i = splits.size(); i-- > 0;) {
        if (rng.uniform() >= opts.drop_prob) continue;
        std::vector<Split> candidate = splits;
        candidate.erase(candidate.begin() + static_cast<long>(i));
        try {
            WaldTopology probe(n, candidate);
            splits = std::move(candidate);
        } catch (const WaldError&) {
        }
    }

    WaldTopology topo(n, splits);
    std::vector<double> lam(splits.size());
    for (double& x : lam) x = rng.uniform(opts.lambda_lo, opts.lambda_hi);
    return Wald(std::move(topo), std::move(lam));
}

namespace {

SymMatrix planar_kernel(int n, Rng& rng) {
    std::vector<double> px(n), py(n);
    for (int i = 0; i < n; ++i) {
        px[i] = rng.uniform();
        py[i] = rng.uniform();
    }
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d = std::hypot(px[i] - px[j], py[i] - py[j]);
            m(i, j) = std::exp(-d);
        }
    return SymMatrix(m);
}

SymMatrix negative_pair(int n, Rng& rng) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    int u = rng.uniform_int(0, n - 2);
    int v = rng.uniform_int(u + 1, n - 1);
    double w = rng.uniform(0.05, 0.5);
    m(u, v) = m(v, u) = -w;
    return SymMatrix(m);
}

SymMatrix broken_triple(int n, Rng& rng) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    double s = rng.uniform(0.7, 0.95);
    double t = rng.uniform(0.05, s * s - 0.05);
    m(0, 1) = m(1, 0) = s;
    m(0, 2) = m(2, 0) = s;
    m(1, 2) = m(2, 1) = t;
    return SymMatrix(m);
}

}  // namespace

SymMatrix violating_matrix(int n, Rng& rng, const std::string& condition) {
    int needed = condition == "R2" ? 4 : condition == "R4" ? 3 : 2;
    if (condition != "R2" && condition != "R3" && condition != "R4")
        throw std::invalid_argument("violating_matrix: condition must be R2, R3 or R4");
    if (n < needed || n > static_cast<int>(max_leaves))
        throw std::invalid_argument("violating_matrix: leaf count out of range");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        SymMatrix m = condition == "R2"   ? planar_kernel(n, rng)
                      : condition == "R3" ? negative_pair(n, rng)
                                          : broken_triple(n, rng);
        CheckReport rep = check_wald_matrix(m);
        if (!rep.violations.empty() && rep.violations.front().condition == condition)
            return m;
    }
    throw std::runtime_error("violating_matrix: construction did not converge");
}

}  // namespace wald
