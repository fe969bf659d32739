#pragma once

#include <vector>

#include "wald/wald.hpp"

namespace wald {

// Vertex-labeled forest with positive edge lengths. label[v] is a leaf label
// in 1..N or 0 for an unlabeled interior vertex. Canonical graphs (the output
// of splits_to_graph) have no unlabeled vertex of degree below three;
// graph_to_splits additionally tolerates unlabeled degree-two vertices, which
// the Newick parser can produce at tree roots, by merging the two incident
// edges into one split.
struct ForestGraph {
    struct Edge {
        int u = 0;
        int v = 0;
        double length = 0.0;
    };

    int n_vertices = 0;
    std::vector<int> label;
    std::vector<Edge> edges;
};

// Every edge becomes the split of its component's leaf labels obtained by
// deleting it; lengths convert to weights via lambda = 1 - exp(-l), with
// duplicate splits merging additively in length.
Wald graph_to_splits(const ForestGraph& g);

// Canonical inverse: one tree per multi-leaf block built from the laminar
// cluster family of the splits, isolated vertices for singleton blocks,
// lengths l = -log(1 - lambda).
ForestGraph splits_to_graph(const Wald& w);

// Equivalence in the sense of identical split decompositions, with weights
// compared within tol.
bool phylo_equivalent(const ForestGraph& a, const ForestGraph& b, double tol = 1e-9);

}  // namespace wald
