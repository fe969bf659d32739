#pragma once

#include <string>
#include <vector>

#include "wald/graph_forest.hpp"

namespace wald {

// Parses one or more semicolon-terminated Newick trees into a forest.
// Dialect: leaf tokens are the integer labels 1..N; an integer token after a
// group attaches as a label too (interior vertices may carry labels);
// non-integer interior names are ignored; branch lengths are mandatory on
// every edge and must be positive. A tree's root may be an unlabeled
// degree-two vertex (the usual rooted-binary writing of an unrooted tree);
// any other unlabeled vertex of degree below three is rejected.
ForestGraph parse_newick(const std::string& text);

// Deterministic inverse: components ordered by smallest label, children by
// smallest descendant label, unlabeled pass-through vertices suppressed with
// their edge lengths added. parse_newick(serialize_newick(f)) is
// phylogenetically equivalent to f.
std::string serialize_newick(const ForestGraph& f);

// lambda = 1 - exp(-l) and its inverse l = -log(1 - lambda).
double length_to_weight(double l);
double weight_to_length(double lambda);
std::vector<double> lengths_to_weights(const std::vector<double>& l);
std::vector<double> weights_to_lengths(const std::vector<double>& lambda);

}  // namespace wald
