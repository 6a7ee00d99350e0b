#pragma once

#include "climcausal/graph.hpp"

#include <cstddef>
#include <vector>

namespace climcausal {

struct MetricsReport {
  std::size_t shd = 0;
  std::size_t sid = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double l2 = 0.0;
};

struct EdgePrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Every metric first aligns `estimate` to `truth`'s label order. Graphs over
// different label sets raise a Data error.

// Skeleton mismatches count 1 each; an edge present in both with opposite
// direction also counts 1.
std::size_t shd(const CausalGraph& truth, const CausalGraph& estimate);

// Structural intervention distance: ordered pairs (i, j) for which the
// estimate's parent set of i is not a valid adjustment set for the effect of i
// on j in the true graph. When j is itself an estimated parent of i, the
// estimate claims "no effect", which is right iff j is not a true descendant of i.
std::size_t sid(const CausalGraph& truth, const CausalGraph& estimate);

// Directed-edge precision / recall / F1. An empty estimate has precision 1 iff
// the truth is empty too; an empty truth has recall 1.
EdgePrf edge_prf(const CausalGraph& truth, const CausalGraph& estimate);

// Frobenius norm of the 0/1 adjacency difference.
double l2_distance(const CausalGraph& truth, const CausalGraph& estimate);

MetricsReport evaluate(const CausalGraph& truth, const CausalGraph& estimate);

// d-separation of a and b given `given`, via the moralized ancestral graph.
bool d_separated(const CausalGraph& g, std::size_t a, std::size_t b, const std::vector<std::size_t>& given);

// `estimate` relabelled into `truth`'s node order.
CausalGraph align_to(const CausalGraph& truth, const CausalGraph& estimate);

}  // namespace climcausal
