#pragma once

#include "climcausal/graph.hpp"
#include "climcausal/panel.hpp"
#include "climcausal/score_order.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace climcausal {

struct PruneConfig {
  double alpha = 0.001;
  int basis_size = 10;  // spline functions per parent
  unsigned threads = 1;

  void validate() const;
};

// Edge u -> v implied by the order together with its nested-model F-test.
struct EdgeTest {
  std::size_t from = 0;
  std::size_t to = 0;
  double f_statistic = 0.0;
  double p_value = 1.0;
  bool rank_deficient = false;  // block dropped from the design
  bool kept = false;
};

struct PruneResult {
  CausalGraph graph;
  std::vector<EdgeTest> tests;  // every candidate edge, grouped by child
  std::vector<std::string> warnings;

  // Lookup of a tested edge; nullptr if (from, to) was not a candidate.
  const EdgeTest* test(std::size_t from, std::size_t to) const;
};

// Edge u -> v for every u preceding v in the order.
CausalGraph full_graph_from_order(const TopologicalOrder& order);

// Clamped B-spline basis with `basis_size` functions on [min x, max x]. The
// degree is min(3, basis_size - 1); interior knots sit at equispaced sample
// quantiles. Rows sum to one.
Eigen::MatrixXd spline_basis(const Eigen::Ref<const Eigen::VectorXd>& x, int basis_size);

// Knot vector used by spline_basis (boundary knots repeated degree + 1 times).
std::vector<double> spline_knots(const Eigen::Ref<const Eigen::VectorXd>& x, int basis_size);

// For each node, regress it on the spline bases of all its predecessors and keep
// u -> v when dropping u's block gives an F-test p-value below alpha.
PruneResult prune_edges(const SampleMatrix& samples, const TopologicalOrder& order, const PruneConfig& cfg = {});

// Nested least-squares F-test of `full` against `full` minus the listed columns.
struct NestedFTest {
  double f_statistic = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p_value = 1.0;
};
NestedFTest nested_f_test(const Eigen::Ref<const Eigen::MatrixXd>& full, const Eigen::Ref<const Eigen::VectorXd>& y,
                          const std::vector<Eigen::Index>& dropped_columns);

}  // namespace climcausal
