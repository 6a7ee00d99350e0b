#pragma once

#include "climcausal/panel.hpp"
#include "climcausal/stein.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace climcausal {

struct ScoreConfig {
  double ridge = 0.01;
  // Rows beyond this cap are subsampled (seeded, without replacement).
  std::size_t subsample_cap = 5000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct LeafRound {
  std::vector<std::string> remaining;  // labels still in play, input order
  Eigen::VectorXd variances;           // one entry per remaining label
  std::size_t chosen = 0;              // index into the original columns
  double bandwidth = 0.0;
};

struct TopologicalOrder {
  std::vector<std::size_t> order;  // sources first; round-1 leaf last
  std::vector<std::string> labels; // labels of the input columns
  std::vector<LeafRound> trace;   // empty for orders supplied from outside
  std::size_t rows_used = 0;
  bool subsampled = false;

  std::vector<std::string> ordered_labels() const;
  void validate() const;
};

// Per-column sample variance (n - 1 denominator) of the Hessian-diagonal estimate.
Eigen::VectorXd leaf_scores(const HessianDiagEstimate& hessian);
Eigen::VectorXd leaf_scores(const Eigen::Ref<const Eigen::MatrixXd>& hessian);

// Repeatedly estimates the Hessian diagonal on the remaining columns (fresh
// median bandwidth each round), removes the column with the smallest variance
// (lowest index on ties) and prepends it to the order.
TopologicalOrder estimate_order(const SampleMatrix& samples, const ScoreConfig& cfg = {});

// Number of edges u -> v of `truth` that the order places with v before u.
std::size_t order_divergence(const std::vector<std::size_t>& order,
                             const std::vector<std::pair<std::size_t, std::size_t>>& true_edges);

}  // namespace climcausal
