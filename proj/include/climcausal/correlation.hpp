#pragma once

#include "climcausal/panel.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace climcausal {

enum class CorrelationMethod { Pearson, Spearman };

struct CorrelationMatrix {
  CorrelationMethod method = CorrelationMethod::Pearson;
  Eigen::MatrixXd values;
  std::vector<std::string> labels;

  double at(const std::string& a, const std::string& b) const;
};

// Pearson is the sample correlation; Spearman is Pearson on fractional ranks
// (ties get the average rank). A constant column raises a Data error naming it.
CorrelationMatrix correlation_matrix(const SampleMatrix& samples,
                                     CorrelationMethod method = CorrelationMethod::Pearson);

// 1-based fractional ranks, ties averaged.
Eigen::VectorXd fractional_ranks(const Eigen::Ref<const Eigen::VectorXd>& x);

struct DroppedVariable {
  std::string label;
  // "below-target-threshold" or "near-duplicate-of <label>"
  std::string reason;
};

struct DuplicateFlag {
  std::string label;
  std::string twin;
};

struct ScreenReport {
  std::vector<std::string> kept;  // input order preserved
  std::vector<DroppedVariable> dropped;
  // Near-duplicates that were kept anyway because their twin is the target.
  std::vector<DuplicateFlag> flagged;
  double tau_target = 0.1;
  double tau_dup = 0.98;
};

// Drops variables with |corr to target| < tau_target, then resolves near-duplicate
// pairs (|corr| >= tau_dup) greedily: variables are visited by decreasing |corr to
// target| (ties: lexicographically smaller label first) and a variable is dropped
// when it duplicates one already kept. The target and its duplicates always survive.
ScreenReport screen_variables(const CorrelationMatrix& corr, const std::string& target_label,
                              double tau_target = 0.1, double tau_dup = 0.98);

std::string to_string(CorrelationMethod method);
CorrelationMethod parse_correlation_method(const std::string& text);

}  // namespace climcausal
