#pragma once

#include "climcausal/panel.hpp"

#include <Eigen/Dense>

namespace climcausal {

struct KernelParams {
  double bandwidth = 1.0;  // RBF length scale
  double ridge = 0.01;     // added to the kernel diagonal

  void validate() const;
};

// Rows estimate the score d log p / dx_a at each sample.
struct ScoreEstimate {
  Eigen::MatrixXd G;
  KernelParams params;
};

// Rows estimate the diagonal of the score Jacobian d^2 log p / dx_a^2.
struct HessianDiagEstimate {
  Eigen::MatrixXd H;
  KernelParams params;
};

// Median of the n(n-1)/2 pairwise Euclidean distances between rows.
double median_bandwidth(const Eigen::Ref<const Eigen::MatrixXd>& x);
double median_bandwidth(const SampleMatrix& samples);

// First-order Stein estimator with an RBF kernel:
//   K_ij = exp(-|x_i - x_j|^2 / (2 s^2)),  b_ia = sum_j dK(x_i, x_j)/dx_ia,
//   G = (K + eta I)^{-1} b.
// Kernel rows are built in parallel with a fixed per-row summation order, so the
// result does not depend on `threads`.
ScoreEstimate stein_score_estimate(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params,
                                   unsigned threads = 1);
ScoreEstimate stein_score_estimate(const SampleMatrix& samples, const KernelParams& params, unsigned threads = 1);

// Second-order estimator: with c_ia = sum_j d^2K(x_i, x_j)/dx_ia^2,
//   H = -G * G + (K + eta I)^{-1} c   (elementwise product).
HessianDiagEstimate stein_hessian_diag(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params,
                                       unsigned threads = 1);
HessianDiagEstimate stein_hessian_diag(const SampleMatrix& samples, const KernelParams& params, unsigned threads = 1);

// Both estimates from one kernel factorization.
std::pair<ScoreEstimate, HessianDiagEstimate> stein_estimates(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                                              const KernelParams& params, unsigned threads = 1);

// Kernel matrix alone (debug dumps, tests).
Eigen::MatrixXd rbf_kernel_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x, double bandwidth, unsigned threads = 1);

}  // namespace climcausal
