#include "climcausal/stein.hpp"

#include "climcausal/error.hpp"
#include "climcausal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace climcausal {

void KernelParams::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    fail(ErrorKind::Config, "kernel bandwidth must be positive and finite");
  if (!(ridge > 0.0) || !std::isfinite(ridge)) fail(ErrorKind::Config, "kernel ridge must be positive and finite");
}

double median_bandwidth(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const auto n = x.rows();
  if (n < 2) fail(ErrorKind::Data, "median bandwidth needs at least 2 samples");
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) dist.push_back((x.row(i) - x.row(j)).norm());

  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0)
    median = 0.5 * (median + *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid)));
  if (!(median > 0.0)) fail(ErrorKind::Data, "degenerate data: median pairwise distance is zero");
  return median;
}

double median_bandwidth(const SampleMatrix& samples) { return median_bandwidth(samples.data); }

Eigen::MatrixXd rbf_kernel_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x, double bandwidth, unsigned threads) {
  const auto n = x.rows();
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  Eigen::MatrixXd K(n, n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = std::exp(-(x.row(i) - x.row(j)).squaredNorm() * inv);
  });
  return K;
}

namespace {

struct KernelAggregates {
  Eigen::MatrixXd K;  // n x n
  Eigen::MatrixXd b;  // sum_j dK/dx_i
  Eigen::MatrixXd c;  // sum_j d2K/dx_i^2
};

KernelAggregates build_aggregates(const Eigen::Ref<const Eigen::MatrixXd>& x, double s, bool second_order,
                                  unsigned threads) {
  const auto n = x.rows();
  const auto d = x.cols();
  const double s2 = s * s;
  const double s4 = s2 * s2;
  KernelAggregates agg;
  agg.K.resize(n, n);
  agg.b.setZero(n, d);
  if (second_order) agg.c.setZero(n, d);

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    Eigen::RowVectorXd diff(d);
    for (Eigen::Index j = 0; j < n; ++j) {
      diff = x.row(i) - x.row(j);
      const double k = std::exp(-diff.squaredNorm() / (2.0 * s2));
      agg.K(i, j) = k;
      for (Eigen::Index a = 0; a < d; ++a) {
        agg.b(i, a) += -diff[a] / s2 * k;
        if (second_order) agg.c(i, a) += (diff[a] * diff[a] / s4 - 1.0 / s2) * k;
      }
    }
  });
  return agg;
}

std::string condition_note(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
  const double lo = diag.minCoeff(), hi = diag.maxCoeff();
  std::ostringstream os;
  os << "cholesky diagonal range [" << lo << ", " << hi << "], condition estimate ~" << (hi * hi) / (lo * lo);
  return os.str();
}

Eigen::LLT<Eigen::MatrixXd> factor(Eigen::MatrixXd& K, double ridge) {
  K.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "kernel matrix plus ridge is not positive definite (n = " + std::to_string(K.rows()) + ")");
  return llt;
}

void check_finite(const Eigen::MatrixXd& m, const Eigen::LLT<Eigen::MatrixXd>& llt, const char* what) {
  if (!m.allFinite())
    fail(ErrorKind::Numerical, std::string("Stein ") + what + " estimate is not finite; " + condition_note(llt));
}

void check_inputs(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params) {
  params.validate();
  if (x.rows() < 2) fail(ErrorKind::Data, "Stein estimation needs at least 2 samples");
  if (!x.allFinite()) fail(ErrorKind::Data, "Stein estimation input holds non-finite values");
  bool distinct = false;
  for (Eigen::Index i = 1; i < x.rows() && !distinct; ++i) distinct = x.row(i) != x.row(0);
  if (!distinct) fail(ErrorKind::Data, "degenerate data: all samples are identical");
}

}  // namespace

ScoreEstimate stein_score_estimate(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params,
                                   unsigned threads) {
  check_inputs(x, params);
  auto agg = build_aggregates(x, params.bandwidth, false, threads);
  const auto llt = factor(agg.K, params.ridge);
  ScoreEstimate out{llt.solve(agg.b), params};
  check_finite(out.G, llt, "score");
  return out;
}

ScoreEstimate stein_score_estimate(const SampleMatrix& samples, const KernelParams& params, unsigned threads) {
  return stein_score_estimate(samples.data, params, threads);
}

std::pair<ScoreEstimate, HessianDiagEstimate> stein_estimates(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                                              const KernelParams& params, unsigned threads) {
  check_inputs(x, params);
  auto agg = build_aggregates(x, params.bandwidth, true, threads);
  const auto llt = factor(agg.K, params.ridge);
  ScoreEstimate score{llt.solve(agg.b), params};
  check_finite(score.G, llt, "score");
  HessianDiagEstimate hess{llt.solve(agg.c), params};
  hess.H.array() -= score.G.array().square();
  check_finite(hess.H, llt, "Hessian diagonal");
  return {std::move(score), std::move(hess)};
}

HessianDiagEstimate stein_hessian_diag(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params,
                                       unsigned threads) {
  return stein_estimates(x, params, threads).second;
}

HessianDiagEstimate stein_hessian_diag(const SampleMatrix& samples, const KernelParams& params, unsigned threads) {
  return stein_hessian_diag(samples.data, params, threads);
}

}  // namespace climcausal
