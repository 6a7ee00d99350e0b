#include "climcausal/score_order.hpp"

#include "climcausal/error.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <numeric>

namespace climcausal {

std::vector<std::string> TopologicalOrder::ordered_labels() const {
  std::vector<std::string> out;
  for (std::size_t i : order) out.push_back(labels[i]);
  return out;
}

void TopologicalOrder::validate() const {
  std::vector<bool> seen(labels.size(), false);
  if (order.size() != labels.size()) fail(ErrorKind::Data, "order length does not match variable count");
  for (std::size_t i : order) {
    if (i >= labels.size() || seen[i]) fail(ErrorKind::Data, "order is not a permutation");
    seen[i] = true;
  }
  if (!trace.empty() && trace.size() != labels.size())
    fail(ErrorKind::Data, "leaf trace must be empty or have one round per variable");
}

Eigen::VectorXd leaf_scores(const Eigen::Ref<const Eigen::MatrixXd>& hessian) {
  const auto n = hessian.rows();
  if (n < 2) fail(ErrorKind::Data, "leaf scores need at least 2 rows");
  Eigen::VectorXd v(hessian.cols());
  for (Eigen::Index a = 0; a < hessian.cols(); ++a) {
    const double mean = hessian.col(a).mean();
    v[a] = (hessian.col(a).array() - mean).square().sum() / static_cast<double>(n - 1);
  }
  return v;
}

Eigen::VectorXd leaf_scores(const HessianDiagEstimate& hessian) { return leaf_scores(hessian.H); }

TopologicalOrder estimate_order(const SampleMatrix& samples, const ScoreConfig& cfg) {
  if (samples.cols() < 1) fail(ErrorKind::Data, "ordering needs at least one variable");
  if (samples.rows() < 2) fail(ErrorKind::Data, "ordering needs at least two samples");
  if (cfg.subsample_cap < 2) fail(ErrorKind::Config, "subsample cap must be at least 2");

  TopologicalOrder result;
  result.labels = samples.labels;

  Eigen::MatrixXd x = samples.data;
  if (samples.rows() > cfg.subsample_cap) {
    // Partial Fisher-Yates: the first `cap` slots become a uniform sample.
    boost::random::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> idx(samples.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t k = 0; k < cfg.subsample_cap; ++k) {
      boost::random::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
      std::swap(idx[k], idx[pick(rng)]);
    }
    idx.resize(cfg.subsample_cap);
    std::sort(idx.begin(), idx.end());
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(idx[r]));
    x = std::move(sub);
    result.subsampled = true;
  }
  result.rows_used = static_cast<std::size_t>(x.rows());

  std::vector<std::size_t> remaining(samples.cols());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> reversed;

  for (std::size_t round = 0; round < samples.cols(); ++round) {
    LeafRound trace;
    for (std::size_t c : remaining) trace.remaining.push_back(samples.labels[c]);

    Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(remaining.size()));
    for (std::size_t k = 0; k < remaining.size(); ++k)
      sub.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(remaining[k]));

    try {
      if (remaining.size() == 1) {
        trace.variances = Eigen::VectorXd::Zero(1);
      } else {
        trace.bandwidth = median_bandwidth(sub);
        const auto hess = stein_hessian_diag(sub, KernelParams{trace.bandwidth, cfg.ridge}, cfg.threads);
        trace.variances = leaf_scores(hess);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "ordering round " + std::to_string(round + 1) + ": " + e.what());
    }

    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < trace.variances.size(); ++k)
      if (trace.variances[k] < trace.variances[best]) best = k;
    const std::size_t leaf = remaining[static_cast<std::size_t>(best)];
    trace.chosen = leaf;
    reversed.push_back(leaf);
    remaining.erase(remaining.begin() + best);
    result.trace.push_back(std::move(trace));
  }
  result.order.assign(reversed.rbegin(), reversed.rend());
  return result;
}

std::size_t order_divergence(const std::vector<std::size_t>& order,
                             const std::vector<std::pair<std::size_t, std::size_t>>& true_edges) {
  std::vector<std::size_t> position(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;
  std::size_t reversed = 0;
  for (const auto& [u, v] : true_edges)
    if (position[v] < position[u]) ++reversed;
  return reversed;
}

}  // namespace climcausal
