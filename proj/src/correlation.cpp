#include "climcausal/correlation.hpp"

#include "climcausal/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace climcausal {

double CorrelationMatrix::at(const std::string& a, const std::string& b) const {
  const auto ia = std::find(labels.begin(), labels.end(), a);
  const auto ib = std::find(labels.begin(), labels.end(), b);
  if (ia == labels.end() || ib == labels.end())
    fail(ErrorKind::Config, "correlation lookup: unknown label " + (ia == labels.end() ? a : b));
  return values(ia - labels.begin(), ib - labels.begin());
}

Eigen::VectorXd fractional_ranks(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto n = x.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && x[idx[static_cast<std::size_t>(j + 1)]] == x[idx[static_cast<std::size_t>(i)]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks[idx[static_cast<std::size_t>(k)]] = avg;
    i = j + 1;
  }
  return ranks;
}

CorrelationMatrix correlation_matrix(const SampleMatrix& samples, CorrelationMethod method) {
  if (samples.data.rows() < 3) fail(ErrorKind::Data, "correlation needs at least 3 rows");
  const auto d = samples.data.cols();
  Eigen::MatrixXd centered(samples.data.rows(), d);
  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::VectorXd col = samples.data.col(c);
    if (method == CorrelationMethod::Spearman) col = fractional_ranks(col);
    centered.col(c) = col.array() - col.mean();
  }
  Eigen::VectorXd ss(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    ss[c] = centered.col(c).squaredNorm();
    if (!(ss[c] > 0.0)) fail(ErrorKind::Data, "degenerate (constant) column " + samples.labels[static_cast<std::size_t>(c)]);
  }

  CorrelationMatrix out;
  out.method = method;
  out.labels = samples.labels;
  out.values = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      // sqrt(s*s) == s exactly, so identical columns give exactly 1.
      const double r = centered.col(a).dot(centered.col(b)) / std::sqrt(ss[a] * ss[b]);
      out.values(a, b) = out.values(b, a) = std::clamp(r, -1.0, 1.0);
    }
  }
  return out;
}

ScreenReport screen_variables(const CorrelationMatrix& corr, const std::string& target_label, double tau_target,
                              double tau_dup) {
  if (!(tau_target >= 0.0 && tau_target < tau_dup && tau_dup <= 1.0))
    fail(ErrorKind::Config, "screening thresholds must satisfy 0 <= tau_target < tau_dup <= 1");
  const auto t_it = std::find(corr.labels.begin(), corr.labels.end(), target_label);
  if (t_it == corr.labels.end()) fail(ErrorKind::Config, "target label " + target_label + " not in correlation matrix");
  const auto t = static_cast<Eigen::Index>(t_it - corr.labels.begin());
  const auto d = static_cast<Eigen::Index>(corr.labels.size());

  ScreenReport report;
  report.tau_target = tau_target;
  report.tau_dup = tau_dup;

  auto target_strength = [&](Eigen::Index v) { return std::abs(corr.values(v, t)); };

  std::vector<bool> dropped(static_cast<std::size_t>(d), false);
  std::vector<std::string> reason(static_cast<std::size_t>(d));
  std::vector<Eigen::Index> survivors;
  for (Eigen::Index v = 0; v < d; ++v) {
    if (v != t && target_strength(v) < tau_target) {
      dropped[static_cast<std::size_t>(v)] = true;
      reason[static_cast<std::size_t>(v)] = "below-target-threshold";
    } else if (v != t) {
      survivors.push_back(v);
    }
  }
  std::sort(survivors.begin(), survivors.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double sa = target_strength(a), sb = target_strength(b);
    if (sa != sb) return sa > sb;
    return corr.labels[static_cast<std::size_t>(a)] < corr.labels[static_cast<std::size_t>(b)];
  });

  std::vector<Eigen::Index> kept_so_far;
  for (Eigen::Index v : survivors) {
    const auto& label = corr.labels[static_cast<std::size_t>(v)];
    if (std::abs(corr.values(v, t)) >= tau_dup) {
      report.flagged.push_back({label, target_label});
      kept_so_far.push_back(v);
      continue;
    }
    const auto twin = std::find_if(kept_so_far.begin(), kept_so_far.end(),
                                   [&](Eigen::Index k) { return std::abs(corr.values(v, k)) >= tau_dup; });
    if (twin != kept_so_far.end()) {
      dropped[static_cast<std::size_t>(v)] = true;
      reason[static_cast<std::size_t>(v)] = "near-duplicate-of " + corr.labels[static_cast<std::size_t>(*twin)];
    } else {
      kept_so_far.push_back(v);
    }
  }

  for (Eigen::Index v = 0; v < d; ++v) {
    const auto& label = corr.labels[static_cast<std::size_t>(v)];
    if (dropped[static_cast<std::size_t>(v)]) report.dropped.push_back({label, reason[static_cast<std::size_t>(v)]});
    else report.kept.push_back(label);
  }
  return report;
}

std::string to_string(CorrelationMethod method) {
  return method == CorrelationMethod::Pearson ? "pearson" : "spearman";
}

CorrelationMethod parse_correlation_method(const std::string& text) {
  if (text == "pearson") return CorrelationMethod::Pearson;
  if (text == "spearman") return CorrelationMethod::Spearman;
  fail(ErrorKind::Config, "unknown correlation method '" + text + "'");
}

}  // namespace climcausal
