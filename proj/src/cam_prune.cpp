#include "climcausal/cam_prune.hpp"

#include "climcausal/error.hpp"
#include "climcausal/parallel.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace climcausal {

void PruneConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Config, "prune alpha must lie in (0, 1]");
  if (basis_size < 2) fail(ErrorKind::Config, "spline basis size must be at least 2");
}

const EdgeTest* PruneResult::test(std::size_t from, std::size_t to) const {
  for (const auto& t : tests)
    if (t.from == from && t.to == to) return &t;
  return nullptr;
}

CausalGraph full_graph_from_order(const TopologicalOrder& order) {
  CausalGraph g(order.labels);
  for (std::size_t a = 0; a < order.order.size(); ++a)
    for (std::size_t b = a + 1; b < order.order.size(); ++b) g.add_edge(order.order[a], order.order[b]);
  return g;
}

// ---------------------------------------------------------------------------
// B-spline basis

namespace {

int spline_degree(int basis_size) { return std::min(3, basis_size - 1); }

double quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<double> spline_knots(const Eigen::Ref<const Eigen::VectorXd>& x, int basis_size) {
  if (basis_size < 2) fail(ErrorKind::Config, "spline basis size must be at least 2");
  if (x.size() < 2) fail(ErrorKind::Data, "spline basis needs at least 2 points");
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) fail(ErrorKind::Data, "degenerate (constant) column passed to spline basis");

  const int degree = spline_degree(basis_size);
  const int interior = basis_size - degree - 1;
  std::vector<double> knots(static_cast<std::size_t>(degree + 1), sorted.front());
  for (int k = 1; k <= interior; ++k) knots.push_back(quantile(sorted, static_cast<double>(k) / (interior + 1)));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), sorted.back());
  return knots;
}

Eigen::MatrixXd spline_basis(const Eigen::Ref<const Eigen::VectorXd>& x, int basis_size) {
  const auto knots = spline_knots(x, basis_size);
  const int p = spline_degree(basis_size);
  const auto B = static_cast<std::size_t>(basis_size);
  std::size_t last_span = B - 1;
  while (knots[last_span] == knots[last_span + 1]) --last_span;

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.size(), basis_size);
  std::vector<double> N(static_cast<std::size_t>(p + 1)), left(N.size()), right(N.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    std::size_t span = last_span;
    if (xi < knots[B]) {
      span = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), xi) - knots.begin()) - 1;
      span = std::clamp(span, static_cast<std::size_t>(p), B - 1);
    }
    // Non-zero basis functions on the span (triangular de Boor scheme).
    N[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
      left[static_cast<std::size_t>(j)] = xi - knots[span + 1 - static_cast<std::size_t>(j)];
      right[static_cast<std::size_t>(j)] = knots[span + static_cast<std::size_t>(j)] - xi;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double temp = N[static_cast<std::size_t>(r)] /
                            (right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)]);
        N[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
        saved = left[static_cast<std::size_t>(j - r)] * temp;
      }
      N[static_cast<std::size_t>(j)] = saved;
    }
    for (int r = 0; r <= p; ++r)
      out(i, static_cast<Eigen::Index>(span) - p + r) = N[static_cast<std::size_t>(r)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nested F-test

namespace {

struct LsFit {
  double rss = 0.0;
  Eigen::Index rank = 0;
};

LsFit least_squares(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::VectorXd beta = qr.solve(y);
  return {(y - X * beta).squaredNorm(), qr.rank()};
}

Eigen::MatrixXd drop_columns(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<Eigen::Index>& dropped) {
  Eigen::MatrixXd out(X.rows(), X.cols() - static_cast<Eigen::Index>(dropped.size()));
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    if (std::find(dropped.begin(), dropped.end(), c) == dropped.end()) out.col(k++) = X.col(c);
  return out;
}

}  // namespace

NestedFTest nested_f_test(const Eigen::Ref<const Eigen::MatrixXd>& full, const Eigen::Ref<const Eigen::VectorXd>& y,
                          const std::vector<Eigen::Index>& dropped_columns) {
  const LsFit big = least_squares(full, y);
  const Eigen::MatrixXd reduced_design = drop_columns(full, dropped_columns);
  const LsFit small = reduced_design.cols() > 0 ? least_squares(reduced_design, y) : LsFit{y.squaredNorm(), 0};

  NestedFTest out;
  out.df1 = static_cast<double>(big.rank - small.rank);
  out.df2 = static_cast<double>(full.rows() - big.rank);
  if (out.df1 <= 0.0 || out.df2 <= 0.0) return out;
  const double gain = std::max(0.0, small.rss - big.rss);
  if (big.rss <= 0.0) {
    out.f_statistic = gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.p_value = gain > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.f_statistic = (gain / out.df1) / (big.rss / out.df2);
  const boost::math::fisher_f dist(out.df1, out.df2);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.f_statistic));
  return out;
}

// ---------------------------------------------------------------------------
// Pruning

PruneResult prune_edges(const SampleMatrix& samples, const TopologicalOrder& order, const PruneConfig& cfg) {
  cfg.validate();
  order.validate();
  if (order.labels != samples.labels) fail(ErrorKind::Config, "order labels do not match sample labels");
  const std::size_t d = samples.cols();
  const std::size_t n = samples.rows();
  const auto B = static_cast<std::size_t>(cfg.basis_size);
  if (!(n > d * B + 1))
    fail(ErrorKind::Config, "pruning needs n > d * basis_size + 1 (n = " + std::to_string(n) + ", d = " +
                                std::to_string(d) + ", basis_size = " + std::to_string(B) + ")");

  // Partition of unity makes the first basis column redundant with the intercept.
  std::vector<Eigen::MatrixXd> blocks(d);
  for (std::size_t c = 0; c < d; ++c) {
    const Eigen::MatrixXd basis = spline_basis(samples.data.col(static_cast<Eigen::Index>(c)), cfg.basis_size);
    blocks[c] = basis.rightCols(basis.cols() - 1);
  }

  struct NodeResult {
    std::vector<EdgeTest> tests;
    std::vector<std::string> warnings;
  };
  std::vector<NodeResult> per_position(d);

  parallel_for(d, cfg.threads, [&](std::size_t pos) {
    const std::size_t v = order.order[pos];
    if (pos == 0) return;
    const Eigen::VectorXd y = samples.data.col(static_cast<Eigen::Index>(v));
    NodeResult& result = per_position[pos];

    // Add parent blocks one at a time; a block that does not raise the rank
    // by its full width is dropped.
    Eigen::MatrixXd design = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 1);
    std::vector<std::pair<std::size_t, Eigen::Index>> included;  // (parent, first column)
    for (std::size_t k = 0; k < pos; ++k) {
      const std::size_t u = order.order[k];
      Eigen::MatrixXd candidate(design.rows(), design.cols() + blocks[u].cols());
      candidate << design, blocks[u];
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(candidate);
      EdgeTest t;
      t.from = u;
      t.to = v;
      if (qr.rank() < candidate.cols()) {
        t.rank_deficient = true;
        result.warnings.push_back("rank-deficient spline block for " + samples.labels[u] + " -> " + samples.labels[v] +
                                  "; treated as not significant");
      } else {
        included.emplace_back(u, design.cols());
        design = std::move(candidate);
      }
      result.tests.push_back(t);
    }

    for (auto& t : result.tests) {
      if (t.rank_deficient) continue;
      const auto it = std::find_if(included.begin(), included.end(), [&](const auto& p) { return p.first == t.from; });
      std::vector<Eigen::Index> cols(static_cast<std::size_t>(blocks[t.from].cols()));
      std::iota(cols.begin(), cols.end(), it->second);
      const NestedFTest f = nested_f_test(design, y, cols);
      t.f_statistic = f.f_statistic;
      t.p_value = f.p_value;
      t.kept = f.p_value < cfg.alpha;
    }
  });

  PruneResult out{CausalGraph(samples.labels), {}, {}};
  for (auto& r : per_position) {
    for (const auto& t : r.tests) {
      if (t.kept) out.graph.add_edge(t.from, t.to);
      out.tests.push_back(t);
    }
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  return out;
}

}  // namespace climcausal
