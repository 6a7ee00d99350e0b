#include "climcausal/correlation.hpp"
#include "climcausal/error.hpp"

#include <doctest.h>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>

using namespace climcausal;

namespace {

// Two-pass textbook Pearson.
double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n, mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Average rank by counting: rank = #less + (#equal + 1) / 2.
std::vector<double> rank_oracle(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : x) less += v < x[i], equal += v == x[i];
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

SampleMatrix make(const std::vector<std::vector<double>>& cols, const std::vector<std::string>& labels) {
  SampleMatrix s;
  s.data.resize(static_cast<Eigen::Index>(cols[0].size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r) s.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cols[c][r];
  s.labels = labels;
  return s;
}

std::vector<double> col(const SampleMatrix& s, Eigen::Index c) { return {s.data.col(c).data(), s.data.col(c).data() + s.data.rows()}; }

CorrelationMatrix corr_from(const std::vector<std::string>& labels, const Eigen::MatrixXd& values) {
  return {CorrelationMethod::Pearson, values, labels};
}

}  // namespace

TEST_CASE("pearson matches the two-pass oracle") {
  boost::random::mt19937_64 rng(3);
  boost::random::normal_distribution<double> nd;
  std::vector<std::vector<double>> cols(4, std::vector<double>(60));
  for (auto& c : cols)
    for (auto& v : c) v = nd(rng);
  for (std::size_t i = 0; i < 60; ++i) cols[1][i] += 0.8 * cols[0][i];
  const auto s = make(cols, {"A.A", "B.B", "C.C", "D.D"});
  const auto m = correlation_matrix(s);
  for (Eigen::Index a = 0; a < 4; ++a)
    for (Eigen::Index b = 0; b < 4; ++b)
      CHECK(m.values(a, b) == doctest::Approx(pearson_oracle(col(s, a), col(s, b))).epsilon(1e-12));
  CHECK(m.at("A.A", "B.B") == m.values(0, 1));
}

TEST_CASE("spearman uses average ranks for ties") {
  const std::vector<double> x = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
  const auto r = fractional_ranks(Eigen::Map<const Eigen::VectorXd>(x.data(), 10));
  const auto oracle = rank_oracle(x);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(r[static_cast<Eigen::Index>(i)] == oracle[i]);

  const std::vector<double> y = {2, 7, 1, 8, 2, 8, 1, 8, 2, 8};
  const auto s = make({x, y}, {"X.X", "Y.Y"});
  const auto m = correlation_matrix(s, CorrelationMethod::Spearman);
  CHECK(m.values(0, 1) == doctest::Approx(pearson_oracle(rank_oracle(x), rank_oracle(y))).epsilon(1e-12));
}

TEST_CASE("spearman is invariant under monotone transforms") {
  boost::random::mt19937_64 rng(11);
  boost::random::normal_distribution<double> nd;
  std::vector<double> a(50), b(50);
  for (std::size_t i = 0; i < 50; ++i) a[i] = nd(rng), b[i] = a[i] + nd(rng);
  std::vector<double> ea(50);
  std::transform(a.begin(), a.end(), ea.begin(), [](double v) { return std::exp(3 * v); });
  const auto m1 = correlation_matrix(make({a, b}, {"A.A", "B.B"}), CorrelationMethod::Spearman);
  const auto m2 = correlation_matrix(make({ea, b}, {"A.A", "B.B"}), CorrelationMethod::Spearman);
  CHECK(m1.values(0, 1) == doctest::Approx(m2.values(0, 1)).epsilon(1e-14));
}

TEST_CASE("duplicate columns correlate exactly one and constant columns are rejected") {
  const std::vector<double> a = {0.3, 1.7, -2.2, 5.1, 0.0};
  auto m = correlation_matrix(make({a, a}, {"A.A", "B.B"}));
  CHECK(m.values(0, 1) == 1.0);
  CHECK_THROWS_AS(correlation_matrix(make({a, {1, 1, 1, 1, 1}}, {"A.A", "K.K"})), Error);
}

TEST_CASE("screening drops weak variables and resolves near-duplicates") {
  // T is the target. A, B near-duplicates (0.99) with |r_T| 0.6 vs 0.5; C weak.
  Eigen::MatrixXd v(4, 4);
  //      A     B     C     T
  v << 1.00, 0.99, 0.10, 0.60,  //
      0.99, 1.00, 0.12, 0.50,   //
      0.10, 0.12, 1.00, 0.05,   //
      0.60, 0.50, 0.05, 1.00;
  const auto r = screen_variables(corr_from({"A", "B", "C", "T"}, v), "T");
  CHECK(r.kept == std::vector<std::string>{"A", "T"});
  REQUIRE(r.dropped.size() == 2);
  CHECK(r.dropped[0].label == "B");
  CHECK(r.dropped[0].reason == "near-duplicate-of A");
  CHECK(r.dropped[1].label == "C");
  CHECK(r.dropped[1].reason == "below-target-threshold");
}

TEST_CASE("screening keeps and flags duplicates of the target") {
  Eigen::MatrixXd v(3, 3);
  v << 1.0, 0.3, 0.99,  //
      0.3, 1.0, 0.4,    //
      0.99, 0.4, 1.0;
  const auto r = screen_variables(corr_from({"D", "E", "T"}, v), "T");
  CHECK(r.kept == std::vector<std::string>{"D", "E", "T"});
  REQUIRE(r.flagged.size() == 1);
  CHECK(r.flagged[0].label == "D");
  CHECK(r.flagged[0].twin == "T");
}

TEST_CASE("screening ties break on the smaller label") {
  Eigen::MatrixXd v(3, 3);
  v << 1.0, 0.995, 0.5,  //
      0.995, 1.0, 0.5,   //
      0.5, 0.5, 1.0;
  const auto r = screen_variables(corr_from({"Z", "M", "T"}, v), "T");
  CHECK(r.kept == std::vector<std::string>{"M", "T"});
}

TEST_CASE("screening is invariant to column permutation") {
  boost::random::mt19937_64 rng(5);
  boost::random::normal_distribution<double> nd;
  const std::size_t d = 6, n = 80;
  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  for (auto& c : cols)
    for (auto& x : c) x = nd(rng);
  for (std::size_t i = 0; i < n; ++i) {
    cols[5][i] = cols[0][i] + cols[1][i] + 0.3 * nd(rng);
    cols[2][i] = cols[0][i] + 0.01 * nd(rng);
  }
  const std::vector<std::string> labels = {"V.0", "V.1", "V.2", "V.3", "V.4", "T.T"};
  const auto base = screen_variables(correlation_matrix(make(cols, labels)), "T.T");

  std::vector<std::size_t> perm = {3, 5, 0, 4, 2, 1};
  std::vector<std::vector<double>> pc;
  std::vector<std::string> pl;
  for (auto p : perm) pc.push_back(cols[p]), pl.push_back(labels[p]);
  const auto permuted = screen_variables(correlation_matrix(make(pc, pl)), "T.T");

  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted(base.kept) == sorted(permuted.kept));
}

TEST_CASE("screening is idempotent") {
  Eigen::MatrixXd v(4, 4);
  v << 1.00, 0.99, 0.10, 0.60, 0.99, 1.00, 0.12, 0.50, 0.10, 0.12, 1.00, 0.05, 0.60, 0.50, 0.05, 1.00;
  const std::vector<std::string> labels = {"A", "B", "C", "T"};
  const auto first = screen_variables(corr_from(labels, v), "T");
  std::vector<Eigen::Index> idx;
  for (const auto& k : first.kept) idx.push_back(std::find(labels.begin(), labels.end(), k) - labels.begin());
  Eigen::MatrixXd sub(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = v(idx[a], idx[b]);
  const auto second = screen_variables(corr_from(first.kept, sub), "T");
  CHECK(second.kept == first.kept);
  CHECK(second.dropped.empty());
}

TEST_CASE("screening rejects an unknown target and bad thresholds") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(screen_variables(corr_from({"A", "B"}, v), "T"), Error);
  CHECK_THROWS_AS(screen_variables(corr_from({"A", "B"}, v), "B", 1.5), Error);
}
