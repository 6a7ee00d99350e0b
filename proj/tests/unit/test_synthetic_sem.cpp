#include "climcausal/error.hpp"
#include "climcausal/synthetic_sem.hpp"

#include <doctest.h>

#include <cmath>
#include <regex>

using namespace climcausal;

TEST_CASE("labels follow the indicator code pattern") {
  const auto l = synthetic_labels(12);
  CHECK(l.front() == "SYN.V00");
  CHECK(l.back() == "SYN.V11");
  const std::regex code("[A-Z0-9]+(\\.[A-Z0-9]+)+");
  for (const auto& s : l) CHECK(std::regex_match(s, code));
}

TEST_CASE("sampled DAGs are acyclic and seed-deterministic") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = sample_dag(7, 0.5, seed);
    CHECK(g.is_acyclic());
    CHECK(g == sample_dag(7, 0.5, seed));
  }
  CHECK(sample_dag(6, 0.0, 1).edge_count() == 0);
  CHECK(sample_dag(6, 1.0, 1).edge_count() == 15);
  CHECK_THROWS_AS(sample_dag(3, 1.5, 1), Error);
  CHECK_THROWS_AS(sample_dag(0, 0.5, 1), Error);
}

TEST_CASE("edge frequency matches the edge probability") {
  // 2000 graphs x 10 pairs; the standard error of the mean is about 0.0035.
  double edges = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) edges += static_cast<double>(sample_dag(5, 0.3, seed).edge_count());
  CHECK(edges / (2000.0 * 10.0) == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("mechanism parameters lie in their documented ranges") {
  const auto g = sample_dag(8, 0.6, 3);
  const auto m = sample_mechanisms(g, nonlinear_family(), 4);
  m.validate();
  for (std::size_t v = 0; v < g.size(); ++v) {
    CHECK(nonlinear_family().contains(m.nodes[v].kind));
    CHECK(m.nodes[v].noise_sigma >= 0.4);
    CHECK(m.nodes[v].noise_sigma <= 0.8);
    CHECK(m.nodes[v].scale > 0.0);
    for (double c : m.nodes[v].coefficients) {
      CHECK(std::abs(c) >= 0.5);
      CHECK(std::abs(c) <= 2.0);
    }
  }
}

TEST_CASE("linear mechanism reproduces its weighted sum with tiny noise") {
  CausalGraph g(synthetic_labels(2));
  g.add_edge(0, 1);
  SemModel m{g, {NodeMechanism{Mechanism::Linear, {}, 1.0, 1.0}, NodeMechanism{Mechanism::Linear, {2.0}, 1e-9, 1.0}}};
  const auto s = sample_data(m, 200, 5);
  const auto raw = s.raw_data();
  CHECK((raw.col(1) - 2.0 * raw.col(0)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("nonlinear mechanisms act on the scaled parent") {
  CausalGraph g(synthetic_labels(2));
  g.add_edge(0, 1);
  for (auto kind : nonlinear_family()) {
    SemModel m{g, {NodeMechanism{Mechanism::Linear, {}, 1.0, 2.0}, NodeMechanism{kind, {1.5}, 1e-9, 1.0}}};
    const auto raw = sample_data(m, 100, 6).raw_data();
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      const double z = raw(i, 0) / 2.0;
      const double f = kind == Mechanism::TanhMix ? std::tanh(3 * z) : kind == Mechanism::Sine ? std::sin(3 * z) : 0.5 * z * z;
      CHECK(raw(i, 1) == doctest::Approx(1.5 * f).epsilon(1e-6));
    }
  }
}

TEST_CASE("sampled data is standardized, deterministic and keyed") {
  const auto g = sample_dag(4, 0.5, 1);
  const auto m = sample_mechanisms(g, nonlinear_family(), 2);
  const auto a = sample_data(m, 300, 3);
  const auto b = sample_data(m, 300, 3);
  CHECK(a.data == b.data);
  CHECK(a.labels == g.labels());
  CHECK(a.row_keys.size() == 300);
  for (Eigen::Index c = 0; c < 4; ++c) CHECK(std::abs(a.data.col(c).mean()) < 1e-12);
  CHECK(sample_data(m, 300, 4).data != a.data);
}

TEST_CASE("pilot scales make nonlinear inputs roughly unit scale") {
  CausalGraph g(synthetic_labels(3));
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const auto m = sample_mechanisms(g, {Mechanism::Quadratic}, 9);
  const auto raw = sample_data(m, 5000, 10).raw_data();
  for (Eigen::Index c = 0; c < 2; ++c) {
    const double mean = raw.col(c).mean();
    const double sd = std::sqrt((raw.col(c).array() - mean).square().sum() / 4999.0);
    CHECK(sd / m.nodes[static_cast<std::size_t>(c)].scale == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("manifest round trip") {
  const auto g = sample_dag(5, 0.5, 21);
  const auto m = sample_mechanisms(g, all_mechanisms(), 22);
  const auto text = write_manifest(m);
  const auto back = read_manifest(text);
  CHECK(back.graph == m.graph);
  for (std::size_t v = 0; v < 5; ++v) {
    CHECK(back.nodes[v].kind == m.nodes[v].kind);
    CHECK(back.nodes[v].coefficients == m.nodes[v].coefficients);
    CHECK(back.nodes[v].noise_sigma == m.nodes[v].noise_sigma);
    CHECK(back.nodes[v].scale == m.nodes[v].scale);
  }
  CHECK(write_manifest(back) == text);
  CHECK_THROWS_AS(read_manifest("nodes A\nbogus line\n"), Error);
}

TEST_CASE("invalid models are rejected") {
  CausalGraph g(synthetic_labels(2));
  g.add_edge(0, 1);
  SemModel bad{g, {NodeMechanism{}, NodeMechanism{}}};  // child lacks a coefficient
  CHECK_THROWS_AS(sample_data(bad, 10, 1), Error);
  CHECK_THROWS_AS(sample_mechanisms(g, {}, 1), Error);
  CHECK_THROWS_AS(parse_mechanism("cubic"), Error);
}
