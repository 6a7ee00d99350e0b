#include "climcausal/error.hpp"
#include "climcausal/graph_metrics.hpp"
#include "sid_oracle.hpp"

#include <doctest.h>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cmath>

using namespace climcausal;

namespace {

CausalGraph make(const std::vector<std::string>& labels, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  CausalGraph g(labels);
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

const std::vector<std::string> kABC = {"A", "B", "C"};

}  // namespace

TEST_CASE("identical graphs score zero distance and perfect PRF") {
  const auto g = make(kABC, {{0, 1}, {1, 2}});
  const auto m = evaluate(g, g);
  CHECK(m.shd == 0);
  CHECK(m.sid == 0);
  CHECK(m.l2 == 0.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
}

TEST_CASE("a reversed edge costs one in SHD") {
  const auto t = make(kABC, {{0, 1}, {1, 2}});
  const auto e = make(kABC, {{1, 0}, {1, 2}});
  CHECK(shd(t, e) == 1);
  CHECK(l2_distance(t, e) == doctest::Approx(std::sqrt(2.0)));
  const auto prf = edge_prf(t, e);
  CHECK(prf.precision == 0.5);
  CHECK(prf.recall == 0.5);
  CHECK(prf.f1 == 0.5);
}

TEST_CASE("missing and extra edges") {
  const auto t = make(kABC, {{0, 1}, {1, 2}});
  CHECK(shd(t, make(kABC, {{0, 1}})) == 1);
  CHECK(shd(t, make(kABC, {{0, 1}, {1, 2}, {0, 2}})) == 1);
  CHECK(shd(t, make(kABC, {})) == 2);
  const auto prf = edge_prf(t, make(kABC, {}));
  CHECK(prf.precision == 0.0);
  CHECK(prf.recall == 0.0);
  CHECK(prf.f1 == 0.0);
  const auto empty = make(kABC, {});
  CHECK(edge_prf(empty, empty).precision == 1.0);
  CHECK(edge_prf(empty, empty).recall == 1.0);
}

TEST_CASE("SID hand examples") {
  // Chain A -> B -> C.
  const auto t = make(kABC, {{0, 1}, {1, 2}});
  CHECK(sid(t, t) == 0);
  // Empty estimate: B and C lose their parents, so B -> A, C -> A and C -> B
  // are estimated without the back-door adjustment they need.
  CHECK(sid(t, make(kABC, {})) == 3);
  // Reversed first edge: A gets parent B, which claims A has no effect on B and
  // blocks A -> C; B loses parent A, which breaks B -> A.
  CHECK(sid(t, make(kABC, {{1, 0}, {1, 2}})) == 3);
}

TEST_CASE("SID agrees with path enumeration on every pair of 3-node DAGs") {
  const auto dags = sid_oracle::all_dags(kABC);
  REQUIRE(dags.size() == 25);
  for (const auto& t : dags)
    for (const auto& e : dags) REQUIRE(sid(t, e) == sid_oracle::sid(t, e));
}

TEST_CASE("SID agrees with path enumeration on random 4-node pairs") {
  const auto dags = sid_oracle::all_dags({"A", "B", "C", "D"});
  REQUIRE(dags.size() == 543);
  boost::random::mt19937_64 rng(17);
  boost::random::uniform_int_distribution<std::size_t> pick(0, dags.size() - 1);
  for (int k = 0; k < 200; ++k) {
    const auto& t = dags[pick(rng)];
    const auto& e = dags[pick(rng)];
    REQUIRE(sid(t, e) == sid_oracle::sid(t, e));
  }
}

TEST_CASE("d-separation hand examples") {
  const auto collider = make(kABC, {{0, 2}, {1, 2}});
  CHECK(d_separated(collider, 0, 1, {}));
  CHECK_FALSE(d_separated(collider, 0, 1, {2}));
  const auto chain = make(kABC, {{0, 1}, {1, 2}});
  CHECK_FALSE(d_separated(chain, 0, 2, {}));
  CHECK(d_separated(chain, 0, 2, {1}));
  // Conditioning on a descendant of a collider opens it.
  const auto g = make({"A", "B", "C", "D"}, {{0, 2}, {1, 2}, {2, 3}});
  CHECK_FALSE(d_separated(g, 0, 1, {3}));
}

TEST_CASE("SHD is a metric on random graphs") {
  const auto dags = sid_oracle::all_dags(kABC);
  for (const auto& a : dags)
    for (const auto& b : dags) {
      CHECK(shd(a, b) == shd(b, a));
      CHECK((shd(a, b) == 0) == (a == b));
      for (const auto& c : dags) REQUIRE(shd(a, c) <= shd(a, b) + shd(b, c));
    }
}

TEST_CASE("metrics align estimates by label") {
  const auto t = make(kABC, {{0, 1}, {1, 2}});
  const auto e = make({"C", "B", "A"}, {{2, 1}, {1, 0}});  // same edges, different node order
  CHECK(shd(t, e) == 0);
  CHECK(sid(t, e) == 0);
  CHECK(align_to(t, e) == t);
  CHECK_THROWS_AS(shd(t, make({"A", "B", "D"}, {})), Error);
}
