#include "climcausal/error.hpp"
#include "climcausal/pipeline.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace climcausal;

namespace {

const std::filesystem::path kFixtures = CLIMCAUSAL_FIXTURE_DIR;

PipelineConfig synthetic(std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.synthetic = SyntheticSpec{};
  cfg.synthetic->n = 400;
  cfg.seed = seed;
  return cfg;
}

PipelineConfig real() {
  PipelineConfig cfg;
  cfg.real = RealInputs{kFixtures / "mini_wdi.csv", kFixtures / "emissions.csv", std::nullopt};
  return cfg;
}

std::string section(const std::string& text, const std::string& name) {
  const auto start = text.find("[" + name + "]");
  if (start == std::string::npos) return {};
  const auto end = text.find("\n[", start + 1);
  return text.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

}  // namespace

TEST_CASE("exactly one input source is required") {
  PipelineConfig none;
  CHECK_THROWS_AS(none.validate(), Error);
  auto both = real();
  both.synthetic = SyntheticSpec{};
  try {
    both.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  auto bad = synthetic(1);
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_NOTHROW(synthetic(1).validate());
}

TEST_CASE("explain_config lists every result-affecting field") {
  const auto text = explain_config(synthetic(3));
  for (const char* key : {"seed = 3", "alpha = ", "ridge = ", "tau_target = ", "tau_dup = ", "basis_size = "})
    CHECK(text.find(key) != std::string::npos);
  // Thread count never changes results, so it stays out of the hashed echo.
  auto threaded = synthetic(3);
  threaded.threads = 4;
  CHECK(explain_config(threaded) == text);
}

TEST_CASE("synthetic run produces metrics and a complete report") {
  const auto r = run_pipeline(synthetic(7));
  CHECK(r.complete);
  REQUIRE(r.truth);
  REQUIRE(r.metrics);
  REQUIRE(r.prune);
  CHECK_FALSE(r.screen_applied);
  CHECK(r.samples.cols() == 5);
  CHECK_FALSE(r.target.empty());
  const auto text = r.text();
  for (const char* s : {"[config]", "[data]", "[screen]", "[order]", "[graph]", "[drivers]", "[metrics]", "[queries]",
                        "determinism_hash = ", "[timings]"})
    CHECK(text.find(s) != std::string::npos);
  CHECK(r.determinism_hash().size() == 16);
}

TEST_CASE("synthetic runs are deterministic and thread-count independent") {
  auto cfg = synthetic(11);
  const auto a = run_pipeline(cfg);
  const auto b = run_pipeline(cfg);
  cfg.threads = 3;
  const auto c = run_pipeline(cfg);
  CHECK(a.deterministic_text() == b.deterministic_text());
  CHECK(a.determinism_hash() == c.determinism_hash());
  CHECK(run_pipeline(synthetic(12)).determinism_hash() != a.determinism_hash());
}

TEST_CASE("real fixture yields drivers and fifteen prompts per driver") {
  testutil::TempDir dir;
  auto cfg = real();
  cfg.output_dir = dir.path();
  const auto r = run_pipeline(cfg);
  CHECK(r.complete);
  CHECK(r.screen_applied);
  CHECK(r.target == "CO2E.PC");
  CHECK_FALSE(r.metrics);
  REQUIRE_FALSE(r.drivers.empty());
  for (std::size_t k = 1; k < r.drivers.size(); ++k) CHECK(r.drivers[k - 1].p_value <= r.drivers[k].p_value);
  CHECK(r.queries.size() == 15 * r.drivers.size());
  CHECK(r.literature.size() == r.drivers.size());
  for (const auto& q : r.queries) CHECK(q.response.status == TransportStatus::Success);

  CHECK(std::filesystem::exists(dir.path() / "report.txt"));
  CHECK(std::filesystem::exists(dir.path() / "graph.csv"));
  CHECK(std::filesystem::exists(dir.path() / "graph.dot"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "truth.csv"));
  std::size_t prompts = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "prompts")) prompts += e.is_regular_file();
  CHECK(prompts == r.queries.size());
  const auto archived = testutil::slurp(dir.path() / "prompts" / r.queries[0].query.archive_name());
  CHECK(archived.rfind(r.queries[0].query.prompt_text, 0) == 0);
  CHECK(archived.find(r.queries[0].response.text) != std::string::npos);
}

TEST_CASE("disabling queries leaves earlier sections untouched") {
  auto cfg = real();
  const auto with = run_pipeline(cfg);
  cfg.queries = false;
  const auto without = run_pipeline(cfg);
  CHECK(without.queries.empty());
  CHECK(without.queries_skip_reason == "disabled by configuration");
  for (const char* s : {"data", "screen", "order", "graph", "drivers"})
    CHECK(section(with.text(), s) == section(without.text(), s));
}

TEST_CASE("a failing stage writes a partial report and names the stage and seed") {
  testutil::TempDir dir;
  SUBCASE("ingest") {
    auto cfg = real();
    cfg.real->wdi = dir.path() / "missing.csv";
    cfg.output_dir = dir.path() / "out";
    cfg.seed = 42;
    try {
      run_pipeline(cfg);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Data);
      const std::string msg = e.what();
      CHECK(msg.find("stage 'ingest'") != std::string::npos);
      CHECK(msg.find("--seed 42") != std::string::npos);
    }
    const auto text = testutil::slurp(dir.path() / "out" / "report.txt");
    CHECK(text.find("status: incomplete") != std::string::npos);
    CHECK(text.find("failed_stage: ingest") != std::string::npos);
  }
  SUBCASE("queries") {
    auto cfg = real();
    cfg.llm.stub = false;
    cfg.llm.token_env = "CLIMCAUSAL_TEST_TOKEN_THAT_IS_NEVER_SET";
    cfg.output_dir = dir.path() / "out";
    try {
      run_pipeline(cfg);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
    const auto text = testutil::slurp(dir.path() / "out" / "report.txt");
    CHECK(text.find("failed_stage: queries") != std::string::npos);
    CHECK(text.find("[graph]\nskipped") == std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / "out" / "graph.csv"));
  }
}

TEST_CASE("exports are deterministic across runs") {
  testutil::TempDir a, b;
  auto cfg = synthetic(5);
  cfg.output_dir = a.path();
  run_pipeline(cfg);
  cfg.output_dir = b.path();
  run_pipeline(cfg);
  for (const char* f : {"graph.csv", "graph.dot", "truth.csv"}) {
    CAPTURE(f);
    CHECK(testutil::slurp(a.path() / f) == testutil::slurp(b.path() / f));
  }
}

TEST_CASE("rank_drivers orders by p-value then label") {
  PruneResult p;
  p.graph = CausalGraph({"A.A", "B.B", "C.C", "T.T"});
  p.graph.add_edge(0, 3);
  p.graph.add_edge(1, 3);
  p.graph.add_edge(2, 3);
  p.tests = {{0, 3, 5.0, 1e-4, false, true}, {1, 3, 9.0, 1e-9, false, true}, {2, 3, 5.0, 1e-4, false, true}};
  const auto r = rank_drivers(p, "T.T");
  REQUIRE(r.size() == 3);
  CHECK(r[0].label == "B.B");
  CHECK(r[1].label == "A.A");
  CHECK(r[2].label == "C.C");
  CHECK(rank_drivers(p, "Z.Z").empty());
}
