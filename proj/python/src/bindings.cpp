#include "climcausal/cam_prune.hpp"
#include "climcausal/error.hpp"
#include "climcausal/graph_metrics.hpp"
#include "climcausal/pipeline.hpp"
#include "climcausal/query_agent.hpp"
#include "climcausal/score_order.hpp"
#include "climcausal/stein.hpp"
#include "climcausal/synthetic_sem.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace climcausal;

namespace {

using Edges = std::vector<std::pair<std::string, std::string>>;

SampleMatrix to_samples(const Eigen::MatrixXd& data, const std::vector<std::string>& labels) {
  SampleMatrix s;
  s.data = data;
  s.labels = labels;
  s.validate();
  return s;
}

CausalGraph to_graph(const std::vector<std::string>& labels, const Edges& edges) {
  CausalGraph g(labels);
  for (const auto& [a, b] : edges) {
    const auto i = g.index_of(a), j = g.index_of(b);
    if (!i || !j) fail(ErrorKind::Config, "edge " + a + " -> " + b + " names an unknown node");
    g.add_edge(*i, *j);
  }
  g.validate();
  return g;
}

Edges to_edges(const CausalGraph& g) {
  Edges out;
  for (const auto& [i, j] : g.edges()) out.emplace_back(g.labels()[i], g.labels()[j]);
  return out;
}

std::string kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Data: return "data";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Transport: return "transport";
  }
  return "unknown";
}

py::dict report_dict(const PipelineReport& r) {
  py::dict d;
  d["complete"] = r.complete;
  d["target"] = r.target;
  d["labels"] = r.samples.labels;
  d["order"] = r.order ? r.order->ordered_labels() : std::vector<std::string>{};
  d["edges"] = r.prune ? to_edges(r.prune->graph) : Edges{};
  py::list drivers;
  for (const auto& x : r.drivers) drivers.append(py::make_tuple(x.label, x.p_value, x.f_statistic));
  d["drivers"] = drivers;
  if (r.metrics) {
    py::dict m;
    m["shd"] = r.metrics->shd;
    m["sid"] = r.metrics->sid;
    m["precision"] = r.metrics->precision;
    m["recall"] = r.metrics->recall;
    m["f1"] = r.metrics->f1;
    m["l2"] = r.metrics->l2;
    d["metrics"] = m;
  } else {
    d["metrics"] = py::none();
  }
  d["prompts"] = r.queries.size();
  d["determinism_hash"] = r.determinism_hash();
  d["text"] = r.text();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Score-based causal discovery over indicator panels";

  static py::exception<Error> error(m, "ClimcausalError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), ("[" + kind_name(e.kind()) + "] " + e.what()).c_str());
    }
  });

  m.def("median_bandwidth", [](const Eigen::MatrixXd& x) { return median_bandwidth(x); }, py::arg("x"));
  m.def(
      "stein_score",
      [](const Eigen::MatrixXd& x, double bandwidth, double ridge) {
        return stein_score_estimate(x, {bandwidth, ridge}).G;
      },
      py::arg("x"), py::arg("bandwidth"), py::arg("ridge") = 0.01);
  m.def(
      "stein_hessian_diag",
      [](const Eigen::MatrixXd& x, double bandwidth, double ridge) {
        return stein_hessian_diag(x, {bandwidth, ridge}).H;
      },
      py::arg("x"), py::arg("bandwidth"), py::arg("ridge") = 0.01);

  m.def(
      "estimate_order",
      [](const Eigen::MatrixXd& data, const std::vector<std::string>& labels, double ridge, std::uint64_t seed,
         unsigned threads) {
        py::gil_scoped_release release;
        return estimate_order(to_samples(data, labels), {ridge, 5000, seed, threads}).ordered_labels();
      },
      py::arg("data"), py::arg("labels"), py::arg("ridge") = 0.01, py::arg("seed") = 0, py::arg("threads") = 1,
      "Topological order, sources first.");

  m.def(
      "prune",
      [](const Eigen::MatrixXd& data, const std::vector<std::string>& labels, const std::vector<std::string>& order,
         double alpha, int basis_size, unsigned threads) {
        py::gil_scoped_release release;
        const auto s = to_samples(data, labels);
        TopologicalOrder o;
        o.labels = labels;
        for (const auto& l : order) {
          const auto c = s.column(l);
          if (!c) fail(ErrorKind::Config, "order names unknown label " + l);
          o.order.push_back(*c);
        }
        return to_edges(prune_edges(s, o, {alpha, basis_size, threads}).graph);
      },
      py::arg("data"), py::arg("labels"), py::arg("order"), py::arg("alpha") = 0.001, py::arg("basis_size") = 10,
      py::arg("threads") = 1, "Edges kept by the nested F-test, as (from, to) label pairs.");

  m.def(
      "evaluate",
      [](const std::vector<std::string>& labels, const Edges& truth, const Edges& estimate) {
        const auto r = evaluate(to_graph(labels, truth), to_graph(labels, estimate));
        py::dict d;
        d["shd"] = r.shd;
        d["sid"] = r.sid;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        d["f1"] = r.f1;
        d["l2"] = r.l2;
        return d;
      },
      py::arg("labels"), py::arg("truth"), py::arg("estimate"));

  m.def(
      "synthesize",
      [](std::size_t d, double edge_prob, std::size_t n, std::uint64_t seed) {
        const auto g = sample_dag(d, edge_prob, seed);
        const auto s = sample_data(sample_mechanisms(g, nonlinear_family(), seed + 1), n, seed + 2);
        return py::make_tuple(s.data, s.labels, to_edges(g));
      },
      py::arg("d") = 5, py::arg("edge_prob") = 0.4, py::arg("n") = 1000, py::arg("seed") = 7,
      "Returns (data, labels, true_edges) with the pipeline's seed scheme.");

  m.def(
      "build_prompts",
      [](const std::vector<std::string>& drivers, const std::string& target) {
        std::vector<Driver> ds;
        for (const auto& c : drivers) ds.push_back({c, ""});
        py::list out;
        for (const auto& q : build_queries(ds, target, all_categories(), all_styles())) {
          py::dict d;
          d["driver"] = q.driver.code;
          d["category"] = to_string(q.category);
          d["style"] = to_string(q.style);
          d["text"] = q.prompt_text;
          out.append(d);
        }
        return out;
      },
      py::arg("drivers"), py::arg("target") = "CO2E.PC");

  m.def(
      "run_synthetic",
      [](std::uint64_t seed, std::size_t d, double edge_prob, std::size_t n, unsigned threads,
         const std::filesystem::path& out) {
        PipelineConfig cfg;
        cfg.synthetic = SyntheticSpec{d, edge_prob, n, nonlinear_family()};
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.output_dir = out;
        PipelineReport r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(cfg);
        }
        return report_dict(r);
      },
      py::arg("seed") = 7, py::arg("d") = 5, py::arg("edge_prob") = 0.4, py::arg("n") = 1000, py::arg("threads") = 1,
      py::arg("out") = std::filesystem::path{});

  m.def(
      "run_real",
      [](const std::filesystem::path& wdi, const std::filesystem::path& emissions, bool queries, std::uint64_t seed,
         unsigned threads, const std::filesystem::path& out) {
        PipelineConfig cfg;
        cfg.real = RealInputs{wdi, emissions, std::nullopt};
        cfg.queries = queries;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.output_dir = out;
        PipelineReport r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(cfg);
        }
        return report_dict(r);
      },
      py::arg("wdi"), py::arg("emissions"), py::arg("queries") = true, py::arg("seed") = 7, py::arg("threads") = 1,
      py::arg("out") = std::filesystem::path{});
}
