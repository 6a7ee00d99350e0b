#include "climcausal/synthetic_sem.hpp"

#include "climcausal/error.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace climcausal {

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Linear: return "linear";
    case Mechanism::TanhMix: return "tanh-mix";
    case Mechanism::Quadratic: return "quadratic";
    case Mechanism::Sine: return "sine";
  }
  return "?";
}

Mechanism parse_mechanism(const std::string& text) {
  for (Mechanism m : all_mechanisms())
    if (to_string(m) == text) return m;
  fail(ErrorKind::Config, "unknown mechanism '" + text + "'");
}

std::set<Mechanism> nonlinear_family() { return {Mechanism::TanhMix, Mechanism::Quadratic, Mechanism::Sine}; }
std::set<Mechanism> all_mechanisms() {
  return {Mechanism::Linear, Mechanism::TanhMix, Mechanism::Quadratic, Mechanism::Sine};
}

std::vector<std::string> synthetic_labels(std::size_t d) {
  std::vector<std::string> labels;
  char buf[32];
  for (std::size_t i = 0; i < d; ++i) {
    std::snprintf(buf, sizeof buf, "SYN.V%02zu", i);
    labels.emplace_back(buf);
  }
  return labels;
}

void SemModel::validate() const {
  graph.validate();
  if (nodes.size() != graph.size()) fail(ErrorKind::Data, "SEM: one mechanism per node required");
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].coefficients.size() != graph.parents(v).size())
      fail(ErrorKind::Data, "SEM: mechanism arity differs from parent count at " + graph.labels()[v]);
    if (!(nodes[v].noise_sigma > 0.0)) fail(ErrorKind::Data, "SEM: noise sigma must be positive");
    if (!(nodes[v].scale > 0.0) || !std::isfinite(nodes[v].scale))
      fail(ErrorKind::Data, "SEM: node scale must be positive");
  }
}

CausalGraph sample_dag(std::size_t d, double edge_prob, std::uint64_t seed) {
  if (d < 1) fail(ErrorKind::Config, "DAG needs at least one node");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) fail(ErrorKind::Config, "edge probability must lie in [0, 1]");
  boost::random::mt19937_64 rng(seed);
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = d - 1; k > 0; --k) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, k);
    std::swap(perm[k], perm[pick(rng)]);
  }
  CausalGraph g(synthetic_labels(d));
  boost::random::uniform_01<double> u;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b)
      if (u(rng) < edge_prob) g.add_edge(perm[a], perm[b]);
  return g;
}

namespace {

constexpr std::size_t kPilotRows = 2000;
constexpr std::uint64_t kPilotSalt = 0x9e3779b97f4a7c15ULL;

double apply(Mechanism kind, double x, double scale) {
  const double z = x / scale;
  switch (kind) {
    case Mechanism::Linear: return x;
    case Mechanism::TanhMix: return std::tanh(3.0 * z);
    case Mechanism::Quadratic: return 0.5 * z * z;
    case Mechanism::Sine: return std::sin(3.0 * z);
  }
  return x;
}

// With fit_scales, each node's scale is set to its column's sample standard
// deviation right after the column is drawn.
Eigen::MatrixXd simulate(SemModel& model, std::size_t n, std::uint64_t seed, bool fit_scales) {
  const auto order = *model.graph.topological_sort();
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(model.graph.size()));
  for (std::size_t v : order) {
    const auto& mech = model.nodes[v];
    const auto parents = model.graph.parents(v);
    const auto col = static_cast<Eigen::Index>(v);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      double value = 0.0;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        const auto u = parents[k];
        value += mech.coefficients[k] * apply(mech.kind, raw(r, static_cast<Eigen::Index>(u)), model.nodes[u].scale);
      }
      raw(r, col) = value + mech.noise_sigma * normal(rng);
    }
    if (fit_scales && n > 1) {
      const double mean = raw.col(col).mean();
      const double sd = std::sqrt((raw.col(col).array() - mean).square().sum() / static_cast<double>(n - 1));
      model.nodes[v].scale = sd > 0.0 ? sd : 1.0;
    }
  }
  return raw;
}

}  // namespace

SemModel sample_mechanisms(const CausalGraph& graph, const std::set<Mechanism>& family, std::uint64_t seed) {
  if (family.empty()) fail(ErrorKind::Config, "mechanism family must not be empty");
  graph.validate();
  const std::vector<Mechanism> tags(family.begin(), family.end());
  boost::random::mt19937_64 rng(seed);
  boost::random::uniform_int_distribution<std::size_t> pick_tag(0, tags.size() - 1);
  boost::random::uniform_real_distribution<double> magnitude(0.5, 2.0);
  boost::random::uniform_real_distribution<double> sigma(0.4, 0.8);
  boost::random::uniform_01<double> coin;

  SemModel model{graph, {}};
  for (std::size_t v = 0; v < graph.size(); ++v) {
    NodeMechanism node;
    node.kind = tags[pick_tag(rng)];
    for (std::size_t k = 0; k < graph.parents(v).size(); ++k) {
      const double m = magnitude(rng);
      node.coefficients.push_back(coin(rng) < 0.5 ? -m : m);
    }
    node.noise_sigma = sigma(rng);
    model.nodes.push_back(std::move(node));
  }

  simulate(model, kPilotRows, seed ^ kPilotSalt, true);
  return model;
}

SampleMatrix sample_data(const SemModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::Config, "sample size must be at least 1");
  model.validate();
  SemModel copy = model;
  Eigen::MatrixXd raw = simulate(copy, n, seed, false);

  std::vector<RowKey> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) keys.push_back({"SYN", static_cast<int>(i)});
  if (n < 2) {
    SampleMatrix out;
    out.data = std::move(raw);
    out.labels = model.graph.labels();
    out.row_keys = std::move(keys);
    return out;
  }
  return standardize(std::move(raw), model.graph.labels(), std::move(keys));
}

std::string write_manifest(const SemModel& model) {
  std::ostringstream out;
  out << "# additive noise SEM manifest\n";
  out << "nodes";
  for (const auto& l : model.graph.labels()) out << ' ' << l;
  out << '\n';
  for (const auto& [i, j] : model.graph.edges())
    out << "edge " << model.graph.labels()[i] << ' ' << model.graph.labels()[j] << '\n';
  char buf[64];
  for (std::size_t v = 0; v < model.nodes.size(); ++v) {
    const auto& m = model.nodes[v];
    out << "mechanism " << model.graph.labels()[v] << ' ' << to_string(m.kind);
    std::snprintf(buf, sizeof buf, " %.17g %.17g", m.noise_sigma, m.scale);
    out << buf;
    for (double c : m.coefficients) {
      std::snprintf(buf, sizeof buf, "%.17g", c);
      out << ' ' << buf;
    }
    out << '\n';
  }
  return out.str();
}

SemModel read_manifest(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::string>> edges;
  struct Row {
    std::string label;
    NodeMechanism mech;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "nodes") {
      std::string l;
      while (ls >> l) labels.push_back(l);
    } else if (kind == "edge") {
      std::string a, b;
      if (!(ls >> a >> b)) fail(ErrorKind::Data, "manifest: malformed edge line '" + line + "'");
      edges.emplace_back(a, b);
    } else if (kind == "mechanism") {
      Row row;
      std::string tag;
      if (!(ls >> row.label >> tag >> row.mech.noise_sigma >> row.mech.scale))
        fail(ErrorKind::Data, "manifest: malformed mechanism line '" + line + "'");
      row.mech.kind = parse_mechanism(tag);
      double c;
      while (ls >> c) row.mech.coefficients.push_back(c);
      rows.push_back(std::move(row));
    } else {
      fail(ErrorKind::Data, "manifest: unknown record '" + kind + "'");
    }
  }
  SemModel model{CausalGraph(labels), std::vector<NodeMechanism>(labels.size())};
  for (const auto& [a, b] : edges) {
    const auto i = model.graph.index_of(a), j = model.graph.index_of(b);
    if (!i || !j) fail(ErrorKind::Data, "manifest: edge names unknown node");
    model.graph.add_edge(*i, *j);
  }
  for (auto& row : rows) {
    const auto v = model.graph.index_of(row.label);
    if (!v) fail(ErrorKind::Data, "manifest: mechanism names unknown node " + row.label);
    model.nodes[*v] = std::move(row.mech);
  }
  model.validate();
  return model;
}

}  // namespace climcausal
