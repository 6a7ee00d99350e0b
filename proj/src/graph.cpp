#include "climcausal/graph.hpp"

#include "climcausal/error.hpp"
#include "csv.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace climcausal {

CausalGraph::CausalGraph(std::vector<std::string> labels)
    : labels_(std::move(labels)), adj_(labels_.size() * labels_.size(), 0) {
  std::set<std::string> unique(labels_.begin(), labels_.end());
  if (unique.size() != labels_.size()) fail(ErrorKind::Data, "graph labels must be unique");
}

std::optional<std::size_t> CausalGraph::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

void CausalGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= size() || to >= size()) fail(ErrorKind::Data, "edge endpoint out of range");
  if (from == to) fail(ErrorKind::Data, "self-loop on " + labels_[from] + " is not allowed");
  adj_[from * size() + to] = 1;
}

void CausalGraph::remove_edge(std::size_t from, std::size_t to) { adj_[from * size() + to] = 0; }

std::size_t CausalGraph::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> CausalGraph::parents(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (has_edge(i, node)) out.push_back(i);
  return out;
}

std::vector<std::size_t> CausalGraph::children(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < size(); ++j)
    if (has_edge(node, j)) out.push_back(j);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> CausalGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::optional<std::vector<std::size_t>> CausalGraph::topological_sort() const {
  std::vector<std::size_t> indegree(size(), 0);
  for (const auto& [i, j] : edges()) ++indegree[j];
  auto by_label = [this](std::size_t a, std::size_t b) { return labels_[a] > labels_[b]; };
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < size(); ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), by_label);
    const std::size_t v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (std::size_t w : children(v))
      if (--indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != size()) return std::nullopt;
  return order;
}

std::vector<std::vector<bool>> CausalGraph::reachability() const {
  const std::size_t d = size();
  std::vector<std::vector<bool>> reach(d, std::vector<bool>(d, false));
  for (std::size_t s = 0; s < d; ++s) {
    std::vector<std::size_t> stack = children(s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (reach[s][v]) continue;
      reach[s][v] = true;
      for (std::size_t w : children(v)) stack.push_back(w);
    }
  }
  return reach;
}

void CausalGraph::validate() const {
  if (adj_.size() != size() * size()) fail(ErrorKind::Data, "graph adjacency does not match label count");
  for (std::size_t i = 0; i < size(); ++i)
    if (has_edge(i, i)) fail(ErrorKind::Data, "graph has a self-loop on " + labels_[i]);
  if (!is_acyclic()) fail(ErrorKind::Data, "graph is not acyclic");
}

std::string format_graph(const CausalGraph& graph, GraphFormat format) {
  const auto topo = graph.topological_sort();
  if (!topo) fail(ErrorKind::Data, "cannot export a cyclic graph");
  std::vector<std::size_t> position(graph.size());
  for (std::size_t k = 0; k < topo->size(); ++k) position[(*topo)[k]] = k;
  auto edges = graph.edges();
  std::sort(edges.begin(), edges.end(), [&](const auto& a, const auto& b) {
    if (position[a.first] != position[b.first]) return position[a.first] < position[b.first];
    return graph.labels()[a.second] < graph.labels()[b.second];
  });

  std::ostringstream out;
  const auto& l = graph.labels();
  if (format == GraphFormat::EdgeList) {
    out << "from,to\n";
    for (const auto& [i, j] : edges) out << csv::quote(l[i]) << ',' << csv::quote(l[j]) << '\n';
  } else {
    auto q = [](const std::string& s) {
      std::string r = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') r.push_back('\\');
        r.push_back(c);
      }
      return r + "\"";
    };
    out << "digraph causal {\n";
    for (std::size_t v : *topo) out << "  " << q(l[v]) << ";\n";
    for (const auto& [i, j] : edges) out << "  " << q(l[i]) << " -> " << q(l[j]) << ";\n";
    out << "}\n";
  }
  return out.str();
}

void export_graph(const CausalGraph& graph, GraphFormat format, const std::filesystem::path& path) {
  const std::string text = format_graph(graph, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Data, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Data, "write failed for " + path.string());
}

CausalGraph read_edgelist(const std::filesystem::path& path, const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Data, "cannot open " + path.string());
  std::string line;
  bool first = true;
  if (!csv::next_line(in, line, first)) fail(ErrorKind::Data, path.string() + ": empty edge list");
  const auto header = csv::split_record(line);
  if (header.size() < 2 || csv::trim(header[0]) != "from" || csv::trim(header[1]) != "to")
    fail(ErrorKind::Data, path.string() + ": edge list header must be 'from,to'");
  std::vector<std::pair<std::string, std::string>> pairs;
  while (csv::next_line(in, line, first)) {
    const auto f = csv::split_record(line);
    if (f.size() < 2) fail(ErrorKind::Data, path.string() + ": malformed edge row '" + line + "'");
    pairs.emplace_back(csv::trim(f[0]), csv::trim(f[1]));
  }
  std::vector<std::string> nodes = labels;
  if (nodes.empty()) {
    for (const auto& [a, b] : pairs)
      for (const auto* s : {&a, &b})
        if (std::find(nodes.begin(), nodes.end(), *s) == nodes.end()) nodes.push_back(*s);
  }
  CausalGraph g(nodes);
  for (const auto& [a, b] : pairs) {
    const auto i = g.index_of(a), j = g.index_of(b);
    if (!i || !j) fail(ErrorKind::Data, path.string() + ": edge " + a + " -> " + b + " names an unknown node");
    g.add_edge(*i, *j);
  }
  return g;
}

}  // namespace climcausal
