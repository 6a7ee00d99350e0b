#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace climcausal {

// Directed graph over labelled nodes; (i, j) set means edge i -> j.
// Mutators keep the no-self-loop invariant; acyclicity is checked by validate().
class CausalGraph {
 public:
  CausalGraph() = default;
  explicit CausalGraph(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(const std::string& label) const;

  bool has_edge(std::size_t from, std::size_t to) const { return adj_[from * size() + to] != 0; }
  void add_edge(std::size_t from, std::size_t to);
  void remove_edge(std::size_t from, std::size_t to);

  std::size_t edge_count() const;
  std::vector<std::size_t> parents(std::size_t node) const;
  std::vector<std::size_t> children(std::size_t node) const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  // Kahn's algorithm taking the lexicographically smallest ready label first;
  // nullopt when the graph has a cycle.
  std::optional<std::vector<std::size_t>> topological_sort() const;
  bool is_acyclic() const { return topological_sort().has_value(); }

  // reach[i][j]: a directed path of length >= 1 runs from i to j.
  std::vector<std::vector<bool>> reachability() const;

  // Throws Data error on a cycle.
  void validate() const;

  bool operator==(const CausalGraph&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint8_t> adj_;
};

enum class GraphFormat { EdgeList, Dot };

// Edge-list CSV ("from,to") or DOT digraph text. Nodes follow the graph's
// lexicographic topological sort; edges are ordered by the position of their
// source in that sort, then by target label.
std::string format_graph(const CausalGraph& graph, GraphFormat format);
void export_graph(const CausalGraph& graph, GraphFormat format, const std::filesystem::path& path);

// Reads an edge-list CSV. Nodes come from `labels`; when empty, from the edge
// endpoints in first-appearance order.
CausalGraph read_edgelist(const std::filesystem::path& path, const std::vector<std::string>& labels = {});

}  // namespace climcausal
