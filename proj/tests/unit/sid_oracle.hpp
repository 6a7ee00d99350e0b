#pragma once

#include "climcausal/graph.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

// Brute-force structural intervention distance by explicit path enumeration.
// For each ordered pair (i, j) the estimated parent set Z of i is checked
// against the adjustment criterion in the true graph:
//   - j in Z: correct iff j is not a descendant of i;
//   - otherwise: no member of Z may be a descendant of a node (other than i)
//     lying on a directed path i -> ... -> j, and every non-directed simple path
//     between i and j in the skeleton must be blocked by Z.
namespace sid_oracle {

using climcausal::CausalGraph;

inline std::vector<std::vector<bool>> descendants(const CausalGraph& g) {
  auto r = g.reachability();
  for (std::size_t v = 0; v < g.size(); ++v) r[v][v] = true;  // reflexive
  return r;
}

// All simple paths between a and b in the skeleton, as node sequences.
inline std::vector<std::vector<std::size_t>> skeleton_paths(const CausalGraph& g, std::size_t a, std::size_t b) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path = {a};
  std::vector<bool> on(g.size(), false);
  on[a] = true;
  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (v == b) {
      out.push_back(path);
      return;
    }
    for (std::size_t w = 0; w < g.size(); ++w) {
      if (on[w] || !(g.has_edge(v, w) || g.has_edge(w, v))) continue;
      on[w] = true;
      path.push_back(w);
      walk(w);
      path.pop_back();
      on[w] = false;
    }
  };
  walk(a);
  return out;
}

inline bool directed_path(const CausalGraph& g, const std::vector<std::size_t>& p) {
  for (std::size_t k = 0; k + 1 < p.size(); ++k)
    if (!g.has_edge(p[k], p[k + 1])) return false;
  return true;
}

inline bool blocked(const CausalGraph& g, const std::vector<std::size_t>& p, const std::vector<bool>& in_z,
                    const std::vector<std::vector<bool>>& de) {
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const std::size_t v = p[k];
    const bool collider = g.has_edge(p[k - 1], v) && g.has_edge(p[k + 1], v);
    if (collider) {
      bool opened = false;
      for (std::size_t z = 0; z < g.size(); ++z) opened = opened || (in_z[z] && de[v][z]);
      if (!opened) return true;
    } else if (in_z[v]) {
      return true;
    }
  }
  return false;
}

inline std::size_t sid(const CausalGraph& truth, const CausalGraph& estimate) {
  const std::size_t d = truth.size();
  const auto de = descendants(truth);
  std::size_t mistakes = 0;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<bool> in_z(d, false);
    for (std::size_t z : estimate.parents(i)) in_z[z] = true;
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      if (in_z[j]) {
        mistakes += de[i][j] && i != j ? 1 : 0;
        continue;
      }
      const auto paths = skeleton_paths(truth, i, j);
      bool ok = true;
      // Forbidden: descendants of nodes other than i on directed paths to j.
      for (const auto& p : paths) {
        if (!directed_path(truth, p)) continue;
        for (std::size_t k = 1; k < p.size(); ++k)
          for (std::size_t z = 0; z < d; ++z)
            if (in_z[z] && de[p[k]][z]) ok = false;
      }
      for (const auto& p : paths)
        if (!directed_path(truth, p) && !blocked(truth, p, in_z, de)) ok = false;
      mistakes += ok ? 0 : 1;
    }
  }
  return mistakes;
}

// Every DAG over d labelled nodes (d <= 4), enumerated over all 3^(pairs) edge
// states and filtered for acyclicity.
inline std::vector<CausalGraph> all_dags(const std::vector<std::string>& labels) {
  const std::size_t d = labels.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) pairs.emplace_back(a, b);
  std::size_t total = 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
  std::vector<CausalGraph> out;
  for (std::size_t code = 0; code < total; ++code) {
    CausalGraph g(labels);
    std::size_t c = code;
    for (const auto& [a, b] : pairs) {
      if (c % 3 == 1) g.add_edge(a, b);
      if (c % 3 == 2) g.add_edge(b, a);
      c /= 3;
    }
    if (g.is_acyclic()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace sid_oracle
