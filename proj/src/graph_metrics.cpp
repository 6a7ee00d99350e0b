#include "climcausal/graph_metrics.hpp"

#include "climcausal/error.hpp"

#include <algorithm>
#include <cmath>

namespace climcausal {

CausalGraph align_to(const CausalGraph& truth, const CausalGraph& estimate) {
  if (truth.labels() == estimate.labels()) return estimate;
  if (truth.size() != estimate.size()) fail(ErrorKind::Data, "graph alignment: node counts differ");
  std::vector<std::size_t> map(estimate.size());
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    const auto idx = truth.index_of(estimate.labels()[k]);
    if (!idx) fail(ErrorKind::Data, "graph alignment: label " + estimate.labels()[k] + " missing from reference graph");
    map[k] = *idx;
  }
  CausalGraph out(truth.labels());
  for (const auto& [i, j] : estimate.edges()) out.add_edge(map[i], map[j]);
  return out;
}

std::size_t shd(const CausalGraph& truth, const CausalGraph& estimate) {
  const CausalGraph est = align_to(truth, estimate);
  std::size_t count = 0;
  for (std::size_t a = 0; a < truth.size(); ++a) {
    for (std::size_t b = a + 1; b < truth.size(); ++b) {
      const bool t_ab = truth.has_edge(a, b), t_ba = truth.has_edge(b, a);
      const bool e_ab = est.has_edge(a, b), e_ba = est.has_edge(b, a);
      if ((t_ab || t_ba) != (e_ab || e_ba)) ++count;
      else if ((t_ab || t_ba) && (t_ab != e_ab || t_ba != e_ba)) ++count;
    }
  }
  return count;
}

bool d_separated(const CausalGraph& g, std::size_t a, std::size_t b, const std::vector<std::size_t>& given) {
  const std::size_t d = g.size();
  // Ancestral closure of {a, b} and the conditioning set.
  std::vector<bool> keep(d, false);
  std::vector<std::size_t> stack = given;
  stack.push_back(a);
  stack.push_back(b);
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = true;
    for (std::size_t p : g.parents(v)) stack.push_back(p);
  }
  // Moral graph restricted to the closure.
  std::vector<std::vector<bool>> adj(d, std::vector<bool>(d, false));
  for (std::size_t v = 0; v < d; ++v) {
    if (!keep[v]) continue;
    const auto parents = g.parents(v);
    for (std::size_t p : parents) adj[p][v] = adj[v][p] = true;
    for (std::size_t x = 0; x < parents.size(); ++x)
      for (std::size_t y = x + 1; y < parents.size(); ++y) adj[parents[x]][parents[y]] = adj[parents[y]][parents[x]] = true;
  }
  std::vector<bool> blocked(d, false);
  for (std::size_t z : given) blocked[z] = true;
  if (blocked[a] || blocked[b]) return true;
  std::vector<bool> seen(d, false);
  stack = {a};
  seen[a] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (v == b) return false;
    for (std::size_t w = 0; w < d; ++w) {
      if (adj[v][w] && keep[w] && !blocked[w] && !seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return true;
}

std::size_t sid(const CausalGraph& truth, const CausalGraph& estimate) {
  if (!truth.is_acyclic() || !estimate.is_acyclic()) fail(ErrorKind::Data, "SID requires acyclic graphs");
  const CausalGraph est = align_to(truth, estimate);
  const std::size_t d = truth.size();
  const auto reach = truth.reachability();
  std::size_t mistakes = 0;

  for (std::size_t i = 0; i < d; ++i) {
    const auto z = est.parents(i);
    if (z == truth.parents(i)) continue;  // true parents are always a valid adjustment set
    std::vector<bool> in_z(d, false);
    for (std::size_t v : z) in_z[v] = true;

    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      if (in_z[j]) {
        if (reach[i][j]) ++mistakes;
        continue;
      }
      // Nodes on causal paths i -> ... -> j (excluding i), and their descendants.
      std::vector<bool> on_path(d, false);
      for (std::size_t w = 0; w < d; ++w) on_path[w] = reach[i][w] && (w == j || reach[w][j]);
      bool forbidden = false;
      for (std::size_t v : z) {
        for (std::size_t w = 0; w < d && !forbidden; ++w)
          forbidden = on_path[w] && (v == w || reach[w][v]);
        if (forbidden) break;
      }
      if (forbidden) {
        ++mistakes;
        continue;
      }
      // Proper back-door graph: drop the first edge of every causal path.
      CausalGraph backdoor = truth;
      for (std::size_t w : truth.children(i))
        if (on_path[w]) backdoor.remove_edge(i, w);
      if (!d_separated(backdoor, i, j, z)) ++mistakes;
    }
  }
  return mistakes;
}

EdgePrf edge_prf(const CausalGraph& truth, const CausalGraph& estimate) {
  const CausalGraph est = align_to(truth, estimate);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const bool t = truth.has_edge(i, j), e = est.has_edge(i, j);
      tp += t && e;
      fp += !t && e;
      fn += t && !e;
    }
  }
  EdgePrf out;
  if (tp + fp == 0) out.precision = truth.edge_count() == 0 ? 1.0 : 0.0;
  else out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  out.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double sum = out.precision + out.recall;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
  return out;
}

double l2_distance(const CausalGraph& truth, const CausalGraph& estimate) {
  const CausalGraph est = align_to(truth, estimate);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (std::size_t j = 0; j < truth.size(); ++j) diff += truth.has_edge(i, j) != est.has_edge(i, j);
  return std::sqrt(static_cast<double>(diff));
}

MetricsReport evaluate(const CausalGraph& truth, const CausalGraph& estimate) {
  MetricsReport r;
  r.shd = shd(truth, estimate);
  r.sid = sid(truth, estimate);
  const auto prf = edge_prf(truth, estimate);
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f1 = prf.f1;
  r.l2 = l2_distance(truth, estimate);
  return r;
}

}  // namespace climcausal
