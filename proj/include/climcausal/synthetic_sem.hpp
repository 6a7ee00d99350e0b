#pragma once

#include "climcausal/graph.hpp"
#include "climcausal/panel.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace climcausal {

enum class Mechanism { Linear, TanhMix, Quadratic, Sine };

// Per-node additive-noise mechanism: x_v = f(parents) + noise_sigma * N(0, 1),
// with z_u = x_u / scale_u for each parent u:
//   linear    sum_u c_u x_u
//   tanh-mix  sum_u c_u tanh(3 z_u)
//   quadratic sum_u c_u z_u^2 / 2
//   sine      sum_u c_u sin(3 z_u)
struct NodeMechanism {
  Mechanism kind = Mechanism::Linear;
  std::vector<double> coefficients;  // aligned with graph.parents(v)
  double noise_sigma = 1.0;
  double scale = 1.0;  // divides this node's value when it feeds a nonlinear child
};

struct SemModel {
  CausalGraph graph;
  std::vector<NodeMechanism> nodes;

  void validate() const;
};

// Labels SYN.V00, SYN.V01, ...
std::vector<std::string> synthetic_labels(std::size_t d);

// Uniformly random node permutation, then every forward edge independently with
// probability edge_prob.
CausalGraph sample_dag(std::size_t d, double edge_prob, std::uint64_t seed);

// Tag uniform over `family`; coefficients uniform in [0.5, 2] with random sign;
// noise sigma uniform in [0.4, 0.8]. Node scales are the standard deviations of
// a seeded pilot simulation.
SemModel sample_mechanisms(const CausalGraph& graph, const std::set<Mechanism>& family, std::uint64_t seed);

// Evaluates nodes in topological order and returns the standardized matrix;
// raw values are recoverable through SampleMatrix::raw_data().
SampleMatrix sample_data(const SemModel& model, std::size_t n, std::uint64_t seed);

// Plain-text manifest (edge list + mechanism table) and its parser.
std::string write_manifest(const SemModel& model);
SemModel read_manifest(const std::string& text);

std::string to_string(Mechanism m);
Mechanism parse_mechanism(const std::string& text);
std::set<Mechanism> nonlinear_family();
std::set<Mechanism> all_mechanisms();

}  // namespace climcausal
