#pragma once

#include <cstdint>
#include <utility>

#include "adaptkry/graph.hpp"
#include "adaptkry/matrix.hpp"

namespace adaptkry {

// Two-parameter planted-partition generator with a controllable homophily
// ratio and Gaussian class-mean features.
struct SyntheticSpec {
  std::size_t nodes = 600;
  int num_classes = 2;
  double target_homophily = 0.9;  // in (0, 1)
  double mean_degree = 10.0;
  std::size_t feature_dim = 16;
  double class_separation = 4.0;  // ||mu_a - mu_b|| for a != b
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  Graph graph;
  FeatureMatrix features;
  double achieved_homophily = 0.0;
  double p_in = 0.0;
  double p_out = 0.0;
  int resamples = 0;
};

// Samples edges with intra/inter-class probabilities solved from the expected
// edge count and target homophily, keeps the largest connected component,
// rejects bipartite outcomes (up to 20 resamples) and draws features
// x_v ~ N(mu_class(v), sigma^2 I).
SyntheticDataset generate(const SyntheticSpec& spec);

// Random connected non-bipartite graph for verification sweeps: a random
// attachment tree plus extra edges, with an odd cycle enforced. Labels are
// all zero.
Graph random_connected_graph(std::size_t nodes, double extra_edge_prob, std::uint64_t seed);

// Gaussian feature block, one row per node.
FeatureMatrix random_features(std::size_t nodes, std::size_t dim, std::uint64_t seed);

}  // namespace adaptkry
