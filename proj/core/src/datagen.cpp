#include "adaptkry/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "adaptkry/error.hpp"
#include "adaptkry/rng.hpp"

namespace adaptkry {

namespace {

// Node ids of the largest connected component.
std::vector<NodeId> largest_component(std::size_t n,
                                      const std::vector<std::vector<NodeId>>& adjacency) {
  std::vector<int> component(n, -1);
  int next = 0;
  std::vector<std::size_t> sizes;
  for (NodeId start = 0; start < n; ++start) {
    if (component[start] != -1) continue;
    std::deque<NodeId> queue{start};
    component[start] = next;
    std::size_t size = 0;
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      ++size;
      for (NodeId v : adjacency[u]) {
        if (component[v] == -1) {
          component[v] = next;
          queue.push_back(v);
        }
      }
    }
    sizes.push_back(size);
    ++next;
  }
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> kept;
  for (NodeId u = 0; u < n; ++u)
    if (component[u] == best) kept.push_back(u);
  return kept;
}

}  // namespace

SyntheticDataset generate(const SyntheticSpec& spec) {
  if (spec.nodes < 2 || spec.num_classes < 1)
    throw validation_error("need at least 2 nodes and 1 class");
  if (!(spec.target_homophily > 0.0 && spec.target_homophily < 1.0))
    throw validation_error("target homophily must lie in (0,1)");
  if (spec.feature_dim < static_cast<std::size_t>(spec.num_classes))
    throw validation_error("feature_dim must be >= num_classes for separated class means");

  const std::size_t n = spec.nodes;
  const auto classes = static_cast<std::size_t>(spec.num_classes);
  std::vector<int> labels(n);
  for (std::size_t u = 0; u < n; ++u)
    labels[u] = static_cast<int>(u * classes / n);  // contiguous, near-equal blocks

  // Pair counts fix p_in/p_out from the expected edge count and homophily.
  std::vector<std::size_t> class_sizes(classes, 0);
  for (int c : labels) ++class_sizes[static_cast<std::size_t>(c)];
  double intra_pairs = 0.0;
  for (std::size_t size : class_sizes)
    intra_pairs += 0.5 * static_cast<double>(size) * static_cast<double>(size - 1);
  const double total_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  const double inter_pairs = total_pairs - intra_pairs;
  const double expected_edges = 0.5 * spec.mean_degree * static_cast<double>(n);
  const double p_in = spec.target_homophily * expected_edges / intra_pairs;
  const double p_out = inter_pairs > 0.0
                           ? (1.0 - spec.target_homophily) * expected_edges / inter_pairs
                           : 0.0;
  if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
    throw validation_error("infeasible spec: p_in = " + std::to_string(p_in) +
                           ", p_out = " + std::to_string(p_out));

  constexpr int kMaxResamples = 20;
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(attempt)));
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::vector<NodeId>> adjacency(n);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        const double p = labels[u] == labels[v] ? p_in : p_out;
        if (rng.uniform() < p) {
          edges.emplace_back(u, v);
          adjacency[u].push_back(v);
          adjacency[v].push_back(u);
        }
      }
    }
    if (edges.empty()) continue;

    const std::vector<NodeId> kept = largest_component(n, adjacency);
    std::vector<NodeId> remap(n, 0);
    for (std::size_t i = 0; i < kept.size(); ++i) remap[kept[i]] = static_cast<NodeId>(i);
    std::vector<char> in_component(n, 0);
    for (NodeId u : kept) in_component[u] = 1;

    std::vector<std::pair<NodeId, NodeId>> kept_edges;
    for (auto [u, v] : edges)
      if (in_component[u] && in_component[v]) kept_edges.emplace_back(remap[u], remap[v]);
    std::vector<int> kept_labels;
    kept_labels.reserve(kept.size());
    for (NodeId u : kept) kept_labels.push_back(labels[u]);

    Graph graph(kept.size(), std::move(kept_edges), std::move(kept_labels), spec.num_classes);
    if (graph.num_edges() == 0 || graph.is_bipartite()) continue;

    // Class means: scaled orthogonal axes give ||mu_a - mu_b|| = separation.
    const double axis = spec.class_separation / std::sqrt(2.0);
    FeatureMatrix features(graph.num_nodes(), spec.feature_dim);
    Rng feature_rng(Rng::derive(spec.seed, 0xfea7));
    for (std::size_t u = 0; u < graph.num_nodes(); ++u) {
      const auto c = static_cast<std::size_t>(graph.label(static_cast<NodeId>(u)));
      for (std::size_t j = 0; j < spec.feature_dim; ++j) {
        const double mean = j == c ? axis : 0.0;
        features(u, j) = mean + spec.noise_scale * feature_rng.normal();
      }
    }

    SyntheticDataset out;
    out.achieved_homophily = homophily_ratio(graph);
    out.graph = std::move(graph);
    out.features = std::move(features);
    out.p_in = p_in;
    out.p_out = p_out;
    out.resamples = attempt;
    return out;
  }
  throw numeric_error("planted-partition sampling failed after 20 resamples");
}

Graph random_connected_graph(std::size_t nodes, double extra_edge_prob, std::uint64_t seed) {
  if (nodes < 3) throw validation_error("need at least 3 nodes");
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  // Random attachment tree keeps the graph connected.
  for (NodeId u = 1; u < nodes; ++u)
    edges.emplace_back(u, static_cast<NodeId>(rng.integer(u)));
  for (NodeId u = 0; u < nodes; ++u)
    for (NodeId v = u + 1; v < nodes; ++v)
      if (rng.uniform() < extra_edge_prob) edges.emplace_back(u, v);

  Graph g(nodes, edges, {}, 1);
  if (g.is_bipartite()) {
    // Close an odd cycle: connect two neighbors of node 0.
    const auto nb = g.neighbors(0);
    if (nb.size() >= 2) {
      edges.emplace_back(nb[0], nb[1]);
    } else {
      const NodeId other = nb[0];
      const auto nb2 = g.neighbors(other);
      for (NodeId w : nb2)
        if (w != 0) {
          edges.emplace_back(0, w);
          break;
        }
    }
    g = Graph(nodes, edges, {}, 1);
  }
  return g;
}

FeatureMatrix random_features(std::size_t nodes, std::size_t dim, std::uint64_t seed) {
  FeatureMatrix x(nodes, dim);
  Rng rng(seed);
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

}  // namespace adaptkry
