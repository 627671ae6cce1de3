#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaptkry/matrix.hpp"

namespace adaptkry {

using NodeId = std::uint32_t;

// Node features, one row per node.
using FeatureMatrix = Matrix;

// Immutable sparse undirected graph in CSR form. Each undirected edge is
// stored in both directions; self-loops are never stored.
class Graph {
 public:
  Graph() = default;

  // `edges` may contain duplicates, self-loops and either orientation; the
  // constructor symmetrizes and deduplicates. Self-loops are dropped (the
  // count is available via dropped_self_loops()).
  Graph(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges,
        std::vector<int> labels, int num_classes);

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return m_; }  // undirected count
  int num_classes() const noexcept { return num_classes_; }

  std::span<const std::size_t> csr_offsets() const noexcept { return offsets_; }
  std::span<const NodeId> csr_targets() const noexcept { return targets_; }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  std::uint32_t degree(NodeId u) const { return degrees_[u]; }
  std::span<const std::uint32_t> degrees() const noexcept { return degrees_; }
  std::uint32_t min_degree() const;

  int label(NodeId u) const { return labels_[u]; }
  std::span<const int> labels() const noexcept { return labels_; }

  std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }
  std::size_t deduplicated_edges() const noexcept { return deduplicated_edges_; }

  bool has_edge(NodeId u, NodeId v) const;
  bool is_connected() const;
  bool is_bipartite() const;

  // Throws validation_error unless connected and non-bipartite; spectral
  // operations that rely on those assumptions call this first.
  void validate_for_spectral() const;

  // Dense 0/1 adjacency; intended for desk-scale oracles only.
  Matrix dense_adjacency() const;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<std::uint32_t> degrees_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  std::size_t dropped_self_loops_ = 0;
  std::size_t deduplicated_edges_ = 0;
};

struct LoadedDataset {
  Graph graph;
  FeatureMatrix features;
};

// Reads the plain-text dataset interchange formats: a TSV edge list
// ("u\tv" per line, '#' comments), a headerless CSV feature matrix and a
// one-integer-per-line label file. Node count is fixed by the label file.
LoadedDataset load_graph(const std::filesystem::path& edge_path,
                         const std::filesystem::path& feature_path,
                         const std::filesystem::path& label_path);

// Writes the same three files load_graph reads.
void save_dataset(const Graph& g, const FeatureMatrix& x,
                  const std::filesystem::path& edge_path,
                  const std::filesystem::path& feature_path,
                  const std::filesystem::path& label_path);

// Fraction of edges whose endpoints share a class. Throws on m = 0.
double homophily_ratio(const Graph& g);

// Sum of (y_u - y_v)^2 over edges with both endpoints in {class_a, class_b},
// where y is +1 on class_a and -1 on class_b. Equals 4(1-h)m exactly for a
// binary-labeled graph. Integer arithmetic internally.
double label_difference_energy(const Graph& g, int class_a, int class_b);

struct SplitSet {
  std::uint64_t seed = 0;
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

// `count` disjoint-per-set random splits, reproducible from `seed`.
// Sizes: train = floor(0.6 n), val = floor(0.2 n), test = remainder.
std::vector<SplitSet> make_splits(std::size_t node_count, std::uint64_t seed, int count);
std::vector<SplitSet> make_splits(const Graph& g, std::uint64_t seed, int count);

std::string split_to_json(const SplitSet& s);
SplitSet split_from_json(const std::string& text);

}  // namespace adaptkry
