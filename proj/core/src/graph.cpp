#include "adaptkry/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "adaptkry/error.hpp"
#include "adaptkry/rng.hpp"

namespace adaptkry {

Graph::Graph(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges,
             std::vector<int> labels, int num_classes)
    : n_(node_count), labels_(std::move(labels)), num_classes_(num_classes) {
  if (!labels_.empty() && labels_.size() != n_) {
    throw validation_error("label count " + std::to_string(labels_.size()) +
                           " does not match node count " + std::to_string(n_));
  }
  if (labels_.empty()) labels_.assign(n_, 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || (num_classes_ > 0 && labels_[i] >= num_classes_)) {
      throw validation_error("label " + std::to_string(labels_[i]) + " of node " +
                             std::to_string(i) + " outside [0," +
                             std::to_string(num_classes_) + ")");
    }
  }

  std::vector<std::pair<NodeId, NodeId>> canonical;
  canonical.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n_ || v >= n_) {
      throw validation_error("edge (" + std::to_string(u) + "," + std::to_string(v) +
                             ") references a node id outside [0," + std::to_string(n_) + ")");
    }
    if (u == v) {
      ++dropped_self_loops_;
      continue;
    }
    canonical.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canonical.begin(), canonical.end());
  const auto last = std::unique(canonical.begin(), canonical.end());
  deduplicated_edges_ = static_cast<std::size_t>(canonical.end() - last);
  canonical.erase(last, canonical.end());
  m_ = canonical.size();

  degrees_.assign(n_, 0);
  for (auto [u, v] : canonical) {
    ++degrees_[u];
    ++degrees_[v];
  }
  offsets_.assign(n_ + 1, 0);
  for (std::size_t u = 0; u < n_; ++u) offsets_[u + 1] = offsets_[u] + degrees_[u];
  targets_.resize(2 * m_);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : canonical) {
    targets_[cursor[u]++] = v;
    targets_[cursor[v]++] = u;
  }
  for (std::size_t u = 0; u < n_; ++u)
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]));
}

std::uint32_t Graph::min_degree() const {
  if (n_ == 0) return 0;
  return *std::min_element(degrees_.begin(), degrees_.end());
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

bool Graph::is_connected() const {
  if (n_ == 0) return true;
  std::vector<char> seen(n_, 0);
  std::deque<NodeId> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == n_;
}

bool Graph::is_bipartite() const {
  std::vector<int> color(n_, -1);
  for (NodeId start = 0; start < n_; ++start) {
    if (color[start] != -1) continue;
    color[start] = 0;
    std::deque<NodeId> queue{start};
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : neighbors(u)) {
        if (color[v] == -1) {
          color[v] = 1 - color[u];
          queue.push_back(v);
        } else if (color[v] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

void Graph::validate_for_spectral() const {
  if (!is_connected()) throw validation_error("graph is not connected");
  if (is_bipartite()) throw validation_error("graph is bipartite");
}

Matrix Graph::dense_adjacency() const {
  Matrix a(n_, n_);
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v : neighbors(u)) a(u, v) = 1.0;
  return a;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  return in;
}

bool parse_node_id(std::string_view token, NodeId& out) {
  const auto* begin = token.data();
  const auto* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

LoadedDataset load_graph(const std::filesystem::path& edge_path,
                         const std::filesystem::path& feature_path,
                         const std::filesystem::path& label_path) {
  // Labels fix n and C.
  std::vector<int> labels;
  {
    auto in = open_input(label_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      int value = 0;
      const auto* begin = line.data();
      const auto* end = begin + line.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc{} || ptr != end || value < 0) {
        throw validation_error(label_path.string() + ":" + std::to_string(lineno) +
                               ": expected a non-negative integer label, got \"" + line + "\"");
      }
      labels.push_back(value);
    }
  }
  const std::size_t n = labels.size();
  const int num_classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

  // Features: CSV, no header, n rows.
  FeatureMatrix features;
  {
    auto in = open_input(feature_path);
    std::string line;
    std::vector<double> values;
    std::size_t rows = 0, cols = 0, lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::size_t row_cols = 0;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        const std::string token = line.substr(pos, comma - pos);
        try {
          std::size_t used = 0;
          const double v = std::stod(token, &used);
          while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
            ++used;
          if (used != token.size() || !std::isfinite(v)) throw std::invalid_argument(token);
          values.push_back(v);
        } catch (const std::exception&) {
          throw validation_error(feature_path.string() + ":" + std::to_string(lineno) +
                                 ": non-numeric feature \"" + token + "\"");
        }
        ++row_cols;
        pos = comma + 1;
      }
      if (cols == 0) {
        cols = row_cols;
      } else if (row_cols != cols) {
        throw validation_error(feature_path.string() + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(cols) + " columns, got " +
                               std::to_string(row_cols));
      }
      ++rows;
    }
    if (rows != n) {
      throw validation_error("row count mismatch: " + feature_path.string() + " has " +
                             std::to_string(rows) + " rows, " + label_path.string() + " has " +
                             std::to_string(n));
    }
    features = FeatureMatrix(rows, cols);
    std::copy(values.begin(), values.end(), features.data());
  }

  // Edges: "u<TAB>v" (any whitespace accepted), '#' comments.
  std::vector<std::pair<NodeId, NodeId>> edges;
  {
    auto in = open_input(edge_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string a, b;
      if (!(fields >> a)) continue;  // blank or comment-only line
      std::string extra;
      NodeId u = 0, v = 0;
      if (!(fields >> b) || (fields >> extra) || !parse_node_id(a, u) || !parse_node_id(b, v)) {
        throw validation_error(edge_path.string() + ":" + std::to_string(lineno) +
                               ": expected \"u\\tv\", got \"" + line + "\"");
      }
      edges.emplace_back(u, v);
    }
  }

  Graph g(n, std::move(edges), std::move(labels), num_classes);
  return {std::move(g), std::move(features)};
}

void save_dataset(const Graph& g, const FeatureMatrix& x,
                  const std::filesystem::path& edge_path,
                  const std::filesystem::path& feature_path,
                  const std::filesystem::path& label_path) {
  {
    std::ofstream out(edge_path);
    if (!out) throw io_error("cannot write " + edge_path.string());
    for (NodeId u = 0; u < g.num_nodes(); ++u)
      for (NodeId v : g.neighbors(u))
        if (u < v) out << u << '\t' << v << '\n';
  }
  {
    std::ofstream out(feature_path);
    if (!out) throw io_error("cannot write " + feature_path.string());
    out.precision(17);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j) {
        if (j) out << ',';
        out << x(i, j);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(label_path);
    if (!out) throw io_error("cannot write " + label_path.string());
    for (NodeId u = 0; u < g.num_nodes(); ++u) out << g.label(u) << '\n';
  }
}

double homophily_ratio(const Graph& g) {
  if (g.num_edges() == 0) throw validation_error("homophily ratio undefined for m = 0");
  std::size_t same = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.neighbors(u))
      if (u < v && g.label(u) == g.label(v)) ++same;
  return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

double label_difference_energy(const Graph& g, int class_a, int class_b) {
  bool has_a = false, has_b = false;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    has_a = has_a || g.label(u) == class_a;
    has_b = has_b || g.label(u) == class_b;
  }
  if (!has_a || !has_b) {
    throw validation_error("class " + std::to_string(!has_a ? class_a : class_b) +
                           " absent from graph");
  }
  // (y_u - y_v)^2 is 0 for same-class endpoints and 4 across classes.
  std::size_t cross = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.label(u) != class_a && g.label(u) != class_b) continue;
    for (NodeId v : g.neighbors(u)) {
      if (u >= v) continue;
      if (g.label(v) != class_a && g.label(v) != class_b) continue;
      if (g.label(u) != g.label(v)) ++cross;
    }
  }
  return static_cast<double>(4 * cross);
}

std::vector<SplitSet> make_splits(std::size_t node_count, std::uint64_t seed, int count) {
  if (node_count < 5) throw validation_error("need at least 5 nodes to split");
  std::vector<SplitSet> splits;
  splits.reserve(static_cast<std::size_t>(count));
  const auto train_size = static_cast<std::size_t>(std::floor(0.6 * static_cast<double>(node_count)));
  const auto val_size = static_cast<std::size_t>(std::floor(0.2 * static_cast<double>(node_count)));
  for (int s = 0; s < count; ++s) {
    SplitSet split;
    split.seed = Rng::derive(seed, static_cast<std::uint64_t>(s));
    Rng rng(split.seed);
    std::vector<NodeId> order(node_count);
    std::iota(order.begin(), order.end(), NodeId{0});
    for (std::size_t i = node_count - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.integer(i + 1));
      std::swap(order[i], order[j]);
    }
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
    split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(train_size),
                     order.begin() + static_cast<std::ptrdiff_t>(train_size + val_size));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_size + val_size),
                      order.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

std::vector<SplitSet> make_splits(const Graph& g, std::uint64_t seed, int count) {
  return make_splits(g.num_nodes(), seed, count);
}

std::string split_to_json(const SplitSet& s) {
  nlohmann::json j;
  j["seed"] = s.seed;
  j["train"] = s.train;
  j["val"] = s.val;
  j["test"] = s.test;
  return j.dump();
}

SplitSet split_from_json(const std::string& text) {
  SplitSet s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.seed = j.at("seed").get<std::uint64_t>();
    s.train = j.at("train").get<std::vector<NodeId>>();
    s.val = j.at("val").get<std::vector<NodeId>>();
    s.test = j.at("test").get<std::vector<NodeId>>();
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed split JSON: ") + e.what());
  }
  return s;
}

}  // namespace adaptkry
