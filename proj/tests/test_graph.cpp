#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "adaptkry/datagen.hpp"
#include "adaptkry/error.hpp"
#include "adaptkry/graph.hpp"
#include "adaptkry/rng.hpp"
#include "support/oracles.hpp"

using namespace adaptkry;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "adaptkry_graph_tests";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("triangle edge list gives K3") {
  const Graph g = oracles::triangle();
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 3);
  for (NodeId u = 0; u < 3; ++u) CHECK(g.degree(u) == 2);
}

TEST_CASE("duplicate and reversed edges count once") {
  const Graph g(3, {{0, 1}, {0, 1}, {1, 0}, {1, 2}}, {}, 1);
  CHECK(g.num_edges() == 2);
  CHECK(g.deduplicated_edges() == 2);
}

TEST_CASE("self loops are dropped and counted") {
  const Graph g(3, {{0, 0}, {0, 1}, {2, 2}}, {}, 1);
  CHECK(g.num_edges() == 1);
  CHECK(g.dropped_self_loops() == 2);
}

TEST_CASE("sum of degrees equals 2m and CSR is symmetric") {
  const Graph g = random_connected_graph(40, 0.1, 7);
  std::size_t degree_sum = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) degree_sum += g.degree(u);
  CHECK(degree_sum == 2 * g.num_edges());
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.neighbors(u)) CHECK(g.has_edge(v, u));
}

TEST_CASE("load_graph parses the three plain-text files") {
  const fs::path dir = temp_dir();
  write_file(dir / "edges.tsv", "# comment line\n0\t1\n1\t2\n0\t2\n0\t1\n2\t2\n");
  write_file(dir / "x.csv", "1.0,2.0\n3.0,4.0\n5.0,6.0\n");
  write_file(dir / "y.txt", "0\n1\n1\n");
  const LoadedDataset data = load_graph(dir / "edges.tsv", dir / "x.csv", dir / "y.txt");
  CHECK(data.graph.num_nodes() == 3);
  CHECK(data.graph.num_edges() == 3);  // dedup + self-loop dropped
  CHECK(data.graph.dropped_self_loops() == 1);
  CHECK(data.graph.num_classes() == 2);
  CHECK(data.features.rows() == 3);
  CHECK(data.features.cols() == 2);
  CHECK(data.features(2, 1) == doctest::Approx(6.0));

  SUBCASE("out-of-range node id") {
    write_file(dir / "bad_edges.tsv", "0\t5\n");
    CHECK_THROWS_AS(load_graph(dir / "bad_edges.tsv", dir / "x.csv", dir / "y.txt"),
                    validation_error);
  }
  SUBCASE("row count mismatch") {
    write_file(dir / "short.csv", "1.0,2.0\n3.0,4.0\n");
    CHECK_THROWS_AS(load_graph(dir / "edges.tsv", dir / "short.csv", dir / "y.txt"),
                    validation_error);
  }
  SUBCASE("non-numeric feature") {
    write_file(dir / "bad.csv", "1.0,2.0\n3.0,oops\n5.0,6.0\n");
    CHECK_THROWS_AS(load_graph(dir / "edges.tsv", dir / "bad.csv", dir / "y.txt"),
                    validation_error);
  }
  SUBCASE("missing file is an io error") {
    CHECK_THROWS_AS(load_graph(dir / "nope.tsv", dir / "x.csv", dir / "y.txt"), io_error);
  }
}

TEST_CASE("save_dataset round-trips through load_graph") {
  const fs::path dir = temp_dir();
  SyntheticSpec spec;
  spec.nodes = 60;
  spec.seed = 3;
  const SyntheticDataset data = generate(spec);
  save_dataset(data.graph, data.features, dir / "r.edges.tsv", dir / "r.features.csv",
               dir / "r.labels.txt");
  const LoadedDataset loaded =
      load_graph(dir / "r.edges.tsv", dir / "r.features.csv", dir / "r.labels.txt");
  CHECK(loaded.graph.num_nodes() == data.graph.num_nodes());
  CHECK(loaded.graph.num_edges() == data.graph.num_edges());
  CHECK(max_abs_diff(loaded.features, data.features) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("homophily ratio") {
  SUBCASE("all nodes same class") {
    const Graph g(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0}, 1);
    CHECK(homophily_ratio(g) == 1.0);
  }
  SUBCASE("two-node path with different classes") {
    const Graph g = oracles::path2({0, 1});
    CHECK(homophily_ratio(g) == 0.0);
  }
  SUBCASE("m = 0 is an error") {
    const Graph g(3, {}, {0, 0, 0}, 1);
    CHECK_THROWS_AS(homophily_ratio(g), validation_error);
  }
  SUBCASE("invariant under class relabeling") {
    SyntheticSpec spec;
    spec.nodes = 80;
    spec.num_classes = 3;
    spec.target_homophily = 0.5;
    spec.feature_dim = 3;
    spec.seed = 11;
    const SyntheticDataset data = generate(spec);
    const double h = homophily_ratio(data.graph);
    std::vector<int> permuted(data.graph.labels().begin(), data.graph.labels().end());
    for (auto& c : permuted) c = (c + 1) % 3;  // cyclic permutation
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < data.graph.num_nodes(); ++u)
      for (NodeId v : data.graph.neighbors(u))
        if (u < v) edges.emplace_back(u, v);
    const Graph relabeled(data.graph.num_nodes(), edges, permuted, 3);
    CHECK(homophily_ratio(relabeled) == h);
  }
}

TEST_CASE("label difference energy equals 4(1-h)m for binary labels") {
  SUBCASE("h = 1 gives zero") {
    const Graph g(4, {{0, 1}, {2, 3}}, {0, 0, 1, 1}, 2);
    CHECK(homophily_ratio(g) == 1.0);
    CHECK(label_difference_energy(g, 0, 1) == 0.0);
  }
  SUBCASE("opposite labels on a 2-path") {
    const Graph g = oracles::path2({0, 1});
    CHECK(label_difference_energy(g, 0, 1) == 4.0);
  }
  SUBCASE("random binary graph, exact integer identity") {
    SyntheticSpec spec;
    spec.nodes = 30;
    spec.target_homophily = 0.4;
    spec.mean_degree = 6.0;
    spec.feature_dim = 2;
    spec.seed = 5;
    const SyntheticDataset data = generate(spec);
    const Graph& g = data.graph;
    // Brute-force oracle: scan all node pairs.
    std::size_t cross = 0, edges = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u)
      for (NodeId v = u + 1; v < g.num_nodes(); ++v)
        if (g.has_edge(u, v)) {
          ++edges;
          if (g.label(u) != g.label(v)) ++cross;
        }
    const double h = 1.0 - static_cast<double>(cross) / static_cast<double>(edges);
    const double expected = 4.0 * (1.0 - h) * static_cast<double>(edges);
    CHECK(label_difference_energy(g, 0, 1) == expected);
    CHECK(static_cast<double>(4 * cross) == expected);
  }
  SUBCASE("absent class") {
    const Graph g = oracles::path2({0, 0});
    CHECK_THROWS_AS(label_difference_energy(g, 0, 7), validation_error);
  }
}

TEST_CASE("make_splits is deterministic with floor rounding") {
  SUBCASE("n = 10") {
    const auto splits = make_splits(10, 0, 3);
    REQUIRE(splits.size() == 3);
    for (const auto& s : splits) {
      CHECK(s.train.size() == 6);
      CHECK(s.val.size() == 2);
      CHECK(s.test.size() == 2);
    }
  }
  SUBCASE("n = 2708") {
    const auto splits = make_splits(2708, 1, 1);
    CHECK(splits[0].train.size() == 1624);
    CHECK(splits[0].val.size() == 541);
    CHECK(splits[0].test.size() == 543);
  }
  SUBCASE("same seed twice") {
    const auto a = make_splits(101, 42, 10);
    const auto b = make_splits(101, 42, 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].train == b[i].train);
      CHECK(a[i].val == b[i].val);
      CHECK(a[i].test == b[i].test);
    }
  }
  SUBCASE("splits are disjoint and cover [0, n)") {
    for (const auto& s : make_splits(57, 9, 4)) {
      std::set<NodeId> seen;
      seen.insert(s.train.begin(), s.train.end());
      seen.insert(s.val.begin(), s.val.end());
      seen.insert(s.test.begin(), s.test.end());
      CHECK(seen.size() == 57);  // disjoint union of the right total size
      CHECK(*seen.rbegin() == 56);
    }
  }
  SUBCASE("too few nodes") { CHECK_THROWS_AS(make_splits(4, 0, 1), validation_error); }
}

TEST_CASE("split JSON round-trip") {
  const auto splits = make_splits(20, 77, 1);
  const std::string text = split_to_json(splits[0]);
  const SplitSet back = split_from_json(text);
  CHECK(back.seed == splits[0].seed);
  CHECK(back.train == splits[0].train);
  CHECK(back.val == splits[0].val);
  CHECK(back.test == splits[0].test);
  CHECK_THROWS_AS(split_from_json("{\"seed\": 1}"), validation_error);
}

TEST_CASE("validate_for_spectral rejects disconnected and bipartite graphs") {
  CHECK_THROWS_AS(Graph(4, {{0, 1}, {2, 3}}, {}, 1).validate_for_spectral(), validation_error);
  CHECK_THROWS_AS(oracles::star4().validate_for_spectral(), validation_error);
  CHECK_NOTHROW(oracles::triangle().validate_for_spectral());
}
