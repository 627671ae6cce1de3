#include <doctest.h>

#include "adaptkry/datagen.hpp"
#include "adaptkry/error.hpp"
#include "adaptkry/graph.hpp"
#include "adaptkry/model.hpp"
#include "adaptkry/propagation.hpp"

using namespace adaptkry;

TEST_CASE("planted partition hits the target homophily") {
  SyntheticSpec spec;
  spec.nodes = 600;
  spec.target_homophily = 0.9;
  spec.seed = 1;
  const SyntheticDataset data = generate(spec);
  CHECK(data.achieved_homophily >= 0.85);
  CHECK(data.achieved_homophily <= 0.95);
  CHECK(data.graph.is_connected());
  CHECK_FALSE(data.graph.is_bipartite());
  CHECK(data.features.rows() == data.graph.num_nodes());
}

TEST_CASE("near-one homophily leaves no cross edges") {
  SyntheticSpec spec;
  spec.nodes = 300;
  spec.target_homophily = 1.0 - 1e-12;
  spec.seed = 2;
  const SyntheticDataset data = generate(spec);
  CHECK(homophily_ratio(data.graph) == 1.0);
}

TEST_CASE("zero separation keeps any classifier at chance level") {
  SyntheticSpec spec;
  spec.nodes = 400;
  spec.num_classes = 2;
  spec.target_homophily = 0.5;  // structure carries no signal either
  spec.class_separation = 0.0;
  spec.seed = 3;
  const SyntheticDataset data = generate(spec);
  const TauPropagator p(data.graph, 0.9);
  const KrylovBasis basis = build_krylov_basis(p, data.features, 4);
  const auto splits = make_splits(data.graph.num_nodes(), 4, 1);
  TrainConfig cfg;
  cfg.epochs = 120;
  cfg.patience = 120;
  cfg.hidden = 16;
  cfg.seed = 5;
  const FilterModel init(4, spec.feature_dim, cfg.hidden, 2, cfg.seed);
  const TrainResult result = train(init, basis, data.graph, splits[0], cfg);
  CHECK(result.test_accuracy > 0.3);
  CHECK(result.test_accuracy < 0.7);
}

TEST_CASE("generation is deterministic per seed") {
  SyntheticSpec spec;
  spec.nodes = 150;
  spec.seed = 9;
  const SyntheticDataset a = generate(spec);
  const SyntheticDataset b = generate(spec);
  CHECK(a.graph.num_edges() == b.graph.num_edges());
  CHECK(std::equal(a.graph.csr_targets().begin(), a.graph.csr_targets().end(),
                   b.graph.csr_targets().begin()));
  CHECK(max_abs_diff(a.features, b.features) == 0.0);
}

TEST_CASE("infeasible density is rejected") {
  SyntheticSpec spec;
  spec.nodes = 20;
  spec.mean_degree = 50.0;  // p_in would exceed 1
  CHECK_THROWS_AS(generate(spec), validation_error);
}

TEST_CASE("feature dim must cover the classes") {
  SyntheticSpec spec;
  spec.num_classes = 8;
  spec.feature_dim = 4;
  CHECK_THROWS_AS(generate(spec), validation_error);
}

TEST_CASE("random connected graphs are connected, non-bipartite and reproducible") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Graph g = random_connected_graph(30, 0.1, seed);
    CHECK(g.is_connected());
    CHECK_FALSE(g.is_bipartite());
    const Graph again = random_connected_graph(30, 0.1, seed);
    CHECK(g.num_edges() == again.num_edges());
  }
}
