#include <benchmark/benchmark.h>

#include "adaptkry/datagen.hpp"
#include "adaptkry/graph.hpp"
#include "adaptkry/model.hpp"
#include "adaptkry/propagation.hpp"
#include "adaptkry/rng.hpp"
#include "adaptkry/spectral.hpp"

using namespace adaptkry;

namespace {

Graph benchmark_graph(std::size_t n) { return random_connected_graph(n, 8.0 / static_cast<double>(n), 42); }

void BM_BuildPropagator(benchmark::State& state) {
  const Graph g = benchmark_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    TauPropagator p(g, 0.8);
    benchmark::DoNotOptimize(p.values().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildPropagator)->Arg(1000)->Arg(10000)->Arg(50000)->Complexity(benchmark::oN);

void BM_SparseApplyBlock(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const Graph g = benchmark_graph(n);
  const TauPropagator p(g, 0.8);
  const FeatureMatrix x = random_features(n, dim, 7);
  for (auto _ : state) {
    Matrix y = p.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>((2 * g.num_edges() + n) * dim));
}
BENCHMARK(BM_SparseApplyBlock)->Args({5000, 16})->Args({5000, 64})->Args({20000, 16});

void BM_KrylovBasis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int hops = static_cast<int>(state.range(1));
  const Graph g = benchmark_graph(n);
  const TauPropagator p(g, 0.8);
  const FeatureMatrix x = random_features(n, 16, 7);
  for (auto _ : state) {
    KrylovBasis basis = build_krylov_basis(p, x, hops);
    benchmark::DoNotOptimize(basis.blocks.back().data());
  }
}
BENCHMARK(BM_KrylovBasis)->Args({5000, 5})->Args({5000, 10})->Args({20000, 10});

void BM_SymmetricEigen(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = benchmark_graph(n);
  const TauPropagator p(g, 1.0);
  const Matrix laplacian = p.dense_laplacian();
  for (auto _ : state) {
    SymmetricEigen eig = symmetric_eigen(laplacian);
    benchmark::DoNotOptimize(eig.eigenvalues.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SymmetricEigen)->Arg(50)->Arg(100)->Arg(200)->Arg(400)->Complexity(benchmark::oNCubed);

void BM_TrainGradientStep(benchmark::State& state) {
  SyntheticSpec spec;
  spec.nodes = static_cast<std::size_t>(state.range(0));
  spec.seed = 3;
  const SyntheticDataset data = generate(spec);
  const TauPropagator p(data.graph, 0.9);
  const KrylovBasis basis = build_krylov_basis(p, data.features, 10);
  const FilterModel model(10, spec.feature_dim, 64, 2, 5);
  std::vector<NodeId> nodes(data.graph.num_nodes());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<NodeId>(i);
  const std::vector<int> labels(data.graph.labels().begin(), data.graph.labels().end());
  for (auto _ : state) {
    GradientResult grads = model_loss_gradients(model, basis, nodes, labels);
    benchmark::DoNotOptimize(grads.grad.data());
  }
}
BENCHMARK(BM_TrainGradientStep)->Arg(600)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
