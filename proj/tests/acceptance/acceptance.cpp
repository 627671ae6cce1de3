// Acceptance suite: one pass/fail line per criterion, exit 0 iff every
// non-skipped criterion passes. Criteria 1-8 are self-contained; criterion 9
// needs the Cora files on disk and is reported as SKIP when they are absent.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "adaptkry/datagen.hpp"
#include "adaptkry/graph.hpp"
#include "adaptkry/matrix.hpp"
#include "adaptkry/model.hpp"
#include "adaptkry/propagation.hpp"
#include "adaptkry/rng.hpp"
#include "adaptkry/spectral.hpp"
#include "adaptkry/verify.hpp"

using namespace adaptkry;
namespace fs = std::filesystem;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(int criterion, const std::string& name, bool passed, const std::string& detail) {
  if (!passed) ++failures;
  std::cout << (passed ? "PASS" : "FAIL") << " criterion " << criterion << " [" << name << "] "
            << detail << "\n";
}

void report_skip(int criterion, const std::string& name, const std::string& why) {
  std::cout << "SKIP criterion " << criterion << " [" << name << "] " << why << "\n";
}

// 1. Spectrum monotonicity: 50 graphs, tau grid, zero violations, < 60 s.
void criterion_spectrum_monotonicity() {
  const auto start = std::chrono::steady_clock::now();
  VerifyOptions opt;
  opt.graphs = 50;
  opt.max_nodes = 50;
  opt.tau_grid = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  opt.seed = 101;
  const TheoremReport r = run_monotonicity_suite(opt);
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << r.graphs_tested << " graphs, " << r.violations.size() << " violations, max slack "
         << r.max_residual << ", " << elapsed << " s";
  report(1, "spectrum-monotonicity", r.passed && elapsed < 60.0, detail.str());
}

// 2. Mixing bound: 20 graphs, eps in {0.1, 0.01}, distance <= eps at K, < 60 s.
void criterion_mixing_bound() {
  const auto start = std::chrono::steady_clock::now();
  VerifyOptions opt;
  opt.graphs = 20;
  opt.max_nodes = 50;
  opt.eps_values = {0.1, 0.01};
  opt.seed = 102;
  const TheoremReport r = run_convergence_suite(opt);
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << r.graphs_tested << " graphs x 2 eps, " << r.violations.size()
         << " violations, worst distance-minus-eps " << r.max_residual << ", " << elapsed << " s";
  report(2, "mixing-bound-convergence", r.passed && elapsed < 60.0, detail.str());
}

// 3. Information loss: 100 triples within sqrt((t-K)/t) + 1e-10.
void criterion_information_loss() {
  VerifyOptions opt;
  opt.information_loss_trials = 100;
  opt.max_nodes = 30;
  opt.seed = 103;
  const TheoremReport r = run_information_loss_suite(opt);
  std::ostringstream detail;
  detail << r.graphs_tested << " triples, worst loss-minus-bound " << r.max_residual;
  report(3, "information-loss", r.passed, detail.str());
}

// 4. Basis unification at degree 8, 20 draws per basis, residuals < 1e-8.
void criterion_basis_unification() {
  VerifyOptions opt;
  opt.unification_degree = 8;
  opt.weight_draws = 20;
  opt.max_nodes = 40;
  opt.seed = 104;
  const TheoremReport r = run_basis_unification_suite(opt);
  std::ostringstream detail;
  detail << r.graphs_tested << " draws across chebyshev/bernstein/jacobi(0,0), worst residual "
         << r.max_residual;
  report(4, "basis-unification", r.passed, detail.str());
}

// 5. Merged-basis forward equals the explicit r-basis sum, r in {2,3}.
void criterion_merge_identity() {
  VerifyOptions opt;
  opt.merge_seeds = 10;
  opt.max_nodes = 40;
  opt.seed = 105;
  const TheoremReport r = run_merge_identity_suite(opt);
  std::ostringstream detail;
  detail << r.graphs_tested << " trials (r=2 and r=3), worst diff " << r.max_residual;
  report(5, "merge-identity", r.passed, detail.str());
}

// 6. Lanczos orthogonalization: Gram within 1e-6 of identity, span residual
// < 1e-8 on 20 instances; eigenvector start breaks down at its grade.
void criterion_orthogonalization() {
  Rng rng(106);
  bool passed = true;
  double worst_gram = 0.0, worst_span = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const Graph g = random_connected_graph(10 + rng.integer(30), 0.2, rng.raw());
    const TauPropagator p(g, 0.5 + 0.5 * rng.uniform());
    FeatureMatrix x(g.num_nodes(), 1);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) x(i, 0) = rng.normal();
    const int hops = 6 + static_cast<int>(rng.integer(4));
    const KrylovBasis basis = build_krylov_basis(p, x, hops);
    const LanczosResult lanczos = orthogonalize_basis(p, basis, 0);

    for (int a = 0; a < lanczos.dimension; ++a)
      for (int b = 0; b < lanczos.dimension; ++b) {
        const double inner = dot(lanczos.vectors[static_cast<std::size_t>(a)],
                                 lanczos.vectors[static_cast<std::size_t>(b)]);
        worst_gram = std::max(worst_gram, std::abs(inner - (a == b ? 1.0 : 0.0)));
      }
    for (int j = 0; j < lanczos.dimension; ++j) {
      Matrix q(g.num_nodes(), static_cast<std::size_t>(j) + 1);
      for (int c = 0; c <= j; ++c)
        for (std::size_t i = 0; i < g.num_nodes(); ++i)
          q(i, static_cast<std::size_t>(c)) = lanczos.vectors[static_cast<std::size_t>(c)][i];
      std::vector<double> power(g.num_nodes());
      for (std::size_t i = 0; i < g.num_nodes(); ++i)
        power[i] = basis.blocks[static_cast<std::size_t>(j)](i, 0);
      worst_span = std::max(worst_span, projection_residual(q, power));
    }
  }
  passed = worst_gram < 1e-6 && worst_span < 1e-8;

  // Breakdown at the numerical grade for an eigenvector start.
  const Graph g = random_connected_graph(18, 0.25, 1066);
  const TauPropagator p(g, 0.9);
  const SpectrumReport spectrum = eig_oracle(g, 0.9);
  FeatureMatrix vec(18, 1);
  for (std::size_t i = 0; i < 18; ++i) vec(i, 0) = spectrum.eigenvectors(i, 5);
  const LanczosResult lanczos = orthogonalize_basis(p, build_krylov_basis(p, vec, 8), 0);
  const bool breakdown_ok = lanczos.breakdown && lanczos.dimension == 1;
  passed = passed && breakdown_ok;

  std::ostringstream detail;
  detail << "20 instances, worst gram off-identity " << worst_gram << ", worst span residual "
         << worst_span << ", eigenvector breakdown at grade "
         << (breakdown_ok ? "1" : "NOT 1");
  report(6, "lanczos-orthogonalization", passed, detail.str());
}

// 7. Analytic gradients against central differences on a 10-node instance.
void criterion_gradient_check() {
  SyntheticSpec spec;
  spec.nodes = 10;
  spec.num_classes = 2;
  spec.target_homophily = 0.6;
  spec.mean_degree = 4.0;
  spec.feature_dim = 3;
  spec.seed = 107;
  const SyntheticDataset data = generate(spec);
  const TauPropagator p(data.graph, 0.9);
  const KrylovBasis basis = build_krylov_basis(p, data.features, 2);
  FilterModel model(2, 3, 5, 2, 107);
  std::vector<NodeId> nodes(data.graph.num_nodes());
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  const std::vector<int> labels(data.graph.labels().begin(), data.graph.labels().end());

  const GradientResult analytic = model_loss_gradients(model, basis, nodes, labels);
  const double step = 1e-5;
  double worst = 0.0;
  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double up = model_loss(model, basis, nodes, labels);
    params[i] = saved - step;
    const double down = model_loss(model, basis, nodes, labels);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic.grad[i] - numeric) /
                                std::max({1e-8, std::abs(analytic.grad[i]), std::abs(numeric)}));
  }
  std::ostringstream detail;
  detail << params.size() << " parameters, worst relative error " << worst;
  report(7, "gradient-check", worst <= 1e-4, detail.str());
}

// 8. End-to-end synthetic: homophily run reaches 0.95 over 5 splits;
// heterophily run shows best-tau beating tau=0.1 by >= 5 points; < 5 min.
void criterion_end_to_end() {
  const auto start = std::chrono::steady_clock::now();

  SyntheticSpec homo;
  homo.nodes = 600;
  homo.num_classes = 2;
  homo.target_homophily = 0.9;
  homo.mean_degree = 10.0;
  homo.feature_dim = 16;
  homo.class_separation = 6.0;  // near-separable features
  homo.noise_scale = 1.0;
  homo.seed = 108;
  const SyntheticDataset homo_data = generate(homo);
  const TauPropagator p(homo_data.graph, 0.9);
  const KrylovBasis basis = build_krylov_basis(p, homo_data.features, 10);
  const auto splits = make_splits(homo_data.graph.num_nodes(), 108, 5);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.hidden = 64;
  cfg.epochs = 500;
  cfg.patience = 100;
  std::vector<double> accs;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    TrainConfig split_cfg = cfg;
    split_cfg.seed = Rng::derive(108, s);
    const FilterModel init(10, 16, cfg.hidden, 2, split_cfg.seed);
    accs.push_back(train(init, basis, homo_data.graph, splits[s], split_cfg).test_accuracy);
  }
  const double homo_mean =
      std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());

  SyntheticSpec hetero = homo;
  hetero.target_homophily = 0.1;
  hetero.class_separation = 1.4;  // weak features; propagation carries the signal
  hetero.noise_scale = 2.0;
  hetero.seed = 109;
  const SyntheticDataset hetero_data = generate(hetero);
  const auto hetero_splits = make_splits(hetero_data.graph.num_nodes(), 109, 3);
  const std::vector<double> tau_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  TrainConfig sweep_cfg = cfg;
  sweep_cfg.seed = 109;
  const auto rows =
      tau_sweep(hetero_data.graph, hetero_data.features, 10, tau_grid, sweep_cfg, hetero_splits);
  const double at_first_tau = rows.front().mean_accuracy;
  double best = 0.0;
  double best_tau = tau_grid.front();
  for (const auto& row : rows) {
    if (row.mean_accuracy > best) {
      best = row.mean_accuracy;
      best_tau = row.tau;
    }
  }
  const double elapsed = seconds_since(start);

  const bool homo_ok = homo_mean >= 0.95;
  const bool hetero_ok = best - at_first_tau >= 0.05;
  std::ostringstream detail;
  detail << "homophily mean acc " << homo_mean << " (>= 0.95), heterophily best tau " << best_tau
         << " acc " << best << " vs tau=0.1 acc " << at_first_tau << " (gap "
         << (best - at_first_tau) << " >= 0.05), " << elapsed << " s";
  report(8, "end-to-end-synthetic", homo_ok && hetero_ok && elapsed < 300.0, detail.str());
}

// 9. Stretch: Cora with the published hyperparameters, 10 splits, mean
// accuracy inside [88.0, 91.9]. Skipped when the files are not on disk.
void criterion_cora_stretch() {
  fs::path dir;
  if (const char* env = std::getenv("ADAPTKRY_CORA_DIR")) dir = env;
  else dir = "data/cora";
  const fs::path edges = dir / "edges.tsv";
  const fs::path features = dir / "features.csv";
  const fs::path labels = dir / "labels.txt";
  if (!fs::exists(edges) || !fs::exists(features) || !fs::exists(labels)) {
    report_skip(9, "cora-stretch",
                "Cora files not found under " + dir.string() +
                    " (set ADAPTKRY_CORA_DIR); stretch criterion is not part of the CI gate");
    return;
  }
  const LoadedDataset data = load_graph(edges, features, labels);
  std::cout << "     cora files: n=" << data.graph.num_nodes() << " m=" << data.graph.num_edges()
            << " d=" << data.features.cols() << " classes=" << data.graph.num_classes() << "\n";
  const std::vector<double> taus = {0.5, 0.8, 1.1};
  const KrylovBasis basis = build_merged_basis(data.graph, taus, data.features, 10);
  const auto splits = make_splits(data.graph.num_nodes(), 1, 10);
  TrainConfig cfg;
  cfg.learning_rate = 0.10;
  cfg.hidden = 256;
  cfg.epochs = 1000;
  cfg.patience = 200;
  std::vector<double> accs;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    TrainConfig split_cfg = cfg;
    split_cfg.seed = Rng::derive(1, s);
    const FilterModel init(10, data.features.cols(), cfg.hidden, data.graph.num_classes(),
                           split_cfg.seed);
    accs.push_back(train(init, basis, data.graph, splits[s], split_cfg).test_accuracy);
  }
  const double mean =
      100.0 * std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
  std::ostringstream detail;
  detail << "mean accuracy " << mean << " over 10 splits, accepted band [88.0, 91.9]";
  report(9, "cora-stretch", mean >= 88.0 && mean <= 91.9, detail.str());
}

}  // namespace

int main() {
  criterion_spectrum_monotonicity();
  criterion_mixing_bound();
  criterion_information_loss();
  criterion_basis_unification();
  criterion_merge_identity();
  criterion_orthogonalization();
  criterion_gradient_check();
  criterion_end_to_end();
  criterion_cora_stretch();
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
