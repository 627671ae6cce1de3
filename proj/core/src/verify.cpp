#include "adaptkry/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "adaptkry/datagen.hpp"
#include "adaptkry/error.hpp"
#include "adaptkry/graph.hpp"
#include "adaptkry/matrix.hpp"
#include "adaptkry/model.hpp"
#include "adaptkry/polybases.hpp"
#include "adaptkry/propagation.hpp"
#include "adaptkry/rng.hpp"
#include "adaptkry/spectral.hpp"

namespace adaptkry {

namespace {

Graph sample_graph(Rng& rng, std::size_t max_nodes) {
  const std::size_t n = 5 + rng.integer(max_nodes - 4);
  const double extra = 0.05 + 0.15 * rng.uniform();
  return random_connected_graph(n, extra, rng.raw());
}

std::vector<double> unit_signal(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  const double norm = norm2(x);
  for (auto& v : x) v /= norm;
  return x;
}

std::vector<double> apply_laplacian(const TauPropagator& p, std::span<const double> v) {
  std::vector<double> out = p.apply(v);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] - out[i];
  return out;
}

// Filtered signal through each basis's own evaluation form: Chebyshev and
// Jacobi by their three-term recurrences in the propagation matrix, Bernstein
// by its (2I - L)^{K-k} L^k product form.
std::vector<double> filter_by_recurrence(const PolyCoeffMatrix& coeffs,
                                         const TauPropagator& p, std::span<const double> w,
                                         std::span<const double> x) {
  const std::size_t n = x.size();
  const int degree = coeffs.degree;
  std::vector<double> out(n, 0.0);
  auto accumulate = [&](std::span<const double> vec, double scale) {
    for (std::size_t i = 0; i < n; ++i) out[i] += scale * vec[i];
  };
  switch (coeffs.kind) {
    case PolyBasisKind::monomial: {
      std::vector<double> power(x.begin(), x.end());
      accumulate(power, w[0]);
      for (int k = 1; k <= degree; ++k) {
        power = p.apply(power);
        accumulate(power, w[static_cast<std::size_t>(k)]);
      }
      break;
    }
    case PolyBasisKind::chebyshev: {
      std::vector<double> prev(x.begin(), x.end());
      accumulate(prev, w[0]);
      if (degree >= 1) {
        std::vector<double> curr = p.apply(prev);
        accumulate(curr, w[1]);
        for (int k = 2; k <= degree; ++k) {
          std::vector<double> next = p.apply(curr);
          for (std::size_t i = 0; i < n; ++i) next[i] = 2.0 * next[i] - prev[i];
          accumulate(next, w[static_cast<std::size_t>(k)]);
          prev = std::move(curr);
          curr = std::move(next);
        }
      }
      break;
    }
    case PolyBasisKind::bernstein: {
      const double scale = std::pow(2.0, -degree);
      double choose = 1.0;
      for (int k = 0; k <= degree; ++k) {
        std::vector<double> vec(x.begin(), x.end());
        for (int i = 0; i < k; ++i) vec = apply_laplacian(p, vec);
        for (int i = 0; i < degree - k; ++i) {
          const std::vector<double> lv = apply_laplacian(p, vec);
          for (std::size_t j = 0; j < n; ++j) vec[j] = 2.0 * vec[j] - lv[j];
        }
        accumulate(vec, w[static_cast<std::size_t>(k)] * scale * choose);
        choose = choose * static_cast<double>(degree - k) / static_cast<double>(k + 1);
      }
      break;
    }
    case PolyBasisKind::jacobi: {
      const double a = coeffs.jacobi_a, b = coeffs.jacobi_b;
      std::vector<double> prev(x.begin(), x.end());
      accumulate(prev, w[0]);
      if (degree >= 1) {
        std::vector<double> curr = p.apply(prev);
        for (std::size_t i = 0; i < n; ++i)
          curr[i] = 0.5 * (a - b) * prev[i] + 0.5 * (a + b + 2.0) * curr[i];
        accumulate(curr, w[1]);
        for (int k = 2; k <= degree; ++k) {
          const double kk = k;
          const double denom = 2.0 * kk * (kk + a + b) * (2.0 * kk + a + b - 2.0);
          const double pre = 2.0 * kk + a + b - 1.0;
          const double x_coef = pre * (2.0 * kk + a + b) * (2.0 * kk + a + b - 2.0) / denom;
          const double const_coef = pre * (a * a - b * b) / denom;
          const double drop = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * (2.0 * kk + a + b) / denom;
          std::vector<double> next = p.apply(curr);
          for (std::size_t i = 0; i < n; ++i)
            next[i] = x_coef * next[i] + const_coef * curr[i] - drop * prev[i];
          accumulate(next, w[static_cast<std::size_t>(k)]);
          prev = std::move(curr);
          curr = std::move(next);
        }
      }
      break;
    }
  }
  return out;
}

// Theta = Phi^T w applied to powers of the basis's lambda-side matrix
// (the Laplacian for Bernstein/Jacobi, the propagation matrix otherwise).
std::vector<double> filter_by_monomial_conversion(const PolyCoeffMatrix& coeffs,
                                                  const TauPropagator& p,
                                                  std::span<const double> w,
                                                  std::span<const double> x) {
  const std::vector<double> theta = basis_to_monomial(coeffs, w);
  const bool lambda_side =
      coeffs.kind == PolyBasisKind::bernstein || coeffs.kind == PolyBasisKind::jacobi;
  std::vector<double> out(x.size(), 0.0);
  std::vector<double> power(x.begin(), x.end());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (k > 0) power = lambda_side ? apply_laplacian(p, power) : p.apply(power);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += theta[k] * power[i];
  }
  return out;
}

}  // namespace

std::string theorem_report_to_json(const TheoremReport& report) {
  nlohmann::json j;
  j["theorem"] = report.theorem;
  j["graphs_tested"] = report.graphs_tested;
  j["violations"] = report.violations;
  j["max_residual"] = report.max_residual;
  j["passed"] = report.passed;
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j.dump();
}

TheoremReport run_monotonicity_suite(const VerifyOptions& opt) {
  TheoremReport report;
  report.theorem = "spectrum-monotonicity";
  Rng rng(Rng::derive(opt.seed, 0x01));
  for (int g = 0; g < opt.graphs; ++g) {
    const Graph graph = sample_graph(rng, opt.max_nodes);
    const MonotonicityReport result = check_spectrum_monotonicity(graph, opt.tau_grid);
    ++report.graphs_tested;
    report.max_residual = std::max(report.max_residual, result.max_residual);
    if (!result.passed) {
      report.passed = false;
      for (const auto& v : result.violations) {
        std::ostringstream msg;
        msg << "graph " << g << ": " << v.relation << " failed at i=" << v.eigen_index
            << " tau_a=" << v.tau_a << " tau_b=" << v.tau_b << " (" << v.value_a << " vs "
            << v.value_b << ")";
        report.violations.push_back(msg.str());
      }
    }
  }
  return report;
}

TheoremReport run_convergence_suite(const VerifyOptions& opt) {
  TheoremReport report;
  report.theorem = "mixing-convergence";
  Rng rng(Rng::derive(opt.seed, 0x02));
  for (int g = 0; g < opt.graphs; ++g) {
    const Graph graph = sample_graph(rng, opt.max_nodes);
    ++report.graphs_tested;
    for (double eps : opt.eps_values) {
      const MixingBound bound = mixing_bound(graph, 1.0, eps);
      const ConvergenceReport conv = verify_convergence(graph, 1.0, bound.hops, eps);
      report.max_residual =
          std::max(report.max_residual, conv.max_relative_distance - eps);
      if (!conv.passed) {
        report.passed = false;
        std::ostringstream msg;
        msg << "graph " << g << ": distance " << conv.max_relative_distance << " > eps " << eps
            << " at K=" << bound.hops << " (lambda*=" << bound.lambda_star << ")";
        report.violations.push_back(msg.str());
      }
    }
  }
  return report;
}

TheoremReport run_information_loss_suite(const VerifyOptions& opt) {
  TheoremReport report;
  report.theorem = "information-loss";
  Rng rng(Rng::derive(opt.seed, 0x03));
  for (int trial = 0; trial < opt.information_loss_trials; ++trial) {
    const Graph graph = sample_graph(rng, opt.max_nodes);
    const double tau = 0.3 + 0.7 * rng.uniform();  // spectrum stays in (-1,1]
    const TauPropagator p(graph, tau);
    const std::vector<double> x = unit_signal(graph.num_nodes(), rng);
    ++report.graphs_tested;

    int grade = estimate_grade(p, x, static_cast<int>(graph.num_nodes()));
    grade = std::min<int>(grade, static_cast<int>(graph.num_nodes()));
    const int hops = 1 + static_cast<int>(rng.integer(static_cast<std::uint64_t>(grade)));

    FeatureMatrix signal(graph.num_nodes(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) signal(i, 0) = x[i];
    const KrylovBasis basis = build_krylov_basis(p, signal, grade - 1);
    const InformationLossReport loss = information_loss(basis, grade, hops);
    report.max_residual = std::max(report.max_residual, loss.loss - loss.bound);
    if (!loss.passed) {
      report.passed = false;
      std::ostringstream msg;
      msg << "trial " << trial << ": loss " << loss.loss << " > bound " << loss.bound
          << " (t=" << grade << ", K=" << hops << ", tau=" << tau << ")";
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

TheoremReport run_basis_unification_suite(const VerifyOptions& opt) {
  TheoremReport report;
  report.theorem = "basis-unification";
  Rng rng(Rng::derive(opt.seed, 0x04));
  const int degree = opt.unification_degree;
  const std::vector<PolyCoeffMatrix> bases = {chebyshev_coeffs(degree),
                                              bernstein_coeffs(degree),
                                              jacobi_coeffs(degree, 0.0, 0.0)};
  constexpr double kTol = 1e-8;
  for (const auto& coeffs : bases) {
    for (int draw = 0; draw < opt.weight_draws; ++draw) {
      const Graph graph = sample_graph(rng, opt.max_nodes);
      const double tau = 0.4 + 0.6 * rng.uniform();
      const TauPropagator p(graph, tau);
      const std::vector<double> x = unit_signal(graph.num_nodes(), rng);
      std::vector<double> w(static_cast<std::size_t>(degree) + 1);
      for (auto& v : w) v = rng.uniform(-1.0, 1.0);
      ++report.graphs_tested;

      const std::vector<double> filtered = filter_by_recurrence(coeffs, p, w, x);
      const std::vector<double> converted = filter_by_monomial_conversion(coeffs, p, w, x);
      double conv_diff = 0.0;
      for (std::size_t i = 0; i < filtered.size(); ++i)
        conv_diff = std::max(conv_diff, std::abs(filtered[i] - converted[i]));

      // Monomial Krylov span of the propagation matrix.
      Matrix krylov(graph.num_nodes(), static_cast<std::size_t>(degree) + 1);
      std::vector<double> power(x.begin(), x.end());
      for (int k = 0; k <= degree; ++k) {
        if (k > 0) power = p.apply(power);
        for (std::size_t i = 0; i < power.size(); ++i)
          krylov(i, static_cast<std::size_t>(k)) = power[i];
      }
      const Matrix span = orthonormalize_columns(krylov);
      const double residual = projection_residual(span, filtered);

      report.max_residual = std::max({report.max_residual, conv_diff, residual});
      if (conv_diff > kTol || residual > kTol) {
        report.passed = false;
        std::ostringstream msg;
        msg << poly_basis_name(coeffs.kind) << " draw " << draw << ": conversion diff "
            << conv_diff << ", span residual " << residual;
        report.violations.push_back(msg.str());
      }
    }
  }
  return report;
}

TheoremReport run_merge_identity_suite(const VerifyOptions& opt) {
  TheoremReport report;
  report.theorem = "merge-identity";
  Rng rng(Rng::derive(opt.seed, 0x05));
  constexpr double kTol = 1e-10;
  for (int trial = 0; trial < 2 * opt.merge_seeds; ++trial) {
    const Graph graph = sample_graph(rng, opt.max_nodes);
    const std::size_t dim = 2 + rng.integer(3);
    const FeatureMatrix x = random_features(graph.num_nodes(), dim, rng.raw());
    const int hops = 3 + static_cast<int>(rng.integer(4));
    const std::size_t r = 2 + static_cast<std::size_t>(trial % 2);  // both r=2 and r=3 per seed
    std::vector<double> taus;
    for (std::size_t i = 0; i < r; ++i) taus.push_back(0.3 + 0.9 * rng.uniform());
    ++report.graphs_tested;

    const KrylovBasis merged = build_merged_basis(graph, taus, x, hops);

    // Explicit route: the same sum assembled from single-tau bases.
    std::vector<KrylovBasis> singles;
    for (double tau : taus)
      singles.push_back(build_krylov_basis(TauPropagator(graph, tau), x, hops));
    KrylovBasis explicit_sum = singles[0];
    for (std::size_t i = 1; i < singles.size(); ++i)
      for (std::size_t k = 0; k < explicit_sum.blocks.size(); ++k)
        for (std::size_t e = 0; e < explicit_sum.blocks[k].size(); ++e)
          explicit_sum.blocks[k].data()[e] += singles[i].blocks[k].data()[e];
    explicit_sum.taus = taus;
    explicit_sum.merged = merged.merged;

    std::vector<NodeId> nodes(graph.num_nodes());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<NodeId>(i);
    const FilterModel model(hops, dim, 8, 3, Rng::derive(opt.seed, trial));
    const Matrix merged_scores = model.forward(merged, nodes);
    const Matrix explicit_scores = model.forward(explicit_sum, nodes);
    const double forward_diff = max_abs_diff(merged_scores, explicit_scores);

    // Weight-integration identity for the shared trainable weights: filtering
    // each basis separately and summing equals filtering the merged blocks.
    std::vector<double> shared_w(static_cast<std::size_t>(hops) + 1);
    for (auto& v : shared_w) v = rng.uniform(-1.0, 1.0);
    Matrix lhs(graph.num_nodes(), dim);
    for (std::size_t i = 0; i < r; ++i)
      for (int k = 0; k <= hops; ++k) {
        const double scale = shared_w[static_cast<std::size_t>(k)];
        const Matrix& block = singles[i].blocks[static_cast<std::size_t>(k)];
        for (std::size_t e = 0; e < lhs.size(); ++e) lhs.data()[e] += scale * block.data()[e];
      }
    Matrix rhs(graph.num_nodes(), dim);
    for (int k = 0; k <= hops; ++k) {
      const double scale = shared_w[static_cast<std::size_t>(k)];
      const Matrix& block = merged.blocks[static_cast<std::size_t>(k)];
      for (std::size_t e = 0; e < rhs.size(); ++e) rhs.data()[e] += scale * block.data()[e];
    }
    const double weight_diff = max_abs_diff(lhs, rhs);

    report.max_residual = std::max({report.max_residual, forward_diff, weight_diff});
    if (forward_diff > kTol || weight_diff > kTol) {
      report.passed = false;
      std::ostringstream msg;
      msg << "trial " << trial << ": forward diff " << forward_diff << ", weight identity diff "
          << weight_diff << " (r=" << r << ")";
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

TheoremReport run_homophily_quotient_probe(const VerifyOptions& opt) {
  TheoremReport report;
  report.theorem = "homophily-rayleigh-quotient";
  Rng rng(Rng::derive(opt.seed, 0x06));
  SyntheticSpec spec;
  spec.nodes = std::max<std::size_t>(opt.max_nodes, 30);
  spec.num_classes = 2;
  spec.target_homophily = 0.2 + 0.6 * rng.uniform();
  spec.mean_degree = 6.0;
  spec.feature_dim = 2;
  spec.seed = rng.raw();
  const SyntheticDataset data = generate(spec);
  const Graph& g = data.graph;
  report.graphs_tested = 1;

  std::vector<double> y(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) y[u] = g.label(u) == 0 ? 1.0 : -1.0;
  double edge_sum = 0.0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.neighbors(u))
      if (u < v) edge_sum += (y[u] - y[v]) * (y[u] - y[v]);
  double degree_sum = 0.0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) degree_sum += g.degree(u) * y[u] * y[u];

  const double h = homophily_ratio(g);
  report.notes["measured_quotient"] = edge_sum / degree_sum;
  report.notes["four_times_one_minus_h"] = 4.0 * (1.0 - h);
  report.notes["two_times_one_minus_h"] = 2.0 * (1.0 - h);
  report.notes["edge_sum"] = edge_sum;
  report.notes["expected_edge_sum_4(1-h)m"] = 4.0 * (1.0 - h) * static_cast<double>(g.num_edges());
  return report;
}

std::vector<TheoremReport> run_all_suites(const VerifyOptions& opt) {
  return {run_monotonicity_suite(opt),    run_convergence_suite(opt),
          run_information_loss_suite(opt), run_basis_unification_suite(opt),
          run_merge_identity_suite(opt),   run_homophily_quotient_probe(opt)};
}

}  // namespace adaptkry
