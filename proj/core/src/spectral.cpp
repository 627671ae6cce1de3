#include "adaptkry/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adaptkry/error.hpp"

namespace adaptkry {

namespace {

double hypot2(double x, double y) { return std::sqrt(x * x + y * y); }

// Householder reduction of a symmetric matrix (stored in v) to tridiagonal
// form; d receives the diagonal, e the subdiagonal, v the accumulated
// orthogonal transform. Classic tred2.
void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  // Accumulate transformations.
  for (std::size_t i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), rotations applied to v.
// Classic tql2.
void ql_iterate(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::pow(2.0, -52.0);
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iterations = 0;
      do {
        if (++iterations > 50) throw numeric_error("QL iteration failed to converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = hypot2(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m - 1; i + 1 > l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = hypot2(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  // Ascending order, eigenvectors following.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    double p = d[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    }
    if (k != i) {
      d[k] = d[i];
      d[i] = p;
      for (std::size_t j = 0; j < n; ++j) std::swap(v(j, i), v(j, k));
    }
  }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw validation_error("matrix is not square");
  const std::size_t n = a.rows();
  SymmetricEigen result;
  result.eigenvalues.assign(n, 0.0);
  if (n == 0) return result;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(a(i, j))) throw validation_error("non-finite matrix entry");
  result.eigenvectors = a;
  if (n == 1) {
    result.eigenvalues[0] = a(0, 0);
    result.eigenvectors(0, 0) = 1.0;
    return result;
  }
  std::vector<double> e(n, 0.0);
  tridiagonalize(result.eigenvectors, result.eigenvalues, e);
  ql_iterate(result.eigenvectors, result.eigenvalues, e);
  return result;
}

SpectrumReport eig_oracle(const Graph& g, double tau) {
  if (g.num_nodes() > kOracleNodeBudget)
    throw validation_error("graph with " + std::to_string(g.num_nodes()) +
                           " nodes exceeds the dense oracle budget of " +
                           std::to_string(kOracleNodeBudget));
  const TauPropagator p(g, tau);
  const Matrix laplacian = p.dense_laplacian();
  SymmetricEigen eig = symmetric_eigen(laplacian);

  SpectrumReport report;
  report.tau = tau;
  report.eigenvalues = std::move(eig.eigenvalues);
  report.eigenvectors = std::move(eig.eigenvectors);

  const std::size_t n = g.num_nodes();
  // Eigenvalues of P are 1 - lambda_i(L); the P-ascending order reverses the
  // L-ascending order. lambda_star needs -lambda_1(P) and lambda_{n-1}(P).
  const double p_min = 1.0 - report.eigenvalues[n - 1];
  const double p_second = n >= 2 ? 1.0 - report.eigenvalues[1] : 1.0 - report.eigenvalues[0];
  report.lambda_star = std::max(-p_min, p_second);

  // Reconstruction residual ||U Lam U' - L||_F.
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double entry = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        entry += report.eigenvectors(i, k) * report.eigenvalues[k] * report.eigenvectors(j, k);
      const double diff = entry - laplacian(i, j);
      acc += diff * diff;
    }
  }
  report.reconstruction_error = std::sqrt(acc);
  if (report.reconstruction_error > 1e-8 * static_cast<double>(n))
    throw numeric_error("eigendecomposition reconstruction error " +
                        std::to_string(report.reconstruction_error) + " exceeds budget");
  return report;
}

MonotonicityReport check_spectrum_monotonicity(const Graph& g, std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw validation_error("tau grid is empty");
  for (std::size_t i = 0; i + 1 < tau_grid.size(); ++i)
    if (!(tau_grid[i] < tau_grid[i + 1]))
      throw validation_error("tau grid must be strictly ascending");
  if (!(tau_grid.front() > 0.0)) throw validation_error("tau grid must be positive");

  constexpr double kTol = 1e-8;
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<double>> spectra;
  spectra.reserve(tau_grid.size());
  for (double tau : tau_grid) spectra.push_back(eig_oracle(g, tau).eigenvalues);
  const std::vector<double> baseline = eig_oracle(g, 1.0).eigenvalues;

  MonotonicityReport report;
  auto record = [&](std::size_t i, double tau_a, double tau_b, double va, double vb,
                    const char* relation, double slack) {
    report.max_residual = std::max(report.max_residual, slack);
    if (slack > kTol) {
      report.passed = false;
      report.violations.push_back({i, tau_a, tau_b, va, vb, relation});
    }
  };

  for (std::size_t a = 0; a + 1 < tau_grid.size(); ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      const double va = spectra[a][i];
      const double vb = spectra[a + 1][i];
      record(i, tau_grid[a], tau_grid[a + 1], va, vb, "lambda_i(tau_a) <= lambda_i(tau_b)",
             va - vb);
    }
  }
  for (std::size_t t = 0; t < tau_grid.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = spectra[t][i];
      if (tau_grid[t] <= 1.0) {
        record(i, tau_grid[t], 1.0, v, baseline[i], "lambda_i(tau) <= lambda_i", v - baseline[i]);
      } else {
        record(i, tau_grid[t], 1.0, v, baseline[i], "lambda_i(tau) >= lambda_i", baseline[i] - v);
      }
    }
  }
  return report;
}

MixingBound mixing_bound(const Graph& g, double tau, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw validation_error("eps must lie in (0,1)");
  g.validate_for_spectral();
  const SpectrumReport spectrum = eig_oracle(g, tau);
  MixingBound bound;
  bound.lambda_star = spectrum.lambda_star;
  bound.d_min = g.min_degree();
  if (!(bound.lambda_star < 1.0)) {
    const std::size_t n = g.num_nodes();
    const double p_min = 1.0 - spectrum.eigenvalues[n - 1];
    const double p_second = 1.0 - spectrum.eigenvalues[1];
    std::ostringstream msg;
    msg << "mixing bound undefined: lambda_star = " << bound.lambda_star
        << " >= 1 (offending eigenvalue "
        << (-p_min >= p_second ? p_min : p_second) << " of the propagation matrix)";
    throw numeric_error(msg.str());
  }
  if (bound.lambda_star <= 0.0) {
    // Complete-graph-like edge case: P^1 already stationary.
    bound.hops = 0;
    bound.hops_tau_degrees = 0;
  }

  const double volume = 2.0 * static_cast<double>(g.num_edges());
  auto bound_from = [&](double dmin, double vol) {
    const double numer = std::log(eps * dmin / vol);
    const double raw = numer / std::log(bound.lambda_star);
    const auto k = static_cast<int>(std::ceil(raw));
    return std::max(k, 0);
  };
  if (bound.lambda_star > 0.0) bound.hops = bound_from(bound.d_min, volume);

  bound.d_min_tau = tau * bound.d_min + (1.0 - tau);
  bound.volume_tau = 0.0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    bound.volume_tau += tau * g.degree(u) + (1.0 - tau);
  if (bound.lambda_star > 0.0) bound.hops_tau_degrees = bound_from(bound.d_min_tau, bound.volume_tau);
  return bound;
}

ConvergenceReport verify_convergence(const Graph& g, double tau, int hops, double eps) {
  if (hops < 0) throw validation_error("hops must be >= 0");
  g.validate_for_spectral();

  const TauPropagator propagator(g, tau);
  const std::size_t n = g.num_nodes();

  // Stationary matrix.
  Matrix stationary(n, n);
  if (tau == 1.0) {
    const double volume = 2.0 * static_cast<double>(g.num_edges());
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        stationary(u, v) = std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(u))) *
                                     static_cast<double>(g.degree(static_cast<NodeId>(v)))) /
                           volume;
  } else {
    const SpectrumReport spectrum = eig_oracle(g, tau);
    // Top eigenvector of P = eigenvector of the smallest eigenvalue of L.
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        stationary(u, v) = spectrum.eigenvectors(u, 0) * spectrum.eigenvectors(v, 0);
  }

  // Dense P^K by repeated multiplication; the propagation path is sparse, so
  // this stays an independent route.
  Matrix power = Matrix::identity(n);
  const Matrix dense_p = propagator.dense();
  for (int k = 0; k < hops; ++k) power = matmul(power, dense_p);

  ConvergenceReport report;
  report.hops = hops;
  report.eps = eps;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      const double reference = stationary(u, v);
      if (reference == 0.0) continue;
      const double rel = std::abs(power(u, v) - reference) / std::abs(reference);
      report.max_relative_distance = std::max(report.max_relative_distance, rel);
    }
  }
  report.passed = report.max_relative_distance <= eps;
  return report;
}

InformationLossReport information_loss(const KrylovBasis& basis, int grade_t, int hops) {
  if (grade_t <= 0) throw validation_error("grade must be positive");
  if (hops < 1 || hops > grade_t)
    throw validation_error("hops must lie in [1, grade]");
  if (basis.num_blocks() < static_cast<std::size_t>(grade_t))
    throw validation_error("basis holds " + std::to_string(basis.num_blocks()) +
                           " blocks, need " + std::to_string(grade_t));
  double full = 0.0, truncated = 0.0;
  for (int k = 0; k < grade_t; ++k) {
    const double norm = frobenius_norm(basis.blocks[static_cast<std::size_t>(k)]);
    full += norm * norm;
    if (k < hops) truncated += norm * norm;
  }
  InformationLossReport report;
  if (full == 0.0) throw validation_error("zero basis");
  report.loss = (std::sqrt(full) - std::sqrt(truncated)) / std::sqrt(full);
  report.bound = std::sqrt(static_cast<double>(grade_t - hops) / static_cast<double>(grade_t));
  report.passed = report.loss <= report.bound + 1e-10;
  return report;
}

std::vector<std::pair<double, double>> frequency_response(const PolyCoeffMatrix& coeffs,
                                                          std::span<const double> w,
                                                          int samples) {
  if (samples < 2) throw validation_error("need at least 2 samples");
  std::vector<double> lambdas(static_cast<std::size_t>(samples));
  std::vector<double> args(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double lambda = 2.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    lambdas[static_cast<std::size_t>(i)] = lambda;
    args[static_cast<std::size_t>(i)] = coeffs.argument_from_lambda(lambda);
  }
  const std::vector<double> values = eval_filter_response(coeffs, w, args);
  std::vector<std::pair<double, double>> rows(static_cast<std::size_t>(samples));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {lambdas[i], values[i]};
  return rows;
}

}  // namespace adaptkry
