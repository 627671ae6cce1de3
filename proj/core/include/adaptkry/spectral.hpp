#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaptkry/graph.hpp"
#include "adaptkry/matrix.hpp"
#include "adaptkry/polybases.hpp"
#include "adaptkry/propagation.hpp"

namespace adaptkry {

// Full eigendecomposition of a symmetric matrix: Householder reduction to
// tridiagonal form followed by implicit-shift QL, eigenvalues ascending,
// eigenvector j in column j.
struct SymmetricEigen {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

SymmetricEigen symmetric_eigen(const Matrix& a);

// Ground-truth spectrum of L_tau = I - P_tau at desk scale.
struct SpectrumReport {
  double tau = 1.0;
  std::vector<double> eigenvalues;  // of L_tau, ascending
  Matrix eigenvectors;              // columns, same order
  double lambda_star = 0.0;         // max(-lambda_min(P), second largest lambda(P))
  double reconstruction_error = 0.0;  // ||U Lam U' - L_tau||_F
};

inline constexpr std::size_t kOracleNodeBudget = 2000;

SpectrumReport eig_oracle(const Graph& g, double tau);

struct MonotonicityViolation {
  std::size_t eigen_index = 0;
  double tau_a = 0.0, tau_b = 0.0;
  double value_a = 0.0, value_b = 0.0;
  std::string relation;  // which inequality failed
};

struct MonotonicityReport {
  bool passed = true;
  std::vector<MonotonicityViolation> violations;
  double max_residual = 0.0;  // worst signed slack over all comparisons
};

// lambda_i(tau) nondecreasing in tau per index, below the tau=1 spectrum for
// tau <= 1 and above it for tau > 1, all at tolerance 1e-8.
MonotonicityReport check_spectrum_monotonicity(const Graph& g, std::span<const double> tau_grid);

struct MixingBound {
  int hops = 0;               // ceil(ln(eps*d_min/2m)/ln(lambda_star)), clamped >= 0
  double lambda_star = 0.0;
  std::uint32_t d_min = 0;
  // Variant with tau-adjusted degrees tau*d_u + 1 - tau in place of d_min/2m.
  int hops_tau_degrees = 0;
  double d_min_tau = 0.0;
  double volume_tau = 0.0;  // sum_u (tau*d_u + 1 - tau)
};

MixingBound mixing_bound(const Graph& g, double tau, double eps);

struct ConvergenceReport {
  int hops = 0;
  double eps = 0.0;
  double max_relative_distance = 0.0;
  bool passed = false;
};

// Max relative pointwise distance between P^K and the stationary matrix.
// tau = 1 uses the sqrt(d_u d_v)/2m closed form; other tau values compare
// against the oracle's top eigenvector outer product.
ConvergenceReport verify_convergence(const Graph& g, double tau, int hops, double eps);

struct InformationLossReport {
  double loss = 0.0;   // (||B*||_F - ||B||_F) / ||B*||_F
  double bound = 0.0;  // sqrt((t - K)/t)
  bool passed = false;
};

// B* stacks the first grade_t blocks of the basis, B the first hops blocks.
InformationLossReport information_loss(const KrylovBasis& basis, int grade_t, int hops);

// (lambda, g_w(lambda)) samples on a uniform [0, 2] grid; the grid is mapped
// into each basis's argument variable before Horner evaluation.
std::vector<std::pair<double, double>> frequency_response(const PolyCoeffMatrix& coeffs,
                                                          std::span<const double> w,
                                                          int samples);

}  // namespace adaptkry
