#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "adaptkry/graph.hpp"
#include "adaptkry/matrix.hpp"

namespace adaptkry {

// Tunable propagation matrix P = D_tau^{-1/2} (tau*A + (1-tau)*I) D_tau^{-1/2}
// with D_tau = tau*D + (1-tau)*I, stored in CSR. The sparsity pattern is the
// adjacency pattern plus the diagonal; at tau = 1 the diagonal entries are 0.
class TauPropagator {
 public:
  TauPropagator() = default;
  TauPropagator(const Graph& g, double tau);

  double tau() const noexcept { return tau_; }
  std::size_t num_nodes() const noexcept { return n_; }

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const NodeId> columns() const noexcept { return columns_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> inv_sqrt_degree() const noexcept { return inv_sqrt_dtau_; }

  // y = P x (single signal).
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  // Y = P X (block of signals, row-major by node).
  Matrix apply(const Matrix& x) const;

  Matrix dense() const;
  // I - P.
  Matrix dense_laplacian() const;

 private:
  double tau_ = 1.0;
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> columns_;
  std::vector<double> values_;
  std::vector<double> inv_sqrt_dtau_;
};

TauPropagator build_propagator(const Graph& g, double tau);

// Stacked propagation blocks F(0)..F(K) with F(0) = X (or r*X when merged over
// r tau values) and F(k) = P F(k-1) per tau, summed across taus when merged.
struct KrylovBasis {
  int hops = 0;                 // K
  std::vector<double> taus;     // tau set used to build the blocks
  bool merged = false;          // blocks hold sums over the tau set
  std::vector<Matrix> blocks;   // hops+1 matrices, each n x d

  std::size_t num_nodes() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  std::size_t dim() const { return blocks.empty() ? 0 : blocks.front().cols(); }
  std::size_t num_blocks() const { return blocks.size(); }
};

KrylovBasis build_krylov_basis(const TauPropagator& p, const FeatureMatrix& x, int hops);

// Block k = sum_i P_{tau_i}^k X. With a single tau this equals
// build_krylov_basis; the summed storage keeps training cost independent
// of the number of bases.
KrylovBasis build_merged_basis(const Graph& g, std::span<const double> taus,
                               const FeatureMatrix& x, int hops);

// Binary container: 8-byte little-endian header length, JSON header
// {n, d, K, taus, merged}, then hops+1 row-major blocks of little-endian
// float64. Round-trips bit-exactly.
void save_basis(const KrylovBasis& basis, const std::filesystem::path& path);
KrylovBasis load_basis(const std::filesystem::path& path);

// Lanczos three-term recurrence on P started from one basis column.
struct LanczosResult {
  std::vector<std::vector<double>> vectors;  // orthonormal q_0..q_{dim-1}
  std::vector<double> alpha;                 // alpha_j = q_j' P q_j
  std::vector<double> beta;                  // beta_j = residual norm before q_j (beta_0 unused)
  bool breakdown = false;
  int dimension = 0;  // achieved dimension; the numerical grade on breakdown
};

// Orthonormalizes span{x, Px, ..., P^K x} for x = column `column` of the
// basis's hop-0 block. Requires a single-tau basis. Breakdown (residual
// norm < 1e-12) truncates the sequence at the numerical grade.
LanczosResult orthogonalize_basis(const TauPropagator& p, const KrylovBasis& basis,
                                  std::size_t column);

// Smallest t <= max_hops at which P^t x becomes linearly dependent on
// {x, ..., P^{t-1} x} (projection residual below 1e-10 relative), or
// max_hops + 1 as an "at least" sentinel.
int estimate_grade(const TauPropagator& p, std::span<const double> x, int max_hops);

}  // namespace adaptkry
