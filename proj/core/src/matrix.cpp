#include "adaptkry/matrix.hpp"

#include <cassert>
#include <cmath>
#include <cstring>

namespace adaptkry {

namespace {

// Rows are processed in blocks of kRowBlock so each streamed row of the
// right-hand operand is reused across the block instead of re-read per row.
// The output tile (kRowBlock x cols) must stay cache-resident.
constexpr std::size_t kRowBlock = 64;

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
  Matrix c(n, m);
  const auto blocks = static_cast<long long>((n + kRowBlock - 1) / kRowBlock);
#pragma omp parallel for schedule(static)
  for (long long bi = 0; bi < blocks; ++bi) {
    const std::size_t i0 = static_cast<std::size_t>(bi) * kRowBlock;
    const std::size_t i1 = std::min(i0 + kRowBlock, n);
    for (std::size_t k = 0; k < k_dim; ++k) {
      const double* bk = b.row(k);
      for (std::size_t i = i0; i < i1; ++i) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        double* ci = c.row(i);
        for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
      }
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows());
  const std::size_t n = a.cols(), k_dim = a.rows(), m = b.cols();
  Matrix c(n, m);
  const auto blocks = static_cast<long long>((n + kRowBlock - 1) / kRowBlock);
#pragma omp parallel for schedule(static)
  for (long long bi = 0; bi < blocks; ++bi) {
    const std::size_t i0 = static_cast<std::size_t>(bi) * kRowBlock;
    const std::size_t i1 = std::min(i0 + kRowBlock, n);
    for (std::size_t k = 0; k < k_dim; ++k) {
      const double* ak = a.row(k);
      const double* bk = b.row(k);
      for (std::size_t i = i0; i < i1; ++i) {
        const double aki = ak[i];
        if (aki == 0.0) continue;
        double* ci = c.row(i);
        for (std::size_t j = 0; j < m; ++j) ci[j] += aki * bk[j];
      }
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  // The broadcast-FMA kernel beats a latency-bound dot-product loop; the
  // transpose costs O(k*m) against the O(n*k*m) product and keeps the
  // per-element accumulation order (ascending k) unchanged.
  assert(a.cols() == b.cols());
  return matmul(a, transpose(b));
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  assert(a.cols() == x.size());
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += ai[j] * x[j];
    y[i] = acc;
  }
  return y;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * a.data()[i];
  return std::sqrt(acc);
}

double max_abs(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a.data()[i]));
  return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
  return best;
}

Matrix orthonormalize_columns(const Matrix& a, double drop_tol) {
  const std::size_t n = a.rows();
  std::vector<std::vector<double>> kept;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a(i, j);
    const double original = norm2(v);
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) {
        const double c = dot(v, q);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * q[i];
      }
    }
    const double remaining = norm2(v);
    if (remaining <= drop_tol * original) continue;
    for (auto& x : v) x /= remaining;
    kept.push_back(std::move(v));
  }
  Matrix q(n, kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) q(i, j) = kept[j][i];
  return q;
}

double projection_residual(const Matrix& q, std::span<const double> v) {
  assert(q.rows() == v.size());
  std::vector<double> r(v.begin(), v.end());
  for (std::size_t j = 0; j < q.cols(); ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) c += q(i, j) * v[i];
    for (std::size_t i = 0; i < q.rows(); ++i) r[i] -= c * q(i, j);
  }
  return norm2(r);
}

}  // namespace adaptkry
