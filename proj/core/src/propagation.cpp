#include "adaptkry/propagation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "adaptkry/error.hpp"
#include "adaptkry/matrix.hpp"
#include "container.hpp"

namespace adaptkry {

TauPropagator::TauPropagator(const Graph& g, double tau) : tau_(tau), n_(g.num_nodes()) {
  if (!(tau > 0.0)) throw validation_error("tau must be positive, got " + std::to_string(tau));
  inv_sqrt_dtau_.resize(n_);
  for (NodeId u = 0; u < n_; ++u) {
    const double d_tau = tau * g.degree(u) + (1.0 - tau);
    if (!(d_tau > 0.0)) {
      throw validation_error("nonpositive normalization term tau*d + 1 - tau = " +
                             std::to_string(d_tau) + " at node " + std::to_string(u) +
                             " (degree " + std::to_string(g.degree(u)) + ", tau " +
                             std::to_string(tau) + ")");
    }
    inv_sqrt_dtau_[u] = 1.0 / std::sqrt(d_tau);
  }

  offsets_.assign(n_ + 1, 0);
  for (NodeId u = 0; u < n_; ++u) offsets_[u + 1] = offsets_[u] + g.degree(u) + 1;
  columns_.resize(offsets_[n_]);
  values_.resize(offsets_[n_]);
  const double self = 1.0 - tau;
  for (NodeId u = 0; u < n_; ++u) {
    std::size_t at = offsets_[u];
    bool placed_diag = false;
    for (NodeId v : g.neighbors(u)) {
      if (!placed_diag && v > u) {
        columns_[at] = u;
        values_[at] = self * inv_sqrt_dtau_[u] * inv_sqrt_dtau_[u];
        ++at;
        placed_diag = true;
      }
      columns_[at] = v;
      values_[at] = tau * inv_sqrt_dtau_[u] * inv_sqrt_dtau_[v];
      ++at;
    }
    if (!placed_diag) {
      columns_[at] = u;
      values_[at] = self * inv_sqrt_dtau_[u] * inv_sqrt_dtau_[u];
      ++at;
    }
    assert(at == offsets_[u + 1]);
  }
}

TauPropagator build_propagator(const Graph& g, double tau) { return TauPropagator(g, tau); }

void TauPropagator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_)
    throw validation_error("propagator expects vectors of length " + std::to_string(n_));
  for (std::size_t u = 0; u < n_; ++u) {
    double acc = 0.0;
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e)
      acc += values_[e] * x[columns_[e]];
    y[u] = acc;
  }
}

std::vector<double> TauPropagator::apply(std::span<const double> x) const {
  std::vector<double> y(n_);
  apply(x, y);
  return y;
}

Matrix TauPropagator::apply(const Matrix& x) const {
  if (x.rows() != n_)
    throw validation_error("block has " + std::to_string(x.rows()) + " rows, graph has " +
                           std::to_string(n_) + " nodes");
  const std::size_t d = x.cols();
  Matrix y(n_, d);
#pragma omp parallel for schedule(static)
  for (long long uu = 0; uu < static_cast<long long>(n_); ++uu) {
    const auto u = static_cast<std::size_t>(uu);
    double* out = y.row(u);
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      const double w = values_[e];
      const double* in = x.row(columns_[e]);
      for (std::size_t j = 0; j < d; ++j) out[j] += w * in[j];
    }
  }
  return y;
}

Matrix TauPropagator::dense() const {
  Matrix p(n_, n_);
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) p(u, columns_[e]) = values_[e];
  return p;
}

Matrix TauPropagator::dense_laplacian() const {
  Matrix l = dense();
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) l(i, j) = (i == j ? 1.0 : 0.0) - l(i, j);
  return l;
}

KrylovBasis build_krylov_basis(const TauPropagator& p, const FeatureMatrix& x, int hops) {
  if (hops < 0) throw validation_error("hops must be >= 0");
  if (x.rows() != p.num_nodes())
    throw validation_error("feature matrix has " + std::to_string(x.rows()) +
                           " rows, graph has " + std::to_string(p.num_nodes()) + " nodes");
  KrylovBasis basis;
  basis.hops = hops;
  basis.taus = {p.tau()};
  basis.merged = false;
  basis.blocks.reserve(static_cast<std::size_t>(hops) + 1);
  basis.blocks.push_back(x);
  for (int k = 1; k <= hops; ++k) basis.blocks.push_back(p.apply(basis.blocks.back()));
  return basis;
}

KrylovBasis build_merged_basis(const Graph& g, std::span<const double> taus,
                               const FeatureMatrix& x, int hops) {
  if (taus.empty()) throw validation_error("tau set must be nonempty");
  KrylovBasis merged;
  merged.hops = hops;
  merged.taus.assign(taus.begin(), taus.end());
  merged.merged = taus.size() > 1;
  bool first = true;
  for (double tau : taus) {
    const TauPropagator p(g, tau);
    KrylovBasis single = build_krylov_basis(p, x, hops);
    if (first) {
      merged.blocks = std::move(single.blocks);
      first = false;
    } else {
      for (std::size_t k = 0; k < merged.blocks.size(); ++k) {
        double* dst = merged.blocks[k].data();
        const double* src = single.blocks[k].data();
        for (std::size_t i = 0; i < merged.blocks[k].size(); ++i) dst[i] += src[i];
      }
    }
  }
  return merged;
}

void save_basis(const KrylovBasis& basis, const std::filesystem::path& path) {
  nlohmann::json header;
  header["n"] = basis.num_nodes();
  header["d"] = basis.dim();
  header["K"] = basis.hops;
  header["taus"] = basis.taus;
  header["merged"] = basis.merged;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  detail::write_json_header(out, header);
  for (const Matrix& block : basis.blocks) detail::write_f64_block(out, block);
  if (!out) throw io_error("short write to " + path.string());
}

KrylovBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  const nlohmann::json header = detail::read_json_header(in, path.string());
  KrylovBasis basis;
  try {
    basis.hops = header.at("K").get<int>();
    basis.taus = header.at("taus").get<std::vector<double>>();
    basis.merged = header.at("merged").get<bool>();
    const auto n = header.at("n").get<std::size_t>();
    const auto d = header.at("d").get<std::size_t>();
    for (int k = 0; k <= basis.hops; ++k)
      basis.blocks.push_back(detail::read_f64_block(in, n, d, path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed basis header in " + path.string() + ": " + e.what());
  }
  return basis;
}

LanczosResult orthogonalize_basis(const TauPropagator& p, const KrylovBasis& basis,
                                  std::size_t column) {
  if (basis.merged || basis.taus.size() != 1)
    throw validation_error("orthogonalization requires a single-tau basis");
  if (basis.taus[0] != p.tau())
    throw validation_error("propagator tau does not match the basis");
  if (column >= basis.dim())
    throw validation_error("column " + std::to_string(column) + " out of range");

  const std::size_t n = basis.num_nodes();
  std::vector<double> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = basis.blocks[0](i, column);
  const double start_norm = norm2(start);
  if (start_norm == 0.0) throw validation_error("zero start vector");

  constexpr double kBreakdownTol = 1e-12;
  LanczosResult result;
  std::vector<double> q0(n);
  for (std::size_t i = 0; i < n; ++i) q0[i] = start[i] / start_norm;
  result.vectors.push_back(std::move(q0));
  result.beta.push_back(0.0);

  for (int j = 0; j <= basis.hops; ++j) {
    const auto& qj = result.vectors.back();
    std::vector<double> r = p.apply(qj);
    const double alpha_j = dot(r, qj);
    result.alpha.push_back(alpha_j);
    if (j == basis.hops) break;  // K+1 vectors requested at most
    for (std::size_t i = 0; i < n; ++i) r[i] -= alpha_j * qj[i];
    if (result.vectors.size() > 1) {
      const auto& prev = result.vectors[result.vectors.size() - 2];
      const double beta_j = result.beta.back();
      for (std::size_t i = 0; i < n; ++i) r[i] -= beta_j * prev[i];
    }
    // One reorthogonalization pass keeps the Gram matrix at roundoff level.
    for (const auto& q : result.vectors) {
      const double c = dot(r, q);
      for (std::size_t i = 0; i < n; ++i) r[i] -= c * q[i];
    }
    const double beta_next = norm2(r);
    if (beta_next < kBreakdownTol) {
      result.breakdown = true;
      break;
    }
    for (auto& v : r) v /= beta_next;
    result.beta.push_back(beta_next);
    result.vectors.push_back(std::move(r));
  }
  result.dimension = static_cast<int>(result.vectors.size());
  return result;
}

int estimate_grade(const TauPropagator& p, std::span<const double> x, int max_hops) {
  if (max_hops < 1) throw validation_error("max_hops must be >= 1");
  if (x.size() != p.num_nodes())
    throw validation_error("signal length does not match graph size");
  const double x_norm = norm2(x);
  if (x_norm == 0.0) throw validation_error("zero signal");

  constexpr double kDependenceTol = 1e-10;
  const std::size_t n = x.size();
  std::vector<std::vector<double>> ortho;  // orthonormal basis of {x, Px, ...}
  {
    std::vector<double> q(x.begin(), x.end());
    for (auto& v : q) v /= x_norm;
    ortho.push_back(std::move(q));
  }
  std::vector<double> power(x.begin(), x.end());
  for (int t = 1; t <= max_hops; ++t) {
    power = p.apply(power);  // P^t x
    const double power_norm = norm2(power);
    if (power_norm == 0.0) return t;
    std::vector<double> residual = power;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : ortho) {
        const double c = dot(residual, q);
        for (std::size_t i = 0; i < n; ++i) residual[i] -= c * q[i];
      }
    }
    const double res_norm = norm2(residual);
    if (res_norm <= kDependenceTol * power_norm) return t;
    for (auto& v : residual) v /= res_norm;
    ortho.push_back(std::move(residual));
  }
  return max_hops + 1;
}

}  // namespace adaptkry
