#pragma once

// Independent reference routines for oracle-style checks. These deliberately
// reimplement dense linear algebra with naive loops so they share no code
// path with the library internals they verify.

#include <cmath>
#include <utility>
#include <vector>

#include "adaptkry/graph.hpp"
#include "adaptkry/matrix.hpp"

namespace oracles {

inline adaptkry::Matrix dense_matmul(const adaptkry::Matrix& a, const adaptkry::Matrix& b) {
  adaptkry::Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

// P_tau assembled entrywise from the defining formula.
inline adaptkry::Matrix dense_tau_propagator(const adaptkry::Graph& g, double tau) {
  const std::size_t n = g.num_nodes();
  adaptkry::Matrix p(n, n);
  for (std::size_t u = 0; u < n; ++u) {
    const double du = tau * g.degree(static_cast<adaptkry::NodeId>(u)) + 1.0 - tau;
    for (std::size_t v = 0; v < n; ++v) {
      const double dv = tau * g.degree(static_cast<adaptkry::NodeId>(v)) + 1.0 - tau;
      double a_tau = 0.0;
      if (u == v) a_tau = 1.0 - tau;
      else if (g.has_edge(static_cast<adaptkry::NodeId>(u), static_cast<adaptkry::NodeId>(v)))
        a_tau = tau;
      p(u, v) = a_tau / std::sqrt(du * dv);
    }
  }
  return p;
}

// P^k X by repeated dense multiplication.
inline adaptkry::Matrix dense_power_apply(const adaptkry::Matrix& p, const adaptkry::Matrix& x,
                                          int k) {
  adaptkry::Matrix result = x;
  for (int i = 0; i < k; ++i) result = dense_matmul(p, result);
  return result;
}

// Tiny fixed graphs used across the suites.
inline adaptkry::Graph path2(std::vector<int> labels = {0, 0}) {
  return adaptkry::Graph(2, {{0, 1}}, std::move(labels), 2);
}

inline adaptkry::Graph triangle() { return adaptkry::Graph(3, {{0, 1}, {1, 2}, {0, 2}}, {}, 1); }

inline adaptkry::Graph star4() {
  return adaptkry::Graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {}, 1);
}

inline adaptkry::Matrix column_matrix(const std::vector<double>& v) {
  adaptkry::Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

}  // namespace oracles
