#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaptkry/matrix.hpp"

namespace adaptkry {

enum class PolyBasisKind {
  monomial,   // powers of the propagation matrix (GPR form); Phi = I
  chebyshev,  // T_k in its own argument on [-1, 1]
  bernstein,  // degree-K Bernstein bumps in lambda on [0, 2]
  jacobi,     // P_k^{a,b}(1 - lambda) expanded in lambda on [0, 2]
};

const char* poly_basis_name(PolyBasisKind kind);

// Coefficient matrix Phi: row i holds the monomial coefficients of basis
// polynomial i in the basis's natural argument variable. Theta = Phi^T w
// converts basis weights into monomial weights.
struct PolyCoeffMatrix {
  PolyBasisKind kind = PolyBasisKind::monomial;
  int degree = 0;
  double jacobi_a = 0.0;
  double jacobi_b = 0.0;
  Matrix phi;  // (degree+1) x (degree+1)

  // Natural evaluation interval of the basis argument.
  std::pair<double, double> natural_domain() const;
  // Maps a Laplacian eigenvalue in [0, 2] to the basis argument: monomial
  // uses 1 - lambda (the propagation variable), chebyshev the lambda - 1
  // shift, bernstein and jacobi evaluate in lambda directly.
  double argument_from_lambda(double lambda) const;
};

PolyCoeffMatrix gpr_coeffs(int degree);  // identity Phi
PolyCoeffMatrix chebyshev_coeffs(int degree);
PolyCoeffMatrix bernstein_coeffs(int degree);
PolyCoeffMatrix jacobi_coeffs(int degree, double a, double b);

// Theta = Phi^T w.
std::vector<double> basis_to_monomial(const PolyCoeffMatrix& coeffs, std::span<const double> w);

// g_w at each point via Theta = Phi^T w then Horner evaluation. Points are
// in the basis's own argument variable.
std::vector<double> eval_filter_response(const PolyCoeffMatrix& coeffs, std::span<const double> w,
                                         std::span<const double> points);

// CSV rendering of Phi for inspection (one basis polynomial per row).
std::string coeffs_to_csv(const PolyCoeffMatrix& coeffs);

}  // namespace adaptkry
