#include "adaptkry/polybases.hpp"

#include <cmath>
#include <sstream>

#include "adaptkry/error.hpp"

namespace adaptkry {

namespace {

constexpr int kMaxDegree = 30;  // exact integer binomials in double up to here

void check_degree(int degree) {
  if (degree < 0) throw validation_error("degree must be >= 0");
  if (degree > kMaxDegree)
    throw validation_error("degree " + std::to_string(degree) + " exceeds supported maximum " +
                           std::to_string(kMaxDegree));
}

double binomial(int n, int k) {
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * static_cast<double>(n - k + i) / i;
  return std::round(result);
}

// c(x) *= (a0 + a1 x), in place on a padded coefficient row.
void multiply_linear(std::vector<double>& c, double a0, double a1) {
  std::vector<double> out(c.size() + 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] += a0 * c[i];
    out[i + 1] += a1 * c[i];
  }
  c = std::move(out);
}

}  // namespace

const char* poly_basis_name(PolyBasisKind kind) {
  switch (kind) {
    case PolyBasisKind::monomial: return "monomial";
    case PolyBasisKind::chebyshev: return "chebyshev";
    case PolyBasisKind::bernstein: return "bernstein";
    case PolyBasisKind::jacobi: return "jacobi";
  }
  return "unknown";
}

std::pair<double, double> PolyCoeffMatrix::natural_domain() const {
  switch (kind) {
    case PolyBasisKind::chebyshev: return {-1.0, 1.0};
    case PolyBasisKind::monomial:
    case PolyBasisKind::bernstein:
    case PolyBasisKind::jacobi: return {0.0, 2.0};
  }
  return {0.0, 2.0};
}

double PolyCoeffMatrix::argument_from_lambda(double lambda) const {
  switch (kind) {
    case PolyBasisKind::monomial: return 1.0 - lambda;
    case PolyBasisKind::chebyshev: return lambda - 1.0;
    case PolyBasisKind::bernstein:
    case PolyBasisKind::jacobi: return lambda;
  }
  return lambda;
}

PolyCoeffMatrix gpr_coeffs(int degree) {
  check_degree(degree);
  PolyCoeffMatrix out;
  out.kind = PolyBasisKind::monomial;
  out.degree = degree;
  out.phi = Matrix::identity(static_cast<std::size_t>(degree) + 1);
  return out;
}

PolyCoeffMatrix chebyshev_coeffs(int degree) {
  check_degree(degree);
  const auto size = static_cast<std::size_t>(degree) + 1;
  PolyCoeffMatrix out;
  out.kind = PolyBasisKind::chebyshev;
  out.degree = degree;
  out.phi = Matrix(size, size);
  out.phi(0, 0) = 1.0;  // T_0 = 1
  if (degree >= 1) out.phi(1, 1) = 1.0;  // T_1 = x
  for (std::size_t k = 2; k < size; ++k) {
    // T_k = 2 x T_{k-1} - T_{k-2}
    for (std::size_t j = 0; j + 1 < size; ++j) out.phi(k, j + 1) += 2.0 * out.phi(k - 1, j);
    for (std::size_t j = 0; j < size; ++j) out.phi(k, j) -= out.phi(k - 2, j);
  }
  return out;
}

PolyCoeffMatrix bernstein_coeffs(int degree) {
  check_degree(degree);
  const auto size = static_cast<std::size_t>(degree) + 1;
  PolyCoeffMatrix out;
  out.kind = PolyBasisKind::bernstein;
  out.degree = degree;
  out.phi = Matrix(size, size);
  const double scale = std::pow(2.0, -degree);
  for (int k = 0; k <= degree; ++k) {
    // (1/2^K) C(K,k) (2 - x)^{K-k} x^k expanded in x
    const double lead = scale * binomial(degree, k);
    for (int j = 0; j <= degree - k; ++j) {
      const double term = lead * binomial(degree - k, j) *
                          std::pow(2.0, degree - k - j) * (j % 2 == 0 ? 1.0 : -1.0);
      out.phi(static_cast<std::size_t>(k), static_cast<std::size_t>(k + j)) += term;
    }
  }
  return out;
}

PolyCoeffMatrix jacobi_coeffs(int degree, double a, double b) {
  check_degree(degree);
  if (!(a > -1.0) || !(b > -1.0)) throw validation_error("jacobi parameters must exceed -1");
  const auto size = static_cast<std::size_t>(degree) + 1;
  PolyCoeffMatrix out;
  out.kind = PolyBasisKind::jacobi;
  out.degree = degree;
  out.jacobi_a = a;
  out.jacobi_b = b;
  out.phi = Matrix(size, size);

  // Rows are built directly in the lambda variable: the recurrence argument
  // x = 1 - lambda enters as multiplication by the linear polynomial (1, -1).
  std::vector<std::vector<double>> rows;
  rows.push_back({1.0});  // P_0 = 1
  if (degree >= 1) {
    // P_1(x) = (a - b)/2 + (a + b + 2)/2 * x, x = 1 - lambda
    const double c0 = 0.5 * (a - b) + 0.5 * (a + b + 2.0);
    const double c1 = -0.5 * (a + b + 2.0);
    rows.push_back({c0, c1});
  }
  for (int k = 2; k <= degree; ++k) {
    const double kk = k;
    const double denom = 2.0 * kk * (kk + a + b) * (2.0 * kk + a + b - 2.0);
    const double pre = 2.0 * kk + a + b - 1.0;
    const double x_coef = pre * (2.0 * kk + a + b) * (2.0 * kk + a + b - 2.0) / denom;
    const double const_coef = pre * (a * a - b * b) / denom;
    const double drop = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * (2.0 * kk + a + b) / denom;

    std::vector<double> term = rows[static_cast<std::size_t>(k) - 1];
    multiply_linear(term, 1.0, -1.0);  // times x = 1 - lambda
    for (auto& c : term) c *= x_coef;
    std::vector<double> next(static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t j = 0; j < term.size() && j < next.size(); ++j) next[j] += term[j];
    const auto& prev1 = rows[static_cast<std::size_t>(k) - 1];
    for (std::size_t j = 0; j < prev1.size(); ++j) next[j] += const_coef * prev1[j];
    const auto& prev2 = rows[static_cast<std::size_t>(k) - 2];
    for (std::size_t j = 0; j < prev2.size(); ++j) next[j] -= drop * prev2[j];
    rows.push_back(std::move(next));
  }
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t j = 0; j < rows[k].size(); ++j) out.phi(k, j) = rows[k][j];
  return out;
}

std::vector<double> basis_to_monomial(const PolyCoeffMatrix& coeffs, std::span<const double> w) {
  const std::size_t size = coeffs.phi.rows();
  if (w.size() != size)
    throw validation_error("expected " + std::to_string(size) + " weights, got " +
                           std::to_string(w.size()));
  std::vector<double> theta(size, 0.0);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) theta[j] += coeffs.phi(i, j) * w[i];
  return theta;
}

std::vector<double> eval_filter_response(const PolyCoeffMatrix& coeffs, std::span<const double> w,
                                         std::span<const double> points) {
  const std::vector<double> theta = basis_to_monomial(coeffs, w);
  std::vector<double> values;
  values.reserve(points.size());
  for (double x : points) {
    double acc = 0.0;
    for (std::size_t j = theta.size(); j-- > 0;) acc = acc * x + theta[j];
    values.push_back(acc);
  }
  return values;
}

std::string coeffs_to_csv(const PolyCoeffMatrix& coeffs) {
  std::ostringstream out;
  out.precision(17);
  const auto [lo, hi] = coeffs.natural_domain();
  out << "# basis=" << poly_basis_name(coeffs.kind) << " degree=" << coeffs.degree;
  if (coeffs.kind == PolyBasisKind::jacobi)
    out << " a=" << coeffs.jacobi_a << " b=" << coeffs.jacobi_b;
  out << " domain=[" << lo << "," << hi << "]\n";
  for (std::size_t i = 0; i < coeffs.phi.rows(); ++i) {
    for (std::size_t j = 0; j < coeffs.phi.cols(); ++j) {
      if (j) out << ',';
      out << coeffs.phi(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace adaptkry
