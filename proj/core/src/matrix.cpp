// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/matrix.hpp"

#include <cmath>

#include "qcompat/errors.hpp"

namespace qcompat {

double fnorm(const CMatrix& a) { return a.norm(); }

double herm_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.adjoint()).norm();
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  return herm_defect(a) <= rel_tol * (1.0 + a.norm());
}

bool all_finite(const CMatrix& a) { return a.allFinite(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix matrix_unit(int n, int a, int b) {
  CMatrix e = CMatrix::Zero(n, n);
  e(a, b) = 1.0;
  return e;
}

std::vector<CMatrix> hermitian_basis(int n) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) basis.push_back(matrix_unit(n, a, a));
  const double s = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      CMatrix sym = CMatrix::Zero(n, n);
      sym(a, b) = s;
      sym(b, a) = s;
      basis.push_back(sym);
      CMatrix asym = CMatrix::Zero(n, n);
      asym(a, b) = Complex(0.0, s);
      asym(b, a) = Complex(0.0, -s);
      basis.push_back(asym);
    }
  }
  return basis;
}

double hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.adjoint() * b).trace().real();
}

CMatrix ptrace_first(const CMatrix& j, int n, int m) {
  if (j.rows() != n * m || j.cols() != n * m)
    fail(ErrorCode::ShapeMismatch, "partial trace of a non (n*m)x(n*m) matrix");
  CMatrix out = CMatrix::Zero(m, m);
  for (int a = 0; a < n; ++a) out += j.block(a * m, a * m, m, m);
  return out;
}

CMatrix ptrace_second(const CMatrix& j, int n, int m) {
  if (j.rows() != n * m || j.cols() != n * m)
    fail(ErrorCode::ShapeMismatch, "partial trace of a non (n*m)x(n*m) matrix");
  CMatrix out = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = j.block(a * m, b * m, m, m).trace();
  return out;
}

double Rng::uniform() {
  // 53-bit mantissa from the top bits of the generator output.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Complex Rng::cgaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re, im) / std::sqrt(2.0);
}

CMatrix random_matrix(int rows, int cols, Rng& rng) {
  CMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = rng.cgaussian();
  return out;
}

CMatrix random_hermitian(int n, Rng& rng) {
  const CMatrix g = random_matrix(n, n, rng);
  return hermitize(g);
}

CMatrix random_isometry(int rows, int cols, Rng& rng) {
  if (rows < cols)
    fail(ErrorCode::ShapeMismatch, "isometry needs rows >= cols");
  const CMatrix g = random_matrix(rows, cols, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
  return q;
}

CMatrix random_unitary(int n, Rng& rng) { return random_isometry(n, n, rng); }

CMatrix random_density(int n, Rng& rng) {
  const CMatrix g = random_matrix(n, n, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitize(rho);
}

}  // namespace qcompat
