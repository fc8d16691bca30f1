// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qcompat/errors.hpp"

namespace qcompat {

HermEig herm_eig(const CMatrix& a) {
  if (a.rows() != a.cols())
    fail(ErrorCode::NotHermitian, "matrix is not square");
  if (!all_finite(a)) fail(ErrorCode::NotHermitian, "matrix has NaN/Inf entries");
  if (!is_hermitian(a))
    fail(ErrorCode::NotHermitian, "Hermitian defect exceeds tolerance");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(a));
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::NumericalFailure, "Hermitian eigensolver did not converge");
  return HermEig{solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix null_space(const CMatrix& a, double tol) {
  if (tol <= 0.0) fail(ErrorCode::ShapeMismatch, "null_space tolerance must be > 0");
  const int cols = static_cast<int>(a.cols());
  if (a.norm() == 0.0) return CMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol * sv(0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

CMatrix psd_project(const CMatrix& a) {
  const HermEig eig = herm_eig(a);
  RVector clipped = eig.eigenvalues.cwiseMax(0.0);
  return eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.adjoint();
}

int psd_rank(const CMatrix& a, double tol) {
  const HermEig eig = herm_eig(a);
  const double lmax = eig.eigenvalues.size() ? eig.eigenvalues.maxCoeff() : 0.0;
  if (lmax <= 0.0) return 0;
  const double cut = tol * lmax;
  int rank = 0;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k)
    if (eig.eigenvalues(k) > cut) ++rank;
  return rank;
}

double min_eigenvalue(const CMatrix& hermitian) {
  return herm_eig(hermitian).eigenvalues.minCoeff();
}

}  // namespace qcompat
