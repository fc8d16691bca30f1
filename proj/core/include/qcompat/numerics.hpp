// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_NUMERICS_HPP
#define QCOMPAT_NUMERICS_HPP

#include "qcompat/matrix.hpp"

namespace qcompat {

struct HermEig {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, column k pairs with eigenvalues[k]
};

// Hermitian eigendecomposition. Throws NotHermitian if the input fails
// ||a - a*||_F <= kAlgTol * (1 + ||a||_F), NumericalFailure if the
// underlying iteration does not converge.
HermEig herm_eig(const CMatrix& a);

// Orthonormal basis of the right null space: columns v with
// ||a v|| <= tol * ||a||_F. Dimension = cols - numerical rank, where
// singular values <= tol * sigma_max count as zero. May have zero columns.
CMatrix null_space(const CMatrix& a, double tol = kRankTol);

// Frobenius-nearest PSD matrix: clip negative eigenvalues to zero.
CMatrix psd_project(const CMatrix& a);

// Numerical rank of a Hermitian PSD matrix: eigenvalues <= tol * lambda_max
// count as zero.
int psd_rank(const CMatrix& a, double tol = kRankTol);

double min_eigenvalue(const CMatrix& hermitian);

}  // namespace qcompat

#endif
