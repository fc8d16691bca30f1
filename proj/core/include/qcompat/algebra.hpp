// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_ALGEBRA_HPP
#define QCOMPAT_ALGEBRA_HPP

#include <cstdint>
#include <vector>

#include "qcompat/matrix.hpp"
#include "qcompat/numerics.hpp"

namespace qcompat {

// Finite-dimensional C*-algebra, abstractly a direct sum of full matrix
// blocks (+) M_{n_i}.
struct FdAlgebra {
  std::vector<int> blocks;

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int block_size(int i) const { return blocks[static_cast<std::size_t>(i)]; }
  // Linear dimension sum n_i^2.
  int linear_dim() const;
  bool commutative() const;

  bool operator==(const FdAlgebra&) const = default;

  static FdAlgebra full(int n) { return FdAlgebra{{n}}; }
  // C^k: k blocks of size 1.
  static FdAlgebra classical(int k) {
    return FdAlgebra{std::vector<int>(static_cast<std::size_t>(k), 1)};
  }
};

struct AlgebraElement {
  FdAlgebra algebra;
  std::vector<CMatrix> block_data;  // one n_i x n_i matrix per block

  static AlgebraElement zero(const FdAlgebra& alg);
  static AlgebraElement identity(const FdAlgebra& alg);

  AlgebraElement adjoint() const;
  AlgebraElement operator+(const AlgebraElement& other) const;
  AlgebraElement operator-(const AlgebraElement& other) const;
  AlgebraElement operator*(const AlgebraElement& other) const;  // blockwise
  AlgebraElement scaled(Complex c) const;
  double fnorm() const;
};

void check_element(const FdAlgebra& alg, const AlgebraElement& x);

// Orthonormal Hermitian basis of the algebra as a real vector space: for each
// block, the Hermitian basis of M_{n_i} supported on that block. Size = sum n_i^2.
std::vector<AlgebraElement> hermitian_element_basis(const FdAlgebra& alg);

// Concrete *-representation of an FdAlgebra on C^D: block i of size n_i acts
// with multiplicity m_i >= 0 and D = sum n_i * m_i. In the standard layout
// (basis = identity) the element (+) x_i acts as blockdiag_i (x_i (x) 1_{m_i});
// a general representation conjugates that layout by the stored unitary.
struct Representation {
  FdAlgebra algebra;
  std::vector<int> multiplicities;
  int space_dim = 0;
  CMatrix basis;  // D x D unitary (columns give the orthonormal block layout)

  int block_offset(int i) const;  // column offset of block i in the layout
  static Representation standard(const FdAlgebra& alg,
                                 std::vector<int> multiplicities);
};

CMatrix embed(const Representation& rep, const AlgebraElement& x);

// Pull a matrix lying in the image subalgebra back to abstract block data
// (averages over the multiplicity factor).
AlgebraElement abstract_element(const Representation& rep, const CMatrix& y);

// Orthonormal (Hilbert-Schmidt) basis of {X : X A_k = A_k X for all k}.
std::vector<CMatrix> commutant_basis(const std::vector<CMatrix>& generators,
                                     double tol = kRankTol);

// Identify a unital *-closed subalgebra of M_D as (+) M_{n_i} (x) 1_{m_i}:
// returns block sizes, multiplicities and the unitary change of basis.
// Blocks are sorted by (n_i, central projection trace).
Representation structure_decompose(const std::vector<CMatrix>& subalgebra_basis,
                                   double tol = kRankTol,
                                   std::uint64_t seed = 20240901);

// All pairwise block size products n_i * k_j, row-major in (i, j).
FdAlgebra algebra_tensor(const FdAlgebra& a, const FdAlgebra& b);

}  // namespace qcompat

#endif
