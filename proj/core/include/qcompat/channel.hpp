// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_CHANNEL_HPP
#define QCOMPAT_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "qcompat/algebra.hpp"

namespace qcompat {

// Unital CP map between FdAlgebras in the Heisenberg picture, stored as one
// Choi matrix per (domain block i, codomain block j) component map
// M_{n_i} -> M_{d_j}. Choi convention, domain factor first:
//   J = sum_{ab} |a><b| (x) Lambda(|a><b|),  size (n_i d_j) x (n_i d_j).
// The map is CP iff every block is PSD, and unital iff for each j
//   sum_i Tr_1 J_{ij} = 1_{d_j}.
struct Channel {
  FdAlgebra domain;
  FdAlgebra codomain;
  std::vector<CMatrix> choi;  // row-major over (i, j)

  int block_index(int i, int j) const { return i * codomain.num_blocks() + j; }
  const CMatrix& choi_block(int i, int j) const {
    return choi[static_cast<std::size_t>(block_index(i, j))];
  }
  CMatrix& choi_block(int i, int j) {
    return choi[static_cast<std::size_t>(block_index(i, j))];
  }

  AlgebraElement apply(const AlgebraElement& x) const;

  static Channel identity(const FdAlgebra& alg);
  // Zero-initialized Choi blocks of the right shapes.
  static Channel zero(const FdAlgebra& domain, const FdAlgebra& codomain);
};

// Component action Phi(X) = sum_ab X_ab J.block(a*m, b*m, m, m) of the Choi
// matrix of a map M_n -> M_m.
CMatrix apply_choi(const CMatrix& j, int n, int m, const CMatrix& x);

// Hilbert-Schmidt adjoint: the Hermitian C with tr(C X) = tr(G Phi(X)).
CMatrix apply_choi_adjoint(const CMatrix& j, int n, int m, const CMatrix& g);

struct ValidationReport {
  bool is_cp = false;
  bool is_unital = false;
  double max_violation = 0.0;  // worst PSD defect / unitality residual
};

ValidationReport validate(const Channel& ch);
void require_valid(const Channel& ch, double tol = 1e-9);

// Heisenberg-order composition outer . inner (inner.codomain = outer.domain).
Channel compose(const Channel& outer, const Channel& inner);

Channel tensor_map(const Channel& a, const Channel& b);

// Kraus operators per component: Lambda_{ij}(A) = sum_r K_r^* A K_r with
// K_r of shape n_i x d_j. Operators are ordered by descending Choi
// eigenvalue, eigenvector phases fixed (first nonzero entry real positive);
// the count per component is the numerical Choi rank.
struct KrausForm {
  FdAlgebra domain;
  FdAlgebra codomain;
  std::vector<std::vector<CMatrix>> ops;  // row-major over (i, j)
};

KrausForm kraus_decompose(const Channel& ch);

// Finite-outcome POVM on C^dim: PSD effects summing to the identity.
struct Povm {
  int dim = 0;
  std::vector<CMatrix> effects;

  int num_outcomes() const { return static_cast<int>(effects.size()); }
};

void require_valid(const Povm& povm, double tol = 1e-9);

// QC channel of a POVM: Gamma(f) = sum_i f_i M_i from C^k to M_d.
Channel qc_channel(const Povm& povm);

// Inverse direction for commutative-domain channels into a full block:
// effects are the images of the minimal projections.
Povm povm_from_commutative_channel(const Channel& ch);

// Environment-side channel of a fully quantum channel M_n -> M_d, built from
// a tensor Stinespring isometry: B |-> W^*(1 (x) B) W with environment
// dimension equal to the Choi rank.
Channel complementary_channel(const Channel& ch);

// Seeded CP unital channel: per codomain block, a Haar-like random isometry
// (QR of a Gaussian matrix) compressed to component maps of Choi rank at most
// env_rank.
Channel random_channel(const FdAlgebra& domain, const FdAlgebra& codomain,
                       std::uint64_t seed, int env_rank = 2);

}  // namespace qcompat

#endif
