// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/channel.hpp"

#include <algorithm>
#include <cmath>

#include "qcompat/errors.hpp"

namespace qcompat {

namespace {

void check_shapes(const Channel& ch) {
  const int nb = ch.domain.num_blocks();
  const int kb = ch.codomain.num_blocks();
  if (ch.choi.size() != static_cast<std::size_t>(nb * kb))
    fail(ErrorCode::ShapeMismatch, "wrong number of Choi blocks");
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < kb; ++j) {
      const int s = ch.domain.block_size(i) * ch.codomain.block_size(j);
      const auto& blk = ch.choi_block(i, j);
      if (blk.rows() != s || blk.cols() != s)
        fail(ErrorCode::ShapeMismatch, "Choi block shape mismatch");
    }
}

// Fixes the global phase: first entry with modulus above 1e-8 made real
// positive.
void fix_phase(CVector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-8) {
      v *= std::conj(v(k)) / std::abs(v(k));
      return;
    }
  }
}

}  // namespace

CMatrix apply_choi(const CMatrix& j, int n, int m, const CMatrix& x) {
  if (x.rows() != n || x.cols() != n || j.rows() != n * m || j.cols() != n * m)
    fail(ErrorCode::ShapeMismatch, "apply_choi shapes");
  CMatrix out = CMatrix::Zero(m, m);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Complex c = x(a, b);
      if (c != Complex(0, 0)) out += c * j.block(a * m, b * m, m, m);
    }
  return out;
}

CMatrix apply_choi_adjoint(const CMatrix& j, int n, int m, const CMatrix& g) {
  if (g.rows() != m || g.cols() != m || j.rows() != n * m || j.cols() != n * m)
    fail(ErrorCode::ShapeMismatch, "apply_choi_adjoint shapes");
  CMatrix out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out(a, b) = (g * j.block(b * m, a * m, m, m)).trace();
  return out;
}

AlgebraElement Channel::apply(const AlgebraElement& x) const {
  check_element(domain, x);
  AlgebraElement out = AlgebraElement::zero(codomain);
  for (int j = 0; j < codomain.num_blocks(); ++j) {
    const int m = codomain.block_size(j);
    for (int i = 0; i < domain.num_blocks(); ++i) {
      out.block_data[static_cast<std::size_t>(j)] +=
          apply_choi(choi_block(i, j), domain.block_size(i), m,
                     x.block_data[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

Channel Channel::zero(const FdAlgebra& domain, const FdAlgebra& codomain) {
  Channel ch{domain, codomain, {}};
  for (int i = 0; i < domain.num_blocks(); ++i)
    for (int j = 0; j < codomain.num_blocks(); ++j) {
      const int s = domain.block_size(i) * codomain.block_size(j);
      ch.choi.push_back(CMatrix::Zero(s, s));
    }
  return ch;
}

Channel Channel::identity(const FdAlgebra& alg) {
  Channel ch = Channel::zero(alg, alg);
  for (int i = 0; i < alg.num_blocks(); ++i) {
    const int n = alg.block_size(i);
    CMatrix omega = CMatrix::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        omega.block(a * n, b * n, n, n) = matrix_unit(n, a, b);
    ch.choi_block(i, i) = omega;
  }
  return ch;
}

ValidationReport validate(const Channel& ch) {
  check_shapes(ch);
  ValidationReport report;
  double psd_defect = 0.0;
  for (const auto& blk : ch.choi) {
    if (blk.size() == 0) continue;
    if (!is_hermitian(blk, 1e-8)) {
      psd_defect = std::max(psd_defect, herm_defect(blk));
      continue;
    }
    psd_defect = std::max(psd_defect, -std::min(0.0, min_eigenvalue(hermitize(blk))));
  }
  double unital_defect = 0.0;
  for (int j = 0; j < ch.codomain.num_blocks(); ++j) {
    const int m = ch.codomain.block_size(j);
    CMatrix s = CMatrix::Zero(m, m);
    for (int i = 0; i < ch.domain.num_blocks(); ++i)
      s += ptrace_first(ch.choi_block(i, j), ch.domain.block_size(i), m);
    unital_defect = std::max(unital_defect, (s - CMatrix::Identity(m, m)).norm());
  }
  report.is_cp = psd_defect <= 1e-9;
  report.is_unital = unital_defect <= 1e-9;
  report.max_violation = std::max(psd_defect, unital_defect);
  return report;
}

void require_valid(const Channel& ch, double tol) {
  check_shapes(ch);
  const ValidationReport report = validate(ch);
  if (report.max_violation > tol)
    fail(ErrorCode::NotCP, "channel violates CP/unitality beyond tolerance");
}

Channel compose(const Channel& outer, const Channel& inner) {
  if (inner.codomain != outer.domain)
    fail(ErrorCode::AlgebraMismatch, "compose: inner codomain != outer domain");
  Channel out = Channel::zero(inner.domain, outer.codomain);
  for (int i = 0; i < inner.domain.num_blocks(); ++i) {
    const int n = inner.domain.block_size(i);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        AlgebraElement unit = AlgebraElement::zero(inner.domain);
        unit.block_data[static_cast<std::size_t>(i)](a, b) = 1.0;
        const AlgebraElement image = outer.apply(inner.apply(unit));
        for (int l = 0; l < outer.codomain.num_blocks(); ++l) {
          const int d = outer.codomain.block_size(l);
          out.choi_block(i, l).block(a * d, b * d, d, d) =
              image.block_data[static_cast<std::size_t>(l)];
        }
      }
  }
  return out;
}

Channel tensor_map(const Channel& a, const Channel& b) {
  Channel out = Channel::zero(algebra_tensor(a.domain, b.domain),
                              algebra_tensor(a.codomain, b.codomain));
  const int bkd = b.domain.num_blocks();
  const int bkc = b.codomain.num_blocks();
  for (int i = 0; i < a.domain.num_blocks(); ++i)
    for (int j = 0; j < bkd; ++j) {
      const int n = a.domain.block_size(i);
      const int k = b.domain.block_size(j);
      for (int l = 0; l < a.codomain.num_blocks(); ++l)
        for (int m = 0; m < bkc; ++m) {
          const int dl = a.codomain.block_size(l);
          const int em = b.codomain.block_size(m);
          const int q = dl * em;
          CMatrix& blk = out.choi_block(i * bkd + j, l * bkc + m);
          for (int aa = 0; aa < n; ++aa)
            for (int bb = 0; bb < n; ++bb) {
              const CMatrix& ja = a.choi_block(i, l);
              const CMatrix img_a = ja.block(aa * dl, bb * dl, dl, dl);
              for (int u = 0; u < k; ++u)
                for (int v = 0; v < k; ++v) {
                  const CMatrix& jb = b.choi_block(j, m);
                  const CMatrix img_b = jb.block(u * em, v * em, em, em);
                  blk.block((aa * k + u) * q, (bb * k + v) * q, q, q) =
                      kron(img_a, img_b);
                }
            }
        }
    }
  return out;
}

KrausForm kraus_decompose(const Channel& ch) {
  check_shapes(ch);
  KrausForm form{ch.domain, ch.codomain, {}};
  form.ops.resize(ch.choi.size());
  for (int i = 0; i < ch.domain.num_blocks(); ++i)
    for (int j = 0; j < ch.codomain.num_blocks(); ++j) {
      const int n = ch.domain.block_size(i);
      const int m = ch.codomain.block_size(j);
      const CMatrix& blk = ch.choi_block(i, j);
      if (!is_hermitian(blk, 1e-8))
        fail(ErrorCode::NotCP, "Choi block is not Hermitian");
      const HermEig eig = herm_eig(hermitize(blk));
      const double lmax = eig.eigenvalues.size() ? eig.eigenvalues.maxCoeff() : 0.0;
      if (eig.eigenvalues.size() && eig.eigenvalues.minCoeff() < -1e-9 * (1.0 + lmax))
        fail(ErrorCode::NotCP, "Choi block has a negative eigenvalue");
      auto& ops = form.ops[static_cast<std::size_t>(ch.block_index(i, j))];
      // Descending eigenvalue order; drop numerically zero directions.
      for (Eigen::Index k = eig.eigenvalues.size() - 1; k >= 0; --k) {
        const double lambda = eig.eigenvalues(k);
        if (lambda <= kRankTol * lmax || lambda <= 0.0) break;
        CVector v = eig.eigenvectors.col(k);
        fix_phase(v);
        CMatrix op(n, m);
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < m; ++c)
            op(a, c) = std::sqrt(lambda) * std::conj(v(a * m + c));
        ops.push_back(std::move(op));
      }
    }
  return form;
}

void require_valid(const Povm& povm, double tol) {
  if (povm.dim <= 0 || povm.effects.empty())
    fail(ErrorCode::InvalidPovm, "empty POVM");
  CMatrix sum = CMatrix::Zero(povm.dim, povm.dim);
  for (const auto& e : povm.effects) {
    if (e.rows() != povm.dim || e.cols() != povm.dim)
      fail(ErrorCode::InvalidPovm, "effect shape mismatch");
    if (!is_hermitian(e, 1e-8))
      fail(ErrorCode::InvalidPovm, "effect is not Hermitian");
    if (min_eigenvalue(hermitize(e)) < -tol)
      fail(ErrorCode::InvalidPovm, "effect is not PSD");
    sum += e;
  }
  if ((sum - CMatrix::Identity(povm.dim, povm.dim)).norm() > tol * povm.dim)
    fail(ErrorCode::InvalidPovm, "effects do not sum to the identity");
}

Channel qc_channel(const Povm& povm) {
  require_valid(povm);
  Channel ch = Channel::zero(FdAlgebra::classical(povm.num_outcomes()),
                             FdAlgebra::full(povm.dim));
  for (int i = 0; i < povm.num_outcomes(); ++i)
    ch.choi_block(i, 0) = povm.effects[static_cast<std::size_t>(i)];
  return ch;
}

Povm povm_from_commutative_channel(const Channel& ch) {
  check_shapes(ch);
  if (!ch.domain.commutative())
    fail(ErrorCode::NotCommutativeDomain, "domain has a block of size > 1");
  if (ch.codomain.num_blocks() != 1)
    fail(ErrorCode::NotCommutativeDomain, "codomain must be a full block");
  Povm povm;
  povm.dim = ch.codomain.block_size(0);
  for (int i = 0; i < ch.domain.num_blocks(); ++i)
    povm.effects.push_back(ch.choi_block(i, 0));
  require_valid(povm);
  return povm;
}

Channel complementary_channel(const Channel& ch) {
  check_shapes(ch);
  if (ch.domain.num_blocks() != 1 || ch.codomain.num_blocks() != 1)
    fail(ErrorCode::NotFullyQuantum,
         "complementary channel needs full-block domain and codomain");
  const int n = ch.domain.block_size(0);
  const int d = ch.codomain.block_size(0);
  const KrausForm form = kraus_decompose(ch);
  const auto& ops = form.ops.front();
  const int r = static_cast<int>(ops.size());
  if (r == 0) fail(ErrorCode::NotCP, "zero channel has no dilation");

  // Tensor Stinespring isometry W: C^d -> C^n (x) C^r, W psi = sum_s K_s psi (x) |s>.
  CMatrix w(n * r, d);
  for (int s = 0; s < r; ++s)
    for (int a = 0; a < n; ++a) w.row(a * r + s) = ops[static_cast<std::size_t>(s)].row(a);

  Channel out = Channel::zero(FdAlgebra::full(r), FdAlgebra::full(d));
  CMatrix& j = out.choi_block(0, 0);
  for (int s = 0; s < r; ++s)
    for (int t = 0; t < r; ++t) {
      CMatrix lifted = CMatrix::Zero(n * r, n * r);
      for (int a = 0; a < n; ++a) lifted(a * r + s, a * r + t) = 1.0;  // 1_n (x) E_st
      j.block(s * d, t * d, d, d) = w.adjoint() * lifted * w;
    }
  return out;
}

Channel random_channel(const FdAlgebra& domain, const FdAlgebra& codomain,
                       std::uint64_t seed, int env_rank) {
  Rng rng(seed);
  Channel ch = Channel::zero(domain, codomain);
  int total_n = 0;
  for (int n : domain.blocks) total_n += n;
  for (int j = 0; j < codomain.num_blocks(); ++j) {
    const int d = codomain.block_size(j);
    int r = std::max(env_rank, 1);
    while (total_n * r < d) ++r;
    const CMatrix t = random_isometry(total_n * r, d, rng);
    int offset = 0;
    for (int i = 0; i < domain.num_blocks(); ++i) {
      const int n = domain.block_size(i);
      const CMatrix w = t.middleRows(offset, n * r);
      offset += n * r;
      CMatrix& blk = ch.choi_block(i, j);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          blk.block(a * d, b * d, d, d) =
              w.middleRows(a * r, r).adjoint() * w.middleRows(b * r, r);
    }
  }
  return ch;
}

}  // namespace qcompat
