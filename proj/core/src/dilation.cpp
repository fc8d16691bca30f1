// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/dilation.hpp"

#include <cmath>

#include "qcompat/errors.hpp"

namespace qcompat {

namespace {

void fix_phase(CVector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-8) {
      v *= std::conj(v(k)) / std::abs(v(k));
      return;
    }
  }
}

}  // namespace

StinespringRep minimal_stinespring(const Channel& ch) {
  if (ch.codomain.num_blocks() != 1)
    fail(ErrorCode::CodomainNotFullBlock,
         "minimal Stinespring needs a full matrix block codomain");
  const ValidationReport report = validate(ch);
  if (!report.is_cp) fail(ErrorCode::NotCP, "channel is not CP");
  if (!report.is_unital) fail(ErrorCode::NotCP, "channel is not unital");

  const int d = ch.codomain.block_size(0);
  const KrausForm form = kraus_decompose(ch);

  std::vector<int> mults;
  int total = 0;
  for (int i = 0; i < ch.domain.num_blocks(); ++i) {
    const int m = static_cast<int>(form.ops[static_cast<std::size_t>(i)].size());
    mults.push_back(m);
    total += ch.domain.block_size(i) * m;
  }

  StinespringRep st;
  st.channel = ch;
  st.rep = Representation::standard(ch.domain, mults);
  st.isometry = CMatrix::Zero(total, d);
  for (int i = 0; i < ch.domain.num_blocks(); ++i) {
    const int n = ch.domain.block_size(i);
    const int m = mults[static_cast<std::size_t>(i)];
    const int off = st.rep.block_offset(i);
    const auto& ops = form.ops[static_cast<std::size_t>(i)];
    for (int a = 0; a < n; ++a)
      for (int r = 0; r < m; ++r)
        st.isometry.row(off + a * m + r) = ops[static_cast<std::size_t>(r)].row(a);
  }
  return st;
}

Channel commutant_conjugate(const Channel& ch) {
  const StinespringRep st = minimal_stinespring(ch);
  const int d = ch.codomain.block_size(0);

  // pi(A)' = (+) 1_{n_i} (x) M_{m_i}; zero-multiplicity blocks drop out.
  FdAlgebra conj_domain;
  std::vector<int> kept;
  for (int i = 0; i < ch.domain.num_blocks(); ++i) {
    const int m = st.rep.multiplicities[static_cast<std::size_t>(i)];
    if (m > 0) {
      conj_domain.blocks.push_back(m);
      kept.push_back(i);
    }
  }

  Channel out = Channel::zero(conj_domain, ch.codomain);
  for (std::size_t b = 0; b < kept.size(); ++b) {
    const int i = kept[b];
    const int n = ch.domain.block_size(i);
    const int m = st.rep.multiplicities[static_cast<std::size_t>(i)];
    const int off = st.rep.block_offset(i);
    CMatrix& j = out.choi_block(static_cast<int>(b), 0);
    // Lambda^c(E_rs) = sum_a row(a,r)^* row(a,s) of the isometry block.
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s) {
        CMatrix img = CMatrix::Zero(d, d);
        for (int a = 0; a < n; ++a)
          img += st.isometry.row(off + a * m + r).adjoint() *
                 st.isometry.row(off + a * m + s);
        j.block(r * d, s * d, d, d) = img;
      }
  }
  return out;
}

NaimarkDilation naimark_dilation(const Povm& povm) {
  require_valid(povm);
  const int d = povm.dim;

  std::vector<int> ranks;
  std::vector<CMatrix> weighted;  // sqrt(lambda) v per kept eigenpair, per effect
  int total = 0;
  for (const auto& effect : povm.effects) {
    const HermEig eig = herm_eig(hermitize(effect));
    const double lmax = eig.eigenvalues.maxCoeff();
    int rank = 0;
    std::vector<CVector> vs;
    for (Eigen::Index k = eig.eigenvalues.size() - 1; k >= 0; --k) {
      const double lambda = eig.eigenvalues(k);
      if (lambda <= kRankTol * std::max(lmax, 0.0) || lambda <= 0.0) break;
      CVector v = eig.eigenvectors.col(k);
      fix_phase(v);
      vs.push_back(std::sqrt(lambda) * v);
      ++rank;
    }
    ranks.push_back(rank);
    total += rank;
    for (auto& v : vs) weighted.push_back(std::move(v));
  }

  NaimarkDilation nd;
  nd.povm = povm;
  nd.total_dim = total;
  nd.isometry = CMatrix::Zero(total, d);
  for (int q = 0; q < total; ++q) nd.isometry.row(q) = weighted[static_cast<std::size_t>(q)].adjoint();
  int off = 0;
  for (std::size_t i = 0; i < povm.effects.size(); ++i) {
    CMatrix p = CMatrix::Zero(total, total);
    const int r = ranks[i];
    p.block(off, off, r, r) = CMatrix::Identity(r, r);
    nd.pvm_projections.push_back(std::move(p));
    off += r;
  }
  return nd;
}

CMatrix solve_intertwiner(const StinespringRep& from, const StinespringRep& to) {
  if (from.channel.domain != to.channel.domain ||
      from.rep.multiplicities != to.rep.multiplicities)
    fail(ErrorCode::AlgebraMismatch, "representations are not comparable");
  const int k = from.total_dim();
  const int d = static_cast<int>(from.isometry.cols());
  CMatrix w = CMatrix::Zero(k, k);
  for (int i = 0; i < from.channel.domain.num_blocks(); ++i) {
    const int n = from.channel.domain.block_size(i);
    const int m = from.rep.multiplicities[static_cast<std::size_t>(i)];
    if (m == 0) continue;
    const int off = from.rep.block_offset(i);
    // Stack the per-row-group slices: W_i [V1_1 ... V1_n] = [V2_1 ... V2_n].
    CMatrix lhs(m, n * d), rhs(m, n * d);
    for (int a = 0; a < n; ++a)
      for (int r = 0; r < m; ++r) {
        lhs.block(r, a * d, 1, d) = from.isometry.row(off + a * m + r);
        rhs.block(r, a * d, 1, d) = to.isometry.row(off + a * m + r);
      }
    // W_i = rhs * pinv(lhs): solve lhs^T W_i^T = rhs^T in least squares.
    const CMatrix wi_t = lhs.transpose()
                             .completeOrthogonalDecomposition()
                             .solve(rhs.transpose());
    const CMatrix wi = wi_t.transpose();
    for (int a = 0; a < n; ++a)
      w.block(off + a * m, off + a * m, m, m) = wi;
  }
  return w;
}

}  // namespace qcompat
