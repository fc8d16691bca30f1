// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/algebra.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qcompat/errors.hpp"

namespace qcompat {

namespace {

CVector vec(const CMatrix& a) {
  return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& v, int rows, int cols) {
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

// Orthonormal (HS) basis of the complex span of a list of equally sized
// matrices.
std::vector<CMatrix> span_basis(const std::vector<CMatrix>& mats, double tol) {
  const int rows = static_cast<int>(mats.front().rows());
  const int cols = static_cast<int>(mats.front().cols());
  CMatrix stacked(rows * cols, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) stacked.col(k) = vec(mats[k]);
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return {};
  const double cut = tol * sv(0);
  std::vector<CMatrix> basis;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) basis.push_back(unvec(svd.matrixU().col(k), rows, cols));
  return basis;
}

// Orthonormal basis (real coefficients) of the Hermitian part of a *-closed
// span.
std::vector<CMatrix> hermitian_span_basis(const std::vector<CMatrix>& mats,
                                          double tol) {
  const int n = static_cast<int>(mats.front().rows());
  std::vector<CMatrix> cands;
  cands.reserve(2 * mats.size());
  for (const auto& m : mats) {
    cands.push_back(hermitize(m));
    cands.push_back(hermitize(Complex(0, -1) * m));
  }
  // Real SVD over (Re, Im) stacked coordinates keeps combinations Hermitian.
  RMatrix stacked(2 * n * n, static_cast<Eigen::Index>(cands.size()));
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const CVector v = vec(cands[k]);
    stacked.col(k).head(n * n) = v.real();
    stacked.col(k).tail(n * n) = v.imag();
  }
  Eigen::JacobiSVD<RMatrix> svd(stacked, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return {};
  const double cut = tol * sv(0);
  std::vector<CMatrix> basis;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cut) continue;
    CVector v(n * n);
    v.real() = svd.matrixU().col(k).head(n * n);
    v.imag() = svd.matrixU().col(k).tail(n * n);
    basis.push_back(unvec(v, n, n));
  }
  return basis;
}

CMatrix project_onto_span(const std::vector<CMatrix>& basis, const CMatrix& x) {
  CMatrix out = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& b : basis) out += (vec(b).adjoint() * vec(x)).value() * b;
  return out;
}

// Distinct-eigenvalue clusters of an ascending eigenvalue list.
std::vector<std::pair<int, int>> eigenvalue_clusters(const RVector& lambda,
                                                     double gap) {
  std::vector<std::pair<int, int>> clusters;
  int start = 0;
  for (int k = 1; k <= lambda.size(); ++k) {
    if (k == lambda.size() || lambda(k) - lambda(k - 1) > gap) {
      clusters.emplace_back(start, k - start);
      start = k;
    }
  }
  return clusters;
}

}  // namespace

int FdAlgebra::linear_dim() const {
  int d = 0;
  for (int n : blocks) d += n * n;
  return d;
}

bool FdAlgebra::commutative() const {
  return std::all_of(blocks.begin(), blocks.end(), [](int n) { return n == 1; });
}

AlgebraElement AlgebraElement::zero(const FdAlgebra& alg) {
  AlgebraElement x{alg, {}};
  for (int n : alg.blocks) x.block_data.push_back(CMatrix::Zero(n, n));
  return x;
}

AlgebraElement AlgebraElement::identity(const FdAlgebra& alg) {
  AlgebraElement x{alg, {}};
  for (int n : alg.blocks) x.block_data.push_back(CMatrix::Identity(n, n));
  return x;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement out{algebra, {}};
  for (const auto& b : block_data) out.block_data.push_back(b.adjoint());
  return out;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& other) const {
  if (algebra != other.algebra) fail(ErrorCode::AlgebraMismatch, "element sum");
  AlgebraElement out{algebra, {}};
  for (std::size_t i = 0; i < block_data.size(); ++i)
    out.block_data.push_back(block_data[i] + other.block_data[i]);
  return out;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& other) const {
  return *this + other.scaled(-1.0);
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& other) const {
  if (algebra != other.algebra) fail(ErrorCode::AlgebraMismatch, "element product");
  AlgebraElement out{algebra, {}};
  for (std::size_t i = 0; i < block_data.size(); ++i)
    out.block_data.push_back(block_data[i] * other.block_data[i]);
  return out;
}

AlgebraElement AlgebraElement::scaled(Complex c) const {
  AlgebraElement out{algebra, {}};
  for (const auto& b : block_data) out.block_data.push_back(c * b);
  return out;
}

double AlgebraElement::fnorm() const {
  double s = 0;
  for (const auto& b : block_data) s += b.squaredNorm();
  return std::sqrt(s);
}

void check_element(const FdAlgebra& alg, const AlgebraElement& x) {
  if (x.algebra != alg ||
      x.block_data.size() != static_cast<std::size_t>(alg.num_blocks()))
    fail(ErrorCode::AlgebraMismatch, "element does not belong to the algebra");
  for (int i = 0; i < alg.num_blocks(); ++i) {
    const auto& b = x.block_data[static_cast<std::size_t>(i)];
    if (b.rows() != alg.block_size(i) || b.cols() != alg.block_size(i))
      fail(ErrorCode::AlgebraMismatch, "block shape mismatch");
  }
}

std::vector<AlgebraElement> hermitian_element_basis(const FdAlgebra& alg) {
  std::vector<AlgebraElement> basis;
  for (int i = 0; i < alg.num_blocks(); ++i) {
    for (const auto& h : hermitian_basis(alg.block_size(i))) {
      AlgebraElement e = AlgebraElement::zero(alg);
      e.block_data[static_cast<std::size_t>(i)] = h;
      basis.push_back(std::move(e));
    }
  }
  return basis;
}

int Representation::block_offset(int i) const {
  int off = 0;
  for (int j = 0; j < i; ++j)
    off += algebra.block_size(j) * multiplicities[static_cast<std::size_t>(j)];
  return off;
}

Representation Representation::standard(const FdAlgebra& alg,
                                        std::vector<int> multiplicities) {
  if (multiplicities.size() != static_cast<std::size_t>(alg.num_blocks()))
    fail(ErrorCode::AlgebraMismatch, "multiplicity list length");
  int dim = 0;
  for (int i = 0; i < alg.num_blocks(); ++i)
    dim += alg.block_size(i) * multiplicities[static_cast<std::size_t>(i)];
  Representation rep;
  rep.algebra = alg;
  rep.multiplicities = std::move(multiplicities);
  rep.space_dim = dim;
  rep.basis = CMatrix::Identity(dim, dim);
  return rep;
}

CMatrix embed(const Representation& rep, const AlgebraElement& x) {
  check_element(rep.algebra, x);
  CMatrix std_layout = CMatrix::Zero(rep.space_dim, rep.space_dim);
  for (int i = 0; i < rep.algebra.num_blocks(); ++i) {
    const int m = rep.multiplicities[static_cast<std::size_t>(i)];
    if (m == 0) continue;
    const int n = rep.algebra.block_size(i);
    const int off = rep.block_offset(i);
    std_layout.block(off, off, n * m, n * m) =
        kron(x.block_data[static_cast<std::size_t>(i)], CMatrix::Identity(m, m));
  }
  return rep.basis * std_layout * rep.basis.adjoint();
}

AlgebraElement abstract_element(const Representation& rep, const CMatrix& y) {
  if (y.rows() != rep.space_dim || y.cols() != rep.space_dim)
    fail(ErrorCode::ShapeMismatch, "matrix does not act on the rep space");
  const CMatrix t = rep.basis.adjoint() * y * rep.basis;
  AlgebraElement x = AlgebraElement::zero(rep.algebra);
  for (int i = 0; i < rep.algebra.num_blocks(); ++i) {
    const int m = rep.multiplicities[static_cast<std::size_t>(i)];
    if (m == 0) continue;
    const int n = rep.algebra.block_size(i);
    const int off = rep.block_offset(i);
    CMatrix& xb = x.block_data[static_cast<std::size_t>(i)];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        xb(a, b) = t.block(off + a * m, off + b * m, m, m).trace() /
                   static_cast<double>(m);
  }
  return x;
}

std::vector<CMatrix> commutant_basis(const std::vector<CMatrix>& generators,
                                     double tol) {
  if (generators.empty())
    fail(ErrorCode::ShapeMismatch, "commutant of an empty generator list");
  const int d = static_cast<int>(generators.front().rows());
  for (const auto& g : generators)
    if (g.rows() != d || g.cols() != d)
      fail(ErrorCode::ShapeMismatch, "generators must be square, same size");

  // vec(XA - AX) = (A^T (x) 1 - 1 (x) A) vec X, column-major vec.
  CMatrix stacked(static_cast<Eigen::Index>(generators.size()) * d * d, d * d);
  const CMatrix id = CMatrix::Identity(d, d);
  for (std::size_t k = 0; k < generators.size(); ++k) {
    stacked.middleRows(static_cast<Eigen::Index>(k) * d * d, d * d) =
        kron(generators[k].transpose(), id) - kron(id, generators[k]);
  }
  const CMatrix ns = null_space(stacked, tol);
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(ns.cols()));
  for (Eigen::Index c = 0; c < ns.cols(); ++c)
    basis.push_back(unvec(ns.col(c), d, d));
  return basis;
}

FdAlgebra algebra_tensor(const FdAlgebra& a, const FdAlgebra& b) {
  FdAlgebra out;
  for (int n : a.blocks)
    for (int k : b.blocks) out.blocks.push_back(n * k);
  return out;
}

namespace {

struct CentralBlock {
  int n = 0;          // block size
  int m = 0;          // multiplicity
  CMatrix columns;    // D x (n*m), ordered (a major, r minor)
  int cluster_index = 0;
};

// Aligns the eigenspace bases of one central block so that the restricted
// algebra becomes {x (x) 1_m}. Returns false if the random probes were
// degenerate and the caller should retry with fresh randomness.
bool align_block(const std::vector<CMatrix>& herm_basis,
                 const std::vector<CMatrix>& alg_basis, const CMatrix& v_c,
                 int n, int m, Rng& rng, CMatrix* out) {
  const int dc = n * m;
  if (n == 1) {
    *out = v_c;
    return true;
  }
  // Random self-adjoint element of the restricted algebra; its eigenspaces
  // are the n copies of the multiplicity space.
  CMatrix x = CMatrix::Zero(dc, dc);
  for (const auto& h : herm_basis) x += rng.gaussian() * h;
  const HermEig eig = herm_eig(hermitize(x));
  const double spread = eig.eigenvalues(dc - 1) - eig.eigenvalues(0);
  const auto clusters = eigenvalue_clusters(eig.eigenvalues, 1e-6 * (1.0 + spread));
  if (static_cast<int>(clusters.size()) != n) return false;
  for (const auto& [start, len] : clusters)
    if (len != m) return false;

  // A generic algebra element restricted between two eigenspaces is a scalar
  // multiple of the canonical intertwiner; polar decomposition recovers it.
  CMatrix y = CMatrix::Zero(dc, dc);
  for (const auto& a : alg_basis) y += rng.cgaussian() * a;

  const CMatrix e0 = eig.eigenvectors.middleCols(clusters[0].first, m);
  CMatrix aligned(dc, dc);
  for (int a = 0; a < n; ++a) {
    const CMatrix ea = eig.eigenvectors.middleCols(clusters[a].first, m);
    const CMatrix ma = ea.adjoint() * y * e0;
    Eigen::JacobiSVD<CMatrix> svd(ma, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues()(m - 1) < 1e-8 * (1.0 + svd.singularValues()(0)))
      return false;
    const CMatrix polar = svd.matrixU() * svd.matrixV().adjoint();
    aligned.middleCols(a * m, m) = ea * polar;
  }
  *out = v_c * aligned;
  return true;
}

}  // namespace

Representation structure_decompose(const std::vector<CMatrix>& subalgebra_basis,
                                   double tol, std::uint64_t seed) {
  if (subalgebra_basis.empty())
    fail(ErrorCode::NotStarAlgebra, "empty basis");
  const int d = static_cast<int>(subalgebra_basis.front().rows());
  for (const auto& s : subalgebra_basis)
    if (s.rows() != d || s.cols() != d)
      fail(ErrorCode::NotStarAlgebra, "basis matrices must be square, same size");

  const std::vector<CMatrix> alg = span_basis(subalgebra_basis, tol);
  const int alg_dim = static_cast<int>(alg.size());
  const double close_tol = 100.0 * std::max(tol, 1e-12) * (1.0 + d);

  const CMatrix id = CMatrix::Identity(d, d);
  if ((id - project_onto_span(alg, id)).norm() > close_tol * std::sqrt(double(d)))
    fail(ErrorCode::NotStarAlgebra, "identity is not in the span");
  for (const auto& a : alg) {
    if ((a.adjoint() - project_onto_span(alg, a.adjoint())).norm() > close_tol)
      fail(ErrorCode::NotStarAlgebra, "span is not closed under adjoints");
    for (const auto& b : alg) {
      const CMatrix p = a * b;
      if ((p - project_onto_span(alg, p)).norm() > close_tol)
        fail(ErrorCode::NotStarAlgebra, "span is not closed under products");
    }
  }

  const std::vector<CMatrix> comm = commutant_basis(alg, tol);
  std::vector<CMatrix> both = alg;
  both.insert(both.end(), comm.begin(), comm.end());
  const std::vector<CMatrix> center = commutant_basis(both, tol);
  const int num_blocks = static_cast<int>(center.size());
  const std::vector<CMatrix> center_herm = hermitian_span_basis(center, tol);
  if (static_cast<int>(center_herm.size()) != num_blocks)
    fail(ErrorCode::ToleranceBreakdown, "center Hermitian dimension mismatch");

  for (int attempt = 0; attempt < 5; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));

    // Random self-adjoint central element; its eigenspaces are the central
    // blocks.
    CMatrix c = CMatrix::Zero(d, d);
    for (const auto& h : center_herm) c += rng.gaussian() * h;
    const HermEig eig = herm_eig(hermitize(c));
    const double spread = eig.eigenvalues(d - 1) - eig.eigenvalues(0);
    const auto clusters = eigenvalue_clusters(eig.eigenvalues, 1e-6 * (1.0 + spread));
    if (static_cast<int>(clusters.size()) != num_blocks) continue;

    std::vector<CentralBlock> blocks;
    bool ok = true;
    int sum_n2 = 0, sum_m2 = 0;
    for (int cidx = 0; cidx < num_blocks && ok; ++cidx) {
      const auto [start, dc] = clusters[static_cast<std::size_t>(cidx)];
      const CMatrix v_c = eig.eigenvectors.middleCols(start, dc);
      std::vector<CMatrix> restricted;
      restricted.reserve(alg.size());
      for (const auto& a : alg) restricted.push_back(v_c.adjoint() * a * v_c);
      const std::vector<CMatrix> alg_c = span_basis(restricted, tol);
      const int n = static_cast<int>(std::lround(std::sqrt(double(alg_c.size()))));
      if (n * n != static_cast<int>(alg_c.size()) || dc % n != 0) {
        ok = false;
        break;
      }
      const int m = dc / n;
      const std::vector<CMatrix> herm_c = hermitian_span_basis(alg_c, tol);
      if (static_cast<int>(herm_c.size()) != n * n) {
        ok = false;
        break;
      }
      CentralBlock blk;
      blk.n = n;
      blk.m = m;
      blk.cluster_index = cidx;
      bool aligned = false;
      for (int sub = 0; sub < 5 && !aligned; ++sub)
        aligned = align_block(herm_c, alg_c, v_c, n, m, rng, &blk.columns);
      if (!aligned) {
        ok = false;
        break;
      }
      sum_n2 += n * n;
      sum_m2 += m * m;
      blocks.push_back(std::move(blk));
    }
    if (!ok || sum_n2 != alg_dim || sum_m2 != static_cast<int>(comm.size()))
      continue;

    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const CentralBlock& a, const CentralBlock& b) {
                       if (a.n != b.n) return a.n < b.n;
                       if (a.n * a.m != b.n * b.m) return a.n * a.m < b.n * b.m;
                       return a.cluster_index < b.cluster_index;
                     });

    Representation rep;
    rep.space_dim = d;
    rep.basis = CMatrix(d, d);
    int off = 0;
    for (const auto& blk : blocks) {
      rep.algebra.blocks.push_back(blk.n);
      rep.multiplicities.push_back(blk.m);
      rep.basis.middleCols(off, blk.n * blk.m) = blk.columns;
      off += blk.n * blk.m;
    }

    // Round trip: every input basis matrix must be reproduced by
    // embed(abstract(.)).
    double resid = 0;
    for (const auto& s : alg) {
      const CMatrix back = embed(rep, abstract_element(rep, s));
      resid = std::max(resid, (back - s).norm());
    }
    if (resid > 1e-8) continue;
    return rep;
  }
  fail(ErrorCode::ToleranceBreakdown,
       "block identification is ambiguous at the given tolerance");
}

}  // namespace qcompat
