// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/feasibility.hpp"

#include <cassert>
#include <cmath>

#include "qcompat/errors.hpp"
#include "qcompat/numerics.hpp"

namespace qcompat {

namespace {

// Isometric real coordinates of a Hermitian s x s matrix: diagonal entries,
// then sqrt(2) Re / sqrt(2) Im of the upper triangle. Preserves the HS inner
// product, so constraint functionals become plain dot products.
int coord_dim(int s) { return s * s; }

void herm_to_coords(const CMatrix& x, double* out) {
  const int s = static_cast<int>(x.rows());
  int k = 0;
  for (int a = 0; a < s; ++a) out[k++] = x(a, a).real();
  const double r2 = std::sqrt(2.0);
  for (int a = 0; a < s; ++a)
    for (int b = a + 1; b < s; ++b) {
      out[k++] = r2 * x(a, b).real();
      out[k++] = r2 * x(a, b).imag();
    }
}

CMatrix coords_to_herm(const double* in, int s) {
  CMatrix x(s, s);
  int k = 0;
  for (int a = 0; a < s; ++a) x(a, a) = in[k++];
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < s; ++a)
    for (int b = a + 1; b < s; ++b) {
      const double re = in[k++] * r2;
      const double im = in[k++] * r2;
      x(a, b) = Complex(re, im);
      x(b, a) = Complex(re, -im);
    }
  return x;
}

}  // namespace

FeasibilityProblem::FeasibilityProblem(std::vector<int> var_blocks,
                                       std::vector<Constraint> constraints)
    : var_blocks_(std::move(var_blocks)), constraints_(std::move(constraints)) {
  if (var_blocks_.empty())
    fail(ErrorCode::IllFormedProblem, "no variable blocks");
  offsets_.reserve(var_blocks_.size());
  for (int s : var_blocks_) {
    if (s <= 0) fail(ErrorCode::IllFormedProblem, "variable block size must be > 0");
    offsets_.push_back(total_dim_);
    total_dim_ += coord_dim(s);
  }

  op_.resize(static_cast<Eigen::Index>(constraints_.size()), total_dim_);
  op_.setZero();
  rhs_.resize(static_cast<Eigen::Index>(constraints_.size()));
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    rhs_(static_cast<Eigen::Index>(c)) = constraints_[c].target;
    for (const auto& [v, coeff] : constraints_[c].coeffs) {
      if (v < 0 || v >= static_cast<int>(var_blocks_.size()))
        fail(ErrorCode::IllFormedProblem, "constraint references unknown variable");
      const int s = var_blocks_[static_cast<std::size_t>(v)];
      if (coeff.rows() != s || coeff.cols() != s)
        fail(ErrorCode::IllFormedProblem,
             "coefficient shape does not match variable block: " +
                 constraints_[c].label);
      if (herm_defect(coeff) > 1e-8 * (1.0 + coeff.norm()))
        fail(ErrorCode::IllFormedProblem,
             "coefficient is not Hermitian: " + constraints_[c].label);
      RVector coords(coord_dim(s));
      herm_to_coords(hermitize(coeff), coords.data());
      op_.row(static_cast<Eigen::Index>(c))
          .segment(offsets_[static_cast<std::size_t>(v)], coord_dim(s)) +=
          coords.transpose();
    }
  }

  projector_.compute(op_);
  if (constraints_.empty()) {
    inconsistency_ = 0.0;
  } else {
    const RVector ls = projector_.solve(rhs_);
    inconsistency_ = (op_ * ls - rhs_).template lpNorm<Eigen::Infinity>();
  }
}

RVector FeasibilityProblem::to_coords(const std::vector<CMatrix>& blocks) const {
  RVector x(total_dim_);
  for (std::size_t v = 0; v < var_blocks_.size(); ++v)
    herm_to_coords(blocks[v], x.data() + offsets_[v]);
  return x;
}

std::vector<CMatrix> FeasibilityProblem::from_coords(const RVector& x) const {
  std::vector<CMatrix> blocks;
  blocks.reserve(var_blocks_.size());
  for (std::size_t v = 0; v < var_blocks_.size(); ++v)
    blocks.push_back(coords_to_herm(x.data() + offsets_[v], var_blocks_[v]));
  return blocks;
}

double FeasibilityProblem::residual_of(const std::vector<int>& var_blocks,
                                       const std::vector<Constraint>& constraints,
                                       const std::vector<CMatrix>& assignment) {
  if (assignment.size() != var_blocks.size())
    fail(ErrorCode::ShapeMismatch, "assignment block count");
  for (std::size_t v = 0; v < var_blocks.size(); ++v)
    if (assignment[v].rows() != var_blocks[v] || assignment[v].cols() != var_blocks[v])
      fail(ErrorCode::ShapeMismatch, "assignment block shape");

  double worst_constraint = 0.0;
  for (const auto& c : constraints) {
    double value = 0.0;
    for (const auto& [v, coeff] : c.coeffs)
      value += (coeff * assignment[static_cast<std::size_t>(v)]).trace().real();
    worst_constraint = std::max(worst_constraint, std::abs(value - c.target));
  }
  double worst_psd = 0.0;
  for (const auto& x : assignment)
    worst_psd = std::max(worst_psd, -std::min(0.0, min_eigenvalue(hermitize(x))));
  return worst_constraint + worst_psd;
}

double FeasibilityProblem::residual_of(const std::vector<CMatrix>& assignment) const {
  return residual_of(var_blocks_, constraints_, assignment);
}

// Active-face polish: when the iterate hugs a face of the PSD cone, solve
// the affine system restricted to that face by least squares and test the
// result exactly. Finishes tangent instances that plain alternating
// projections approach only sublinearly.
bool FeasibilityProblem::polish(const std::vector<CMatrix>& cone_point,
                                double feas_tol,
                                std::vector<CMatrix>* out) const {
  std::vector<CMatrix> face_bases;  // eigenvector columns per block
  std::vector<int> face_dims;
  int face_total = 0;
  for (std::size_t v = 0; v < var_blocks_.size(); ++v) {
    const HermEig eig = herm_eig(cone_point[v]);
    const double lmax = std::max(eig.eigenvalues.maxCoeff(), 0.0);
    const double cut = 1e-6 * (1.0 + lmax);
    int keep = 0;
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k)
      if (eig.eigenvalues(k) > cut) ++keep;
    face_bases.push_back(eig.eigenvectors.rightCols(keep));
    face_dims.push_back(keep);
    face_total += keep * keep;
  }
  if (face_total == 0) return false;

  // Columns of the constraint operator restricted to the face coordinates.
  RMatrix t_face(op_.rows(), face_total);
  std::vector<std::vector<CMatrix>> images;  // face basis images per block
  int col = 0;
  for (std::size_t v = 0; v < var_blocks_.size(); ++v) {
    const int s = var_blocks_[v];
    std::vector<CMatrix> block_images;
    for (const auto& f : hermitian_basis(face_dims[v])) {
      const CMatrix lifted = face_bases[v] * f * face_bases[v].adjoint();
      RVector coords = RVector::Zero(total_dim_);
      herm_to_coords(lifted, coords.data() + offsets_[v]);
      t_face.col(col++) = op_ * coords;
      block_images.push_back(lifted);
      (void)s;
    }
    images.push_back(std::move(block_images));
  }

  const RVector z = t_face.completeOrthogonalDecomposition().solve(rhs_);
  if ((t_face * z - rhs_).template lpNorm<Eigen::Infinity>() > 0.5 * feas_tol)
    return false;

  std::vector<CMatrix> candidate;
  int idx = 0;
  for (std::size_t v = 0; v < var_blocks_.size(); ++v) {
    CMatrix x = CMatrix::Zero(var_blocks_[v], var_blocks_[v]);
    for (const auto& img : images[v]) x += z(idx++) * img;
    candidate.push_back(psd_project(hermitize(x)));
  }
  if (residual_of(candidate) > feas_tol) return false;
  *out = std::move(candidate);
  return true;
}

FeasibilityResult FeasibilityProblem::solve(const FeasibilityOptions& opts) const {
  FeasibilityResult result;

  // An inconsistent affine system means the constraint set itself is empty.
  if (inconsistency_ > opts.infeas_gap) {
    result.status = FeasStatus::Infeasible;
    result.certificate_gap = inconsistency_;
    return result;
  }

  RVector x = RVector::Zero(total_dim_);
  const int window = 500;
  double window_dist = std::numeric_limits<double>::infinity();
  int next_polish = 400;
#ifndef NDEBUG
  double prev_dist = std::numeric_limits<double>::infinity();
#endif

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    // Project the affine iterate onto the PSD product cone.
    std::vector<CMatrix> cone = from_coords(x);
    for (auto& blk : cone) blk = psd_project(blk);
    const RVector y = to_coords(cone);

    double rinf = 0.0;
    RVector r;
    if (op_.rows() > 0) {
      r = op_ * y - rhs_;
      rinf = r.template lpNorm<Eigen::Infinity>();
    }
    if (rinf <= opts.feas_tol) {
      result.status = FeasStatus::Feasible;
      result.witness = std::move(cone);
      result.residual = residual_of(result.witness);
      result.iterations = iter;
      return result;
    }

    if (iter >= next_polish) {
      next_polish *= 2;
      std::vector<CMatrix> polished;
      if (polish(cone, opts.feas_tol, &polished)) {
        result.status = FeasStatus::Feasible;
        result.witness = std::move(polished);
        result.residual = residual_of(result.witness);
        result.iterations = iter;
        return result;
      }
    }

    // Project back onto the affine subspace (least-squares manifold when the
    // system is rank-deficient).
    const RVector z = projector_.solve(r);
    x = y - z;
    const double dist = z.norm();
#ifndef NDEBUG
    assert(dist <= prev_dist + 1e-9);
    prev_dist = dist;
#endif
    result.certificate_gap = std::max(dist, inconsistency_);
    result.iterations = iter;

    if (iter % window == 0) {
      // Distance converged without reaching the cone: declare infeasible if
      // the converged gap is macroscopic.
      if (window_dist - dist <= 1e-4 * std::max(dist, 1e-12) &&
          dist > opts.infeas_gap) {
        result.status = FeasStatus::Infeasible;
        return result;
      }
      window_dist = dist;
    }
  }
  result.status = FeasStatus::Undecided;
  return result;
}

}  // namespace qcompat
