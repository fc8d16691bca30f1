// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_FEASIBILITY_HPP
#define QCOMPAT_FEASIBILITY_HPP

#include <string>
#include <vector>

#include "qcompat/matrix.hpp"

namespace qcompat {

// One real-linear equality constraint sum_v tr(C_v X_v) = target on the
// Hermitian block variables; the coefficient matrices C_v are Hermitian, so
// the functional is real on Hermitian assignments.
struct Constraint {
  std::vector<std::pair<int, CMatrix>> coeffs;  // (variable index, coefficient)
  double target = 0.0;
  std::string label;
};

enum class FeasStatus { Feasible, Infeasible, Undecided };

struct FeasibilityOptions {
  double feas_tol = 1e-7;
  double infeas_gap = 1e-4;
  int max_iters = 50000;
};

struct FeasibilityResult {
  FeasStatus status = FeasStatus::Undecided;
  std::vector<CMatrix> witness;  // PSD blocks, set when feasible
  double residual = 0.0;         // max constraint violation of the witness
  // Converged alternating-projection distance (or, for inconsistent affine
  // constraints, the least-squares residual); a heuristic lower-bound
  // estimate of the distance between the affine set and the PSD cone.
  double certificate_gap = 0.0;
  int iterations = 0;
};

// Feasibility of {X_v PSD} intersected with affine equality constraints,
// decided by alternating projections between the PSD product cone and the
// affine subspace. The affine projector (complete orthogonal decomposition of
// the stacked constraint operator) is built eagerly at construction and the
// problem is immutable afterwards.
class FeasibilityProblem {
public:
  FeasibilityProblem(std::vector<int> var_blocks,
                     std::vector<Constraint> constraints);

  const std::vector<int>& var_blocks() const { return var_blocks_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  FeasibilityResult solve(const FeasibilityOptions& opts = {}) const;

  // Independent certificate check: max constraint violation plus the worst
  // PSD defect. Recomputed directly from the constraint list; shares no
  // state with the solver loop.
  static double residual_of(const std::vector<int>& var_blocks,
                            const std::vector<Constraint>& constraints,
                            const std::vector<CMatrix>& assignment);
  double residual_of(const std::vector<CMatrix>& assignment) const;

private:
  RVector to_coords(const std::vector<CMatrix>& blocks) const;
  std::vector<CMatrix> from_coords(const RVector& x) const;
  bool polish(const std::vector<CMatrix>& cone_point, double feas_tol,
              std::vector<CMatrix>* out) const;

  std::vector<int> var_blocks_;
  std::vector<Constraint> constraints_;
  std::vector<int> offsets_;
  int total_dim_ = 0;

  RMatrix op_;  // stacked constraint operator, rows = constraints
  RVector rhs_;
  Eigen::CompleteOrthogonalDecomposition<RMatrix> projector_;
  double inconsistency_ = 0.0;  // LS residual of the affine system itself
};

}  // namespace qcompat

#endif
