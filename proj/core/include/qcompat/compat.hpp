// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_COMPAT_HPP
#define QCOMPAT_COMPAT_HPP

#include <optional>

#include "qcompat/dilation.hpp"
#include "qcompat/order.hpp"

namespace qcompat {

// Joint channel on the tensor outcome algebra whose marginals reproduce the
// two inputs. Pair blocks are row-major in (block of lambda, block of gamma).
struct JointChannelCertificate {
  Channel joint;
  double marginal_residual_lambda = 0.0;
  double marginal_residual_gamma = 0.0;
};

struct CompatVerdict {
  Tern compatible = Tern::Undecided;
  std::optional<JointChannelCertificate> certificate;
  double gap = 0.0;
  int iterations = 0;
};

// Lifts an element of one tensor factor to the pair algebra (x (x) 1 or
// 1 (x) x).
AlgebraElement lift_first(const FdAlgebra& a, const FdAlgebra& b,
                          const AlgebraElement& x);
AlgebraElement lift_second(const FdAlgebra& a, const FdAlgebra& b,
                           const AlgebraElement& x);

// Direct route: feasibility over the joint channel's Choi blocks with both
// marginal constraint families. Requires a common full-block codomain.
CompatVerdict compatible_channels(const Channel& lambda, const Channel& gamma,
                                  const FeasibilityOptions& opts = {});

// Conjugate route: gamma <= lambda^c. Must agree with the direct route
// wherever both are decided.
PreorderVerdict compatible_via_conjugate(const Channel& lambda,
                                         const Channel& gamma,
                                         const FeasibilityOptions& opts = {});

struct JointPovmCertificate {
  Povm joint;  // k1 * k2 outcomes, row-major in (outcome of m1, outcome of m2)
  int k1 = 0;
  int k2 = 0;
  double marginal_residual_1 = 0.0;
  double marginal_residual_2 = 0.0;
};

struct JointMeasVerdict {
  Tern compatible = Tern::Undecided;
  std::optional<JointPovmCertificate> certificate;
  double gap = 0.0;
  int iterations = 0;
};

JointMeasVerdict jointly_measurable(const Povm& m1, const Povm& m2,
                                    const FeasibilityOptions& opts = {});

// Outcome-indexed family of CP maps with a common domain; the arm values at
// the identity form the marginal POVM and the arm sum the marginal channel.
struct Instrument {
  FdAlgebra domain;
  int dim = 0;                // codomain M_dim
  std::vector<Channel> arms;  // CP maps domain -> M_dim, unital in total
};

void require_valid(const Instrument& ins, double tol = 1e-9);

// Marginal POVM M_i = arm_i(1) and marginal channel sum_i arm_i. Solver-made
// instruments satisfy the instrument identities only to the feasibility
// tolerance, hence the explicit tol.
std::pair<Povm, Channel> instrument_marginals(const Instrument& ins,
                                              double tol = 1e-9);

struct PovmChannelVerdict {
  Tern compatible = Tern::Undecided;
  std::optional<Instrument> instrument;  // from the direct route, when yes
  double gap = 0.0;
  Tern direct_route = Tern::Undecided;
  Tern conjugate_route = Tern::Undecided;
  int iterations = 0;
};

// Both routes are always run: (a) feasibility over instrument arms, (b)
// lambda <= (Gamma^m)^c. Decided verdicts must agree; disagreement raises
// NumericalFailure.
PovmChannelVerdict compatible_povm_channel(const Povm& m, const Channel& lambda,
                                           const FeasibilityOptions& opts = {});

}  // namespace qcompat

#endif
