// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_ORDER_HPP
#define QCOMPAT_ORDER_HPP

#include <optional>

#include "qcompat/channel.hpp"
#include "qcompat/experiments.hpp"
#include "qcompat/feasibility.hpp"
#include "qcompat/tern.hpp"

namespace qcompat {

// Max over an orthonormal Hermitian element basis of the domain of the
// Frobenius distance between the two channel actions.
double action_distance(const Channel& a, const Channel& b);

struct PreorderVerdict {
  Tern holds = Tern::Undecided;
  std::optional<Channel> witness;  // the post-processing channel, when holds
  double residual = 0.0;           // action-norm residual of the witness
  double gap = 0.0;                // feasibility gap, when it fails
  int iterations = 0;
};

// phi1 <= phi2 in the concatenation preorder: exists a CP unital
// Psi : dom(phi1) -> dom(phi2) with phi1 = phi2 . Psi. At finite dimension
// the CP and normal-CP relations coincide, so a single oracle serves both.
PreorderVerdict channel_leq(const Channel& phi1, const Channel& phi2,
                            const FeasibilityOptions& opts = {});

struct EquivVerdict {
  Tern equivalent = Tern::Undecided;
  PreorderVerdict forward;   // phi1 <= phi2
  PreorderVerdict backward;  // phi2 <= phi1
};

EquivVerdict channel_equiv(const Channel& phi1, const Channel& phi2,
                           const FeasibilityOptions& opts = {});

// Column-stochastic post-processing matrix; rows index target outcomes,
// columns source outcomes.
struct StochasticKernel {
  RMatrix matrix;
};

void require_valid(const StochasticKernel& k, double tol = 1e-9);

struct PovmLeqVerdict {
  Tern holds = Tern::Undecided;
  std::optional<StochasticKernel> kernel;
  double residual = 0.0;  // max effect reconstruction error
  double gap = 0.0;
  int iterations = 0;
};

// m <= n: exists a column-stochastic kernel with m_i = sum_j k_ij n_j.
// Coincides with channel_leq(qc_channel(m), qc_channel(n)).
PovmLeqVerdict povm_leq(const Povm& m, const Povm& n,
                        const FeasibilityOptions& opts = {});

// e <= f: exists a channel Gamma : alg(e) -> alg(f) carrying every state of
// f onto the matching state of e (phi_theta = psi_theta . Gamma).
PreorderVerdict experiment_leq(const StatExperiment& e, const StatExperiment& f,
                               const FeasibilityOptions& opts = {});

}  // namespace qcompat

#endif
