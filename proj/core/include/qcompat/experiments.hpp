// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_EXPERIMENTS_HPP
#define QCOMPAT_EXPERIMENTS_HPP

#include "qcompat/channel.hpp"
#include "qcompat/feasibility.hpp"
#include "qcompat/tern.hpp"

namespace qcompat {

// Finite statistical experiment: a parameter-indexed list of states on one
// algebra. States are stored as block density elements (PSD blocks, total
// trace one) pairing with elements by phi(A) = sum_i tr(rho_i A_i).
struct StatExperiment {
  FdAlgebra algebra;
  std::vector<AlgebraElement> states;

  int num_parameters() const { return static_cast<int>(states.size()); }
};

void require_valid(const StatExperiment& e);

double state_pairing(const AlgebraElement& state, const AlgebraElement& x);

// Lambda_E(A) = sum_theta phi_theta(A) |theta><theta| into M_|Theta|.
Channel associated_channel(const StatExperiment& e);

// Coarse-graining equivalence in both directions (see order.hpp for the
// one-sided relation).
Tern experiment_equiv(const StatExperiment& e, const StatExperiment& f,
                      const FeasibilityOptions& opts = {});

StatExperiment random_experiment(const FdAlgebra& alg, int num_states,
                                 std::uint64_t seed);

}  // namespace qcompat

#endif
