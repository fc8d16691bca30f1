// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_POVMTOOLS_HPP
#define QCOMPAT_POVMTOOLS_HPP

#include <array>

#include "qcompat/compat.hpp"
#include "qcompat/order.hpp"

namespace qcompat {

// Canonical form: zero effects dropped, proportional effects merged, outcomes
// ordered by descending trace (ties lexicographic). Post-processing
// equivalent to the input; merge_map records where each original outcome
// went (column-stochastic, rows = canonical outcomes).
struct CanonicalPovm {
  Povm povm;
  StochasticKernel merge_map;
};

CanonicalPovm canonicalize(const Povm& m);

struct MaximalityEvidence {
  std::vector<int> canonical_ranks;  // effect ranks after canonicalization
  bool rank1 = false;                // route (a) verdict
  Tern conjugate_route = Tern::Undecided;  // route (b): qc ~ qc^c
  EquivVerdict conjugate_equiv;      // the underlying order verdicts
};

struct MaximalityVerdict {
  bool maximal = false;  // route (a); decided routes must agree
  MaximalityEvidence evidence;
};

// Maximality in the post-processing preorder, decided by the rank-1
// criterion and cross-checked against the conjugate equivalence route.
MaximalityVerdict is_maximal(const Povm& m, const FeasibilityOptions& opts = {});

// Spectral rank-1 refinement: every POVM is below its refinement, and the
// refinement is maximal. Outcome order: input effect order, then ascending
// eigenvalue; contributions below 1e-10 * lambda_max are dropped.
Povm maximal_refinement(const Povm& m);

// Two-outcome qubit observable with effects (1 +- eta axis.sigma)/2.
Povm noisy_observable(const std::array<double, 3>& axis, double eta);

// Fixtures.
Povm trivial_povm(int dim);
Povm trine_povm();
Povm random_povm(int dim, int outcomes, std::uint64_t seed);

}  // namespace qcompat

#endif
