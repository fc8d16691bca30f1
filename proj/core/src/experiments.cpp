// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/experiments.hpp"

#include "qcompat/errors.hpp"
#include "qcompat/order.hpp"

namespace qcompat {

void require_valid(const StatExperiment& e) {
  if (e.states.empty())
    fail(ErrorCode::InvalidExperiment, "empty parameter list");
  for (const auto& state : e.states) {
    check_element(e.algebra, state);
    double trace = 0.0;
    for (const auto& blk : state.block_data) {
      if (!is_hermitian(blk, 1e-8))
        fail(ErrorCode::InvalidExperiment, "state block is not Hermitian");
      if (blk.size() > 0 && min_eigenvalue(hermitize(blk)) < -1e-9)
        fail(ErrorCode::InvalidExperiment, "state block is not PSD");
      trace += blk.trace().real();
    }
    if (std::abs(trace - 1.0) > 1e-9)
      fail(ErrorCode::InvalidExperiment, "state is not normalized");
  }
}

double state_pairing(const AlgebraElement& state, const AlgebraElement& x) {
  check_element(state.algebra, x);
  double value = 0.0;
  for (std::size_t i = 0; i < state.block_data.size(); ++i)
    value += (state.block_data[i] * x.block_data[i]).trace().real();
  return value;
}

Channel associated_channel(const StatExperiment& e) {
  require_valid(e);
  const int k = e.num_parameters();
  Channel ch = Channel::zero(e.algebra, FdAlgebra::full(k));
  for (int i = 0; i < e.algebra.num_blocks(); ++i) {
    const int n = e.algebra.block_size(i);
    CMatrix& j = ch.choi_block(i, 0);
    for (int theta = 0; theta < k; ++theta) {
      const CMatrix rho_t =
          e.states[static_cast<std::size_t>(theta)]
              .block_data[static_cast<std::size_t>(i)]
              .transpose();
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          j(a * k + theta, b * k + theta) = rho_t(a, b);
    }
  }
  return ch;
}

Tern experiment_equiv(const StatExperiment& e, const StatExperiment& f,
                      const FeasibilityOptions& opts) {
  const PreorderVerdict fwd = experiment_leq(e, f, opts);
  const PreorderVerdict bwd = experiment_leq(f, e, opts);
  if (fwd.holds == Tern::Undecided || bwd.holds == Tern::Undecided)
    return Tern::Undecided;
  return (fwd.holds == Tern::Yes && bwd.holds == Tern::Yes) ? Tern::Yes
                                                            : Tern::No;
}

StatExperiment random_experiment(const FdAlgebra& alg, int num_states,
                                 std::uint64_t seed) {
  Rng rng(seed);
  StatExperiment e{alg, {}};
  for (int s = 0; s < num_states; ++s) {
    AlgebraElement state = AlgebraElement::zero(alg);
    double trace = 0.0;
    for (int i = 0; i < alg.num_blocks(); ++i) {
      const int n = alg.block_size(i);
      const CMatrix g = random_matrix(n, n, rng);
      state.block_data[static_cast<std::size_t>(i)] = hermitize(g * g.adjoint());
      trace += state.block_data[static_cast<std::size_t>(i)].trace().real();
    }
    for (auto& blk : state.block_data) blk /= trace;
    e.states.push_back(std::move(state));
  }
  return e;
}

}  // namespace qcompat
