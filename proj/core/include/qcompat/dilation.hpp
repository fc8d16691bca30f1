// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_DILATION_HPP
#define QCOMPAT_DILATION_HPP

#include "qcompat/channel.hpp"

namespace qcompat {

// Minimal Stinespring representation of a CP unital channel into M_d:
// Lambda(A) = V^* pi(A) V with pi the standard representation of the domain
// with multiplicities equal to the component Choi ranks.
struct StinespringRep {
  Channel channel;
  Representation rep;  // acts on C^K, K = sum n_i m_i
  CMatrix isometry;    // V, K x d

  const std::vector<int>& env_mults() const { return rep.multiplicities; }
  int total_dim() const { return rep.space_dim; }
};

StinespringRep minimal_stinespring(const Channel& ch);

// Commutant conjugate channel: B |-> V^* B V on pi(A)' = (+) 1_{n_i} (x) M_{m_i}.
// Domain blocks are the nonzero multiplicities in block order.
Channel commutant_conjugate(const Channel& ch);

struct NaimarkDilation {
  Povm povm;
  std::vector<CMatrix> pvm_projections;  // K x K, mutually orthogonal, sum 1
  CMatrix isometry;                      // V, K x d
  int total_dim = 0;                     // K = sum rank(M_i)
};

NaimarkDilation naimark_dilation(const Povm& povm);

// Block-diagonal intertwiner W in pi(A)' with W V1 = V2, solved by least
// squares from two minimal Stinespring representations of the same channel.
// Used to exhibit the uniqueness-up-to-unitary mechanism.
CMatrix solve_intertwiner(const StinespringRep& from, const StinespringRep& to);

}  // namespace qcompat

#endif
