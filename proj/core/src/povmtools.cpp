// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/povmtools.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qcompat/dilation.hpp"
#include "qcompat/errors.hpp"

namespace qcompat {

namespace {

bool lex_less(const CMatrix& a, const CMatrix& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j).real() != b(i, j).real()) return a(i, j).real() < b(i, j).real();
      if (a(i, j).imag() != b(i, j).imag()) return a(i, j).imag() < b(i, j).imag();
    }
  return false;
}

void fix_phase(CVector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-8) {
      v *= std::conj(v(k)) / std::abs(v(k));
      return;
    }
  }
}

}  // namespace

CanonicalPovm canonicalize(const Povm& m) {
  require_valid(m);
  const int k = m.num_outcomes();
  const int d = m.dim;
  const double zero_cut = 1e-10 * (1.0 + d);

  // Group outcomes: zeros into a sink, proportional effects together.
  // Proportionality is tested on trace-normalized effects.
  std::vector<int> group(static_cast<std::size_t>(k), -1);
  std::vector<CMatrix> reps;  // normalized representative per group
  std::vector<int> zero_outcomes;
  for (int i = 0; i < k; ++i) {
    const CMatrix& e = m.effects[static_cast<std::size_t>(i)];
    if (e.norm() <= zero_cut) {
      zero_outcomes.push_back(i);
      continue;
    }
    const CMatrix normalized = e / e.trace().real();
    bool placed = false;
    for (std::size_t g = 0; g < reps.size(); ++g) {
      if ((normalized - reps[g]).norm() <= 1e-8) {
        group[static_cast<std::size_t>(i)] = static_cast<int>(g);
        placed = true;
        break;
      }
    }
    if (!placed) {
      group[static_cast<std::size_t>(i)] = static_cast<int>(reps.size());
      reps.push_back(normalized);
    }
  }
  if (reps.empty()) fail(ErrorCode::InvalidPovm, "all effects are zero");

  std::vector<CMatrix> merged(reps.size(), CMatrix::Zero(d, d));
  for (int i = 0; i < k; ++i)
    if (group[static_cast<std::size_t>(i)] >= 0)
      merged[static_cast<std::size_t>(group[static_cast<std::size_t>(i)])] +=
          m.effects[static_cast<std::size_t>(i)];

  // Deterministic output order: descending trace, ties lexicographic.
  std::vector<int> order(merged.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ta = merged[static_cast<std::size_t>(a)].trace().real();
    const double tb = merged[static_cast<std::size_t>(b)].trace().real();
    if (std::abs(ta - tb) > 1e-12) return ta > tb;
    return lex_less(merged[static_cast<std::size_t>(a)],
                    merged[static_cast<std::size_t>(b)]);
  });
  std::vector<int> position(merged.size());
  for (std::size_t p = 0; p < order.size(); ++p)
    position[static_cast<std::size_t>(order[p])] = static_cast<int>(p);

  CanonicalPovm out;
  out.povm.dim = d;
  for (int idx : order) out.povm.effects.push_back(merged[static_cast<std::size_t>(idx)]);
  require_valid(out.povm);

  out.merge_map.matrix = RMatrix::Zero(static_cast<Eigen::Index>(merged.size()), k);
  for (int i = 0; i < k; ++i) {
    const int g = group[static_cast<std::size_t>(i)];
    // Zero effects carry no weight; route them to the first outcome so the
    // kernel stays column-stochastic.
    const int target = g >= 0 ? position[static_cast<std::size_t>(g)] : 0;
    out.merge_map.matrix(target, i) = 1.0;
  }
  return out;
}

MaximalityVerdict is_maximal(const Povm& m, const FeasibilityOptions& opts) {
  require_valid(m);
  MaximalityVerdict verdict;

  const CanonicalPovm canonical = canonicalize(m);
  bool rank1 = true;
  for (const auto& e : canonical.povm.effects) {
    const int r = psd_rank(hermitize(e));
    verdict.evidence.canonical_ranks.push_back(r);
    if (r != 1) rank1 = false;
  }
  verdict.evidence.rank1 = rank1;
  verdict.maximal = rank1;

  const Channel qc = qc_channel(m);
  verdict.evidence.conjugate_equiv = channel_equiv(qc, commutant_conjugate(qc), opts);
  verdict.evidence.conjugate_route = verdict.evidence.conjugate_equiv.equivalent;

  if (verdict.evidence.conjugate_route != Tern::Undecided &&
      (verdict.evidence.conjugate_route == Tern::Yes) != rank1)
    fail(ErrorCode::NumericalFailure,
         "rank-1 and conjugate maximality routes disagree");
  return verdict;
}

Povm maximal_refinement(const Povm& m) {
  require_valid(m);
  Povm out;
  out.dim = m.dim;
  for (const auto& effect : m.effects) {
    const HermEig eig = herm_eig(hermitize(effect));
    const double lmax = std::max(eig.eigenvalues.maxCoeff(), 0.0);
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
      const double lambda = eig.eigenvalues(k);
      if (lambda <= 1e-10 * lmax || lambda <= 0.0) continue;
      CVector v = eig.eigenvectors.col(k);
      fix_phase(v);
      out.effects.push_back(lambda * v * v.adjoint());
    }
  }
  require_valid(out);
  return out;
}

Povm noisy_observable(const std::array<double, 3>& axis, double eta) {
  const double norm =
      std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (std::abs(norm - 1.0) > 1e-9)
    fail(ErrorCode::BadAxis, "axis must be a unit vector");
  if (eta < 0.0 || eta > 1.0) fail(ErrorCode::BadEta, "eta must lie in [0, 1]");
  CMatrix bloch(2, 2);
  bloch << axis[2], Complex(axis[0], -axis[1]), Complex(axis[0], axis[1]),
      -axis[2];
  Povm p;
  p.dim = 2;
  p.effects = {0.5 * (CMatrix::Identity(2, 2) + eta * bloch),
               0.5 * (CMatrix::Identity(2, 2) - eta * bloch)};
  return p;
}

Povm trivial_povm(int dim) {
  Povm p;
  p.dim = dim;
  p.effects = {CMatrix::Identity(dim, dim)};
  return p;
}

Povm trine_povm() {
  Povm p;
  p.dim = 2;
  CMatrix sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  for (int k = 0; k < 3; ++k) {
    const double th = 2.0 * M_PI * k / 3.0;
    p.effects.push_back(
        (CMatrix::Identity(2, 2) + std::cos(th) * sz + std::sin(th) * sx) / 3.0);
  }
  return p;
}

Povm random_povm(int dim, int outcomes, std::uint64_t seed) {
  Rng rng(seed);
  const CMatrix t = random_isometry(dim * outcomes, dim, rng);
  Povm p;
  p.dim = dim;
  for (int i = 0; i < outcomes; ++i) {
    const CMatrix w = t.middleRows(dim * i, dim);
    p.effects.push_back(w.adjoint() * w);
  }
  return p;
}

}  // namespace qcompat
