#include <doctest.h>

#include "qcompat/errors.hpp"
#include "qcompat/povmtools.hpp"

using namespace qcompat;

namespace {

CMatrix pauli_z() {
  CMatrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

Povm sharp_z() { return noisy_observable({0, 0, 1}, 1.0); }

}  // namespace

TEST_CASE("canonicalize drops zero effects") {
  Povm p = sharp_z();
  p.effects.push_back(CMatrix::Zero(2, 2));
  const CanonicalPovm c = canonicalize(p);
  CHECK(c.povm.num_outcomes() == 2);
  require_valid(c.merge_map);
}

TEST_CASE("canonicalize merges proportional effects to the trivial POVM") {
  Povm p;
  p.dim = 2;
  p.effects = {0.25 * CMatrix::Identity(2, 2), 0.25 * CMatrix::Identity(2, 2),
               0.5 * CMatrix::Identity(2, 2)};
  const CanonicalPovm c = canonicalize(p);
  REQUIRE(c.povm.num_outcomes() == 1);
  CHECK((c.povm.effects[0] - CMatrix::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("canonicalize merges a split effect and stays equivalent") {
  const Povm base = sharp_z();
  Povm split;
  split.dim = 2;
  split.effects = {0.5 * base.effects[0], 0.5 * base.effects[0], base.effects[1]};
  const CanonicalPovm c = canonicalize(split);
  REQUIRE(c.povm.num_outcomes() == 2);
  // Order-insensitive match: {P0, P1} up to the canonical outcome ordering.
  for (const auto& e : c.povm.effects) {
    const double d0 = (e - base.effects[0]).norm();
    const double d1 = (e - base.effects[1]).norm();
    CHECK(std::min(d0, d1) <= 1e-10);
  }

  // Post-processing equivalence of input and canonical form.
  CHECK(povm_leq(c.povm, split).holds == Tern::Yes);
  CHECK(povm_leq(split, c.povm).holds == Tern::Yes);

  // The merge map reconstructs the canonical effects from the input.
  for (int i = 0; i < c.povm.num_outcomes(); ++i) {
    CMatrix rec = CMatrix::Zero(2, 2);
    for (int j = 0; j < split.num_outcomes(); ++j)
      rec += c.merge_map.matrix(i, j) * split.effects[static_cast<std::size_t>(j)];
    CHECK((rec - c.povm.effects[static_cast<std::size_t>(i)]).norm() <= 1e-10);
  }
}

TEST_CASE("canonicalize is idempotent and deterministic") {
  const Povm p = random_povm(2, 4, 314);
  const CanonicalPovm once = canonicalize(p);
  const CanonicalPovm twice = canonicalize(once.povm);
  REQUIRE(once.povm.num_outcomes() == twice.povm.num_outcomes());
  for (int i = 0; i < once.povm.num_outcomes(); ++i)
    CHECK((once.povm.effects[static_cast<std::size_t>(i)] -
           twice.povm.effects[static_cast<std::size_t>(i)]).norm() <= 1e-10);

  // No zero and no proportional effects remain.
  for (const auto& e : once.povm.effects) CHECK(e.norm() > 1e-8);
  for (std::size_t a = 0; a < once.povm.effects.size(); ++a)
    for (std::size_t b = a + 1; b < once.povm.effects.size(); ++b) {
      const CMatrix na = once.povm.effects[a] / once.povm.effects[a].trace().real();
      const CMatrix nb = once.povm.effects[b] / once.povm.effects[b].trace().real();
      CHECK((na - nb).norm() > 1e-8);
    }
}

TEST_CASE("is_maximal: sharp, trivial, trine") {
  const MaximalityVerdict sharp = is_maximal(sharp_z());
  CHECK(sharp.maximal);
  CHECK(sharp.evidence.conjugate_route == Tern::Yes);

  const MaximalityVerdict trivial = is_maximal(trivial_povm(2));
  CHECK_FALSE(trivial.maximal);
  CHECK(trivial.evidence.canonical_ranks == std::vector<int>{2});
  CHECK(trivial.evidence.conjugate_route == Tern::No);

  const MaximalityVerdict trine = is_maximal(trine_povm());
  CHECK(trine.maximal);
  CHECK(trine.evidence.canonical_ranks == std::vector<int>{1, 1, 1});
}

TEST_CASE("maximality is preserved by canonicalization") {
  Povm split;
  split.dim = 2;
  split.effects = {0.5 * sharp_z().effects[0], 0.5 * sharp_z().effects[0],
                   sharp_z().effects[1]};
  const CanonicalPovm c = canonicalize(split);
  CHECK(is_maximal(c.povm).maximal);
  CHECK(is_maximal(split).maximal);  // canonicalization happens inside
}

TEST_CASE("maximal_refinement of the trivial POVM is an orthonormal projective POVM") {
  const Povm r = maximal_refinement(trivial_povm(2));
  REQUIRE(r.num_outcomes() == 2);
  for (const auto& e : r.effects) {
    CHECK(psd_rank(e) == 1);
    CHECK((e * e - e).norm() <= 1e-10);  // projections
  }
  CHECK(is_maximal(r).maximal);
}

TEST_CASE("maximal_refinement fixes rank-1 POVMs up to ordering") {
  const Povm r = maximal_refinement(trine_povm());
  REQUIRE(r.num_outcomes() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK((r.effects[static_cast<std::size_t>(i)] -
           trine_povm().effects[static_cast<std::size_t>(i)]).norm() <= 1e-9);
}

TEST_CASE("maximal_refinement of a noisy observable has the spectral weights") {
  const Povm r = maximal_refinement(noisy_observable({0, 0, 1}, 0.5));
  REQUIRE(r.num_outcomes() == 4);
  std::vector<double> weights;
  for (const auto& e : r.effects) weights.push_back(e.trace().real());
  std::sort(weights.begin(), weights.end());
  CHECK(weights[0] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(weights[1] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(weights[2] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(weights[3] == doctest::Approx(0.75).epsilon(1e-10));
  // All effects diagonal in the sigma_z eigenbasis.
  for (const auto& e : r.effects) {
    CHECK(std::abs(e(0, 1)) <= 1e-10);
    CHECK(std::abs(e(1, 0)) <= 1e-10);
  }
}

TEST_CASE("every POVM is below its maximal refinement") {
  for (std::uint64_t seed : {10, 11, 12}) {
    const Povm m = random_povm(2, 3, seed);
    const Povm r = maximal_refinement(m);
    CHECK(is_maximal(r).maximal);
    const PovmLeqVerdict v = povm_leq(m, r);
    REQUIRE(v.holds == Tern::Yes);
    CHECK(v.residual <= 1e-7);
  }
}

TEST_CASE("noisy_observable endpoints and spectra") {
  const Povm sharp = noisy_observable({0, 0, 1}, 1.0);
  CHECK((sharp.effects[0] - 0.5 * (CMatrix::Identity(2, 2) + pauli_z())).norm() <=
        1e-12);

  const Povm flat = noisy_observable({1, 0, 0}, 0.0);
  CHECK((flat.effects[0] - 0.5 * CMatrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((flat.effects[1] - 0.5 * CMatrix::Identity(2, 2)).norm() <= 1e-12);

  const Povm tilted = noisy_observable({1, 0, 0}, 0.5);
  const HermEig eig = herm_eig(tilted.effects[0]);
  CHECK(eig.eigenvalues(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(eig.eigenvalues(1) == doctest::Approx(0.75).epsilon(1e-12));

  CHECK_THROWS_AS(noisy_observable({1, 1, 0}, 0.5), Error);
  CHECK_THROWS_AS(noisy_observable({0, 0, 1}, 1.5), Error);
}
