#include <doctest.h>

#include "qcompat/channel.hpp"
#include "qcompat/errors.hpp"

using namespace qcompat;

namespace {

CMatrix pauli(int k) {
  CMatrix s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: s = CMatrix::Identity(2, 2);
  }
  return s;
}

// Qubit depolarizing channel in the Heisenberg picture:
// A |-> eta A + (1 - eta) tr(A)/2 1. Choi = eta Omega + (1-eta)/2 I_4.
Channel depolarizing(double eta) {
  Channel ch = Channel::identity(FdAlgebra::full(2));
  ch.choi_block(0, 0) = eta * ch.choi_block(0, 0) +
                        (1.0 - eta) / 2.0 * CMatrix::Identity(4, 4);
  return ch;
}

// Lambda(A) = tr(A)/2 * 1_2 (the eta = 0 depolarizing channel).
Channel trace_state_channel() { return depolarizing(0.0); }

Povm projective_z() {
  Povm p;
  p.dim = 2;
  p.effects = {0.5 * (CMatrix::Identity(2, 2) + pauli(3)),
               0.5 * (CMatrix::Identity(2, 2) - pauli(3))};
  return p;
}

AlgebraElement single_block(const FdAlgebra& alg, int i, const CMatrix& m) {
  AlgebraElement x = AlgebraElement::zero(alg);
  x.block_data[static_cast<std::size_t>(i)] = m;
  return x;
}

// Rebuilds Choi blocks from the channel action on matrix units.
Channel choi_from_action(const Channel& ch) {
  Channel out = Channel::zero(ch.domain, ch.codomain);
  for (int i = 0; i < ch.domain.num_blocks(); ++i) {
    const int n = ch.domain.block_size(i);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const AlgebraElement img =
            ch.apply(single_block(ch.domain, i, matrix_unit(n, a, b)));
        for (int l = 0; l < ch.codomain.num_blocks(); ++l) {
          const int d = ch.codomain.block_size(l);
          out.choi_block(i, l).block(a * d, b * d, d, d) =
              img.block_data[static_cast<std::size_t>(l)];
        }
      }
  }
  return out;
}

double choi_distance(const Channel& a, const Channel& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.choi.size(); ++k)
    m = std::max(m, (a.choi[k] - b.choi[k]).norm());
  return m;
}

}  // namespace

TEST_CASE("validate: identity, transpose, unnormalized trace map") {
  const Channel id = Channel::identity(FdAlgebra::full(2));
  const ValidationReport rid = validate(id);
  CHECK(rid.is_cp);
  CHECK(rid.is_unital);

  // Transpose map: Choi is the swap operator, which has eigenvalue -1.
  Channel transpose = Channel::zero(FdAlgebra::full(2), FdAlgebra::full(2));
  CMatrix& j = transpose.choi_block(0, 0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) j.block(a * 2, b * 2, 2, 2) = matrix_unit(2, b, a);
  CHECK(min_eigenvalue(j) == doctest::Approx(-1.0).epsilon(1e-10));
  const ValidationReport rt = validate(transpose);
  CHECK_FALSE(rt.is_cp);
  CHECK(rt.is_unital);

  // A |-> tr(A) 1_2: CP but Lambda(1) = 2 * 1.
  Channel unnormalized = trace_state_channel();
  unnormalized.choi_block(0, 0) *= 2.0;
  const ValidationReport ru = validate(unnormalized);
  CHECK(ru.is_cp);
  CHECK_FALSE(ru.is_unital);
}

TEST_CASE("compose with identities and depolarizing product rule") {
  const Channel id = Channel::identity(FdAlgebra::full(2));
  const Channel dep = depolarizing(0.7);
  CHECK(choi_distance(compose(id, dep), dep) <= 1e-12);
  CHECK(choi_distance(compose(dep, id), dep) <= 1e-12);

  // Oracle: act on the Pauli basis. dep_a . dep_b scales traceless Paulis by
  // a * b and fixes the identity.
  const Channel prod = compose(depolarizing(0.8), depolarizing(0.5));
  const Channel expected = depolarizing(0.4);
  for (int k = 0; k < 4; ++k) {
    const AlgebraElement x = single_block(FdAlgebra::full(2), 0, pauli(k));
    CHECK((prod.apply(x).block_data[0] - expected.apply(x).block_data[0]).norm() <=
          1e-9);
  }
  CHECK(choi_distance(prod, expected) <= 1e-9);
}

TEST_CASE("compose is associative on random triples") {
  Rng seeds(101);
  for (int trial = 0; trial < 5; ++trial) {
    const Channel a = random_channel(FdAlgebra{{2, 1}}, FdAlgebra::full(2),
                                     seeds.next_u64());
    const Channel b = random_channel(FdAlgebra::full(3), FdAlgebra{{2, 1}},
                                     seeds.next_u64());
    const Channel c = random_channel(FdAlgebra{{1, 1}}, FdAlgebra::full(3),
                                     seeds.next_u64());
    CHECK(choi_distance(compose(compose(a, b), c), compose(a, compose(b, c))) <=
          1e-9);
  }
}

TEST_CASE("tensor_map: identity factors and action factorization") {
  const Channel id2 = Channel::identity(FdAlgebra::full(2));
  const Channel idt = tensor_map(id2, id2);
  CHECK(idt.domain.blocks == std::vector<int>{4});
  CHECK(choi_distance(idt, Channel::identity(FdAlgebra::full(4))) <= 1e-12);

  // Index-permutation oracle for a random single-block pair: the tensor Choi
  // is P (J_a (x) J_b) P* with P permuting the middle tensor factors.
  const Channel a = random_channel(FdAlgebra::full(2), FdAlgebra::full(2), 7);
  const Channel b = random_channel(FdAlgebra::full(2), FdAlgebra::full(3), 8);
  const Channel t = tensor_map(a, b);
  const int n = 2, k = 2, dl = 2, em = 3;
  CMatrix perm = CMatrix::Zero(n * k * dl * em, n * dl * k * em);
  for (int aa = 0; aa < n; ++aa)
    for (int al = 0; al < dl; ++al)
      for (int u = 0; u < k; ++u)
        for (int g = 0; g < em; ++g)
          perm(((aa * k + u) * dl + al) * em + g,
               ((aa * dl + al) * k + u) * em + g) = 1.0;
  const CMatrix expected =
      perm * kron(a.choi_block(0, 0), b.choi_block(0, 0)) * perm.adjoint();
  CHECK((t.choi_block(0, 0) - expected).norm() <= 1e-10);

  // Product of two trace-state channels has a rank-one output functional.
  const Channel tt = tensor_map(trace_state_channel(), trace_state_channel());
  const ValidationReport r = validate(tt);
  CHECK(r.is_cp);
  CHECK(r.is_unital);
}

TEST_CASE("kraus_decompose: counts and reconstruction") {
  const KrausForm id_form = kraus_decompose(Channel::identity(FdAlgebra::full(2)));
  REQUIRE(id_form.ops[0].size() == 1);
  CHECK((id_form.ops[0][0].adjoint() * id_form.ops[0][0] -
         CMatrix::Identity(2, 2)).norm() <= 1e-10);

  // Choi of A |-> tr(A)/2 1 is I_4 / 2: rank 4.
  CHECK(kraus_decompose(trace_state_channel()).ops[0].size() == 4);

  // QC channel of a projective qubit POVM: each component has Choi rank 1.
  const KrausForm qc = kraus_decompose(qc_channel(projective_z()));
  CHECK(qc.ops[0].size() == 1);
  CHECK(qc.ops[1].size() == 1);

  // Reconstruction on a random channel.
  const Channel ch = random_channel(FdAlgebra{{2, 2}}, FdAlgebra::full(3), 55);
  const KrausForm form = kraus_decompose(ch);
  for (int i = 0; i < 2; ++i) {
    const int n = 2, m = 3;
    for (int aa = 0; aa < n; ++aa)
      for (int bb = 0; bb < n; ++bb) {
        CMatrix img = CMatrix::Zero(m, m);
        for (const auto& op : form.ops[static_cast<std::size_t>(ch.block_index(i, 0))])
          img += op.adjoint() * matrix_unit(n, aa, bb) * op;
        CHECK((img - ch.choi_block(i, 0).block(aa * m, bb * m, m, m)).norm() <=
              1e-9);
      }
  }

  CHECK_THROWS_AS(kraus_decompose([] {
                    Channel bad = Channel::identity(FdAlgebra::full(2));
                    bad.choi_block(0, 0) = -bad.choi_block(0, 0);
                    return bad;
                  }()),
                  Error);
}

TEST_CASE("qc_channel basics") {
  Povm trivial;
  trivial.dim = 2;
  trivial.effects = {CMatrix::Identity(2, 2)};
  const Channel triv = qc_channel(trivial);
  CHECK(triv.domain.blocks == std::vector<int>{1});
  const AlgebraElement c = AlgebraElement::identity(triv.domain);
  CHECK((triv.apply(c).block_data[0] - CMatrix::Identity(2, 2)).norm() <= 1e-12);

  Povm coin;
  coin.dim = 2;
  coin.effects = {0.5 * CMatrix::Identity(2, 2), 0.5 * CMatrix::Identity(2, 2)};
  const Channel fair = qc_channel(coin);
  AlgebraElement f = AlgebraElement::zero(fair.domain);
  f.block_data[0](0, 0) = 0.2;
  f.block_data[1](0, 0) = 0.6;
  CHECK((fair.apply(f).block_data[0] - 0.4 * CMatrix::Identity(2, 2)).norm() <=
        1e-12);

  const Channel proj = qc_channel(projective_z());
  AlgebraElement g = AlgebraElement::zero(proj.domain);
  g.block_data[0](0, 0) = 2.0;
  g.block_data[1](0, 0) = -1.0;
  const CMatrix expected = 2.0 * projective_z().effects[0] -
                           1.0 * projective_z().effects[1];
  CHECK((proj.apply(g).block_data[0] - expected).norm() <= 1e-12);
  const ValidationReport r = validate(proj);
  CHECK(r.is_cp);
  CHECK(r.is_unital);
}

TEST_CASE("povm_from_commutative_channel round trip") {
  const Povm p = projective_z();
  const Povm back = povm_from_commutative_channel(qc_channel(p));
  REQUIRE(back.num_outcomes() == 2);
  for (int i = 0; i < 2; ++i)
    CHECK((back.effects[i] - p.effects[i]).norm() <= 1e-10);

  // Constant channel from C^2 with both images 1/2.
  Povm coin;
  coin.dim = 2;
  coin.effects = {0.5 * CMatrix::Identity(2, 2), 0.5 * CMatrix::Identity(2, 2)};
  const Povm coins = povm_from_commutative_channel(qc_channel(coin));
  CHECK((coins.effects[0] - 0.5 * CMatrix::Identity(2, 2)).norm() <= 1e-12);

  // Random commutative-domain channel: images always form a POVM.
  const Channel rnd = random_channel(FdAlgebra::classical(3), FdAlgebra::full(2), 9);
  const Povm rp = povm_from_commutative_channel(rnd);
  CHECK(rp.num_outcomes() == 3);

  CHECK_THROWS_AS(povm_from_commutative_channel(Channel::identity(FdAlgebra::full(2))),
                  Error);
}

TEST_CASE("complementary_channel environments") {
  // Unitary conjugation: Choi rank 1, complementary is the constant map from C.
  Rng rng(77);
  const CMatrix u = random_unitary(2, rng);
  Channel unitary = Channel::zero(FdAlgebra::full(2), FdAlgebra::full(2));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      unitary.choi_block(0, 0).block(a * 2, b * 2, 2, 2) =
          u.adjoint() * matrix_unit(2, a, b) * u;
  const Channel comp = complementary_channel(unitary);
  CHECK(comp.domain.blocks == std::vector<int>{1});
  CHECK((comp.choi_block(0, 0) - CMatrix::Identity(2, 2)).norm() <= 1e-10);

  const Channel comp_id = complementary_channel(Channel::identity(FdAlgebra::full(2)));
  CHECK(comp_id.domain.blocks == std::vector<int>{1});

  // Depolarizing to the maximally mixed state: environment dimension 4.
  const Channel comp_dep = complementary_channel(trace_state_channel());
  CHECK(comp_dep.domain.blocks == std::vector<int>{4});
  const ValidationReport r = validate(comp_dep);
  CHECK(r.is_cp);
  CHECK(r.is_unital);

  CHECK_THROWS_AS(complementary_channel(qc_channel(projective_z())), Error);
}

TEST_CASE("random_channel contract") {
  const FdAlgebra dom{{2, 1}};
  const FdAlgebra cod = FdAlgebra::full(2);
  const Channel a = random_channel(dom, cod, 42);
  const ValidationReport r = validate(a);
  CHECK(r.is_cp);
  CHECK(r.is_unital);

  const Channel b = random_channel(dom, cod, 42);
  CHECK(choi_distance(a, b) == 0.0);  // bitwise determinism

  int distinct = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Channel c = random_channel(dom, cod, 1000 + s);
    if (choi_distance(a, c) > 1e-6) ++distinct;
  }
  CHECK(distinct == 100);
}

TEST_CASE("Choi/action round trip") {
  const Channel ch = random_channel(FdAlgebra{{2, 3}}, FdAlgebra{{2, 1}}, 5);
  CHECK(choi_distance(choi_from_action(ch), ch) <= 1e-10);
}
