#include <doctest.h>

#include "qcompat/errors.hpp"
#include "qcompat/feasibility.hpp"
#include "qcompat/numerics.hpp"

using namespace qcompat;

namespace {

Constraint trace_constraint(int var, int dim, double target) {
  Constraint c;
  c.coeffs.emplace_back(var, CMatrix::Identity(dim, dim));
  c.target = target;
  c.label = "trace";
  return c;
}

// Entrywise X = M for Hermitian M, expressed in a Hermitian coefficient basis.
std::vector<Constraint> entrywise_constraints(int var, const CMatrix& m) {
  std::vector<Constraint> cs;
  for (const auto& h : hermitian_basis(static_cast<int>(m.rows()))) {
    Constraint c;
    c.coeffs.emplace_back(var, h);
    c.target = (h * m).trace().real();
    c.label = "entry";
    cs.push_back(std::move(c));
  }
  return cs;
}

}  // namespace

TEST_CASE("trace-one problem is feasible") {
  FeasibilityProblem p({2}, {trace_constraint(0, 2, 1.0)});
  const FeasibilityResult r = p.solve();
  REQUIRE(r.status == FeasStatus::Feasible);
  CHECK(r.residual <= 1e-7);
  CHECK(std::abs(r.witness[0].trace().real() - 1.0) <= 1e-7);
  CHECK(min_eigenvalue(r.witness[0]) >= -1e-12);
  // Certificate soundness: the independent checker agrees.
  CHECK(p.residual_of(r.witness) <= 1e-7);
}

TEST_CASE("X = -I is infeasible with gap at least 1") {
  FeasibilityProblem p({2}, entrywise_constraints(0, -CMatrix::Identity(2, 2)));
  const FeasibilityResult r = p.solve();
  REQUIRE(r.status == FeasStatus::Infeasible);
  CHECK(r.certificate_gap >= 1.0);
}

TEST_CASE("planted-solution instances are feasible") {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix g = random_matrix(3, 3, rng);
    const CMatrix planted = hermitize(g * g.adjoint());
    std::vector<Constraint> cs;
    for (int k = 0; k < 10; ++k) {
      Constraint c;
      const CMatrix coeff = random_hermitian(3, rng);
      c.coeffs.emplace_back(0, coeff);
      c.target = (coeff * planted).trace().real();
      c.label = "planted";
      cs.push_back(std::move(c));
    }
    FeasibilityProblem p({3}, cs);
    const FeasibilityResult r = p.solve();
    REQUIRE(r.status == FeasStatus::Feasible);
    CHECK(r.residual <= 1e-7);
    CHECK(p.residual_of(r.witness) <= 1e-7);
  }
}

TEST_CASE("residual_of reference values") {
  FeasibilityProblem p({2}, {trace_constraint(0, 2, 1.0)});

  // Zero assignment vs tr(X) = 1.
  CHECK(p.residual_of({CMatrix::Zero(2, 2)}) == doctest::Approx(1.0));

  // Perturbing a feasible point by eps * I grows the trace residual linearly.
  const CMatrix x0 = 0.5 * CMatrix::Identity(2, 2);
  for (double eps : {0.01, 0.02, 0.04}) {
    const double res = p.residual_of({x0 + eps * CMatrix::Identity(2, 2)});
    CHECK(res == doctest::Approx(2.0 * eps).epsilon(1e-9));
  }

  // PSD defect contributes -lambda_min.
  CMatrix neg(2, 2);
  neg << 1.0, 0, 0, -0.25;
  CHECK(p.residual_of({neg}) == doctest::Approx(0.25 + 0.25).epsilon(1e-9));

  CHECK_THROWS_AS(p.residual_of({CMatrix::Zero(3, 3)}), Error);
}

TEST_CASE("verdicts are invariant under doubling all constraints") {
  Rng rng(29);
  for (int trial = 0; trial < 3; ++trial) {
    const CMatrix coeff = random_hermitian(2, rng);
    std::vector<Constraint> base = {trace_constraint(0, 2, 1.0)};
    Constraint extra;
    extra.coeffs.emplace_back(0, coeff);
    extra.target = 0.3;
    base.push_back(extra);

    std::vector<Constraint> doubled = base;
    for (auto& c : doubled) {
      for (auto& [v, m] : c.coeffs) m *= 2.0;
      c.target *= 2.0;
    }
    const FeasStatus s1 = FeasibilityProblem({2}, base).solve().status;
    const FeasStatus s2 = FeasibilityProblem({2}, doubled).solve().status;
    CHECK(s1 == s2);
  }

  // Also on an infeasible instance.
  std::vector<Constraint> inf = entrywise_constraints(0, -CMatrix::Identity(2, 2));
  std::vector<Constraint> inf2 = inf;
  for (auto& c : inf2) {
    for (auto& [v, m] : c.coeffs) m *= 2.0;
    c.target *= 2.0;
  }
  CHECK(FeasibilityProblem({2}, inf).solve().status ==
        FeasibilityProblem({2}, inf2).solve().status);
}

TEST_CASE("scalar blocks act as nonnegative variables") {
  // x + y = 1, x - y = 0.8 -> x = 0.9, y = 0.1.
  Constraint sum, diff;
  sum.coeffs = {{0, CMatrix::Identity(1, 1)}, {1, CMatrix::Identity(1, 1)}};
  sum.target = 1.0;
  diff.coeffs = {{0, CMatrix::Identity(1, 1)}, {1, -CMatrix::Identity(1, 1)}};
  diff.target = 0.8;
  FeasibilityProblem p({1, 1}, {sum, diff});
  const FeasibilityResult r = p.solve();
  REQUIRE(r.status == FeasStatus::Feasible);
  CHECK(r.witness[0](0, 0).real() == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(r.witness[1](0, 0).real() == doctest::Approx(0.1).epsilon(1e-6));

  // x + y = -1 has no nonnegative solution; the affine set is consistent, so
  // this exercises the alternating-projection gap path.
  Constraint neg = sum;
  neg.target = -1.0;
  const FeasibilityResult ri = FeasibilityProblem({1, 1}, {neg}).solve();
  REQUIRE(ri.status == FeasStatus::Infeasible);
  CHECK(ri.certificate_gap >= 0.5);
}

TEST_CASE("ill-formed problems are rejected") {
  Constraint bad;
  bad.coeffs.emplace_back(0, CMatrix::Identity(3, 3));  // wrong shape
  bad.target = 0.0;
  CHECK_THROWS_AS(FeasibilityProblem({2}, {bad}), Error);

  Constraint nonherm;
  CMatrix n(2, 2);
  n << 0, 1, 0, 0;
  nonherm.coeffs.emplace_back(0, n);
  CHECK_THROWS_AS(FeasibilityProblem({2}, {nonherm}), Error);

  Constraint out_of_range;
  out_of_range.coeffs.emplace_back(3, CMatrix::Identity(2, 2));
  CHECK_THROWS_AS(FeasibilityProblem({2}, {out_of_range}), Error);
}
