// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/order.hpp"

#include <cmath>

#include "qcompat/errors.hpp"

namespace qcompat {

namespace {

std::string idx_label(const std::string& head, int a, int b) {
  return head + "[" + std::to_string(a) + "," + std::to_string(b) + "]";
}

// Unitality rows for a channel variable set Psi : A -> B laid out as one
// PSD block per (domain block i, codomain block j), row-major.
void add_unitality_constraints(const FdAlgebra& dom, const FdAlgebra& cod,
                               std::vector<Constraint>* out) {
  for (int j = 0; j < cod.num_blocks(); ++j) {
    const int k = cod.block_size(j);
    for (const auto& h : hermitian_basis(k)) {
      Constraint c;
      for (int i = 0; i < dom.num_blocks(); ++i) {
        const int n = dom.block_size(i);
        c.coeffs.emplace_back(i * cod.num_blocks() + j,
                              kron(CMatrix::Identity(n, n), h));
      }
      c.target = h.trace().real();
      c.label = idx_label("unitality", j, 0);
      out->push_back(std::move(c));
    }
  }
}

Channel channel_from_witness(const FdAlgebra& dom, const FdAlgebra& cod,
                             const std::vector<CMatrix>& witness) {
  Channel psi = Channel::zero(dom, cod);
  for (std::size_t k = 0; k < witness.size(); ++k) psi.choi[k] = witness[k];
  return psi;
}

}  // namespace

double action_distance(const Channel& a, const Channel& b) {
  if (a.domain != b.domain || a.codomain != b.codomain)
    fail(ErrorCode::AlgebraMismatch, "action distance of incomparable channels");
  double worst = 0.0;
  for (const auto& e : hermitian_element_basis(a.domain))
    worst = std::max(worst, (a.apply(e) - b.apply(e)).fnorm());
  return worst;
}

PreorderVerdict channel_leq(const Channel& phi1, const Channel& phi2,
                            const FeasibilityOptions& opts) {
  if (phi1.codomain != phi2.codomain)
    fail(ErrorCode::CodomainMismatch, "channels must share the codomain");
  const FdAlgebra& a1 = phi1.domain;
  const FdAlgebra& a2 = phi2.domain;
  const FdAlgebra& cod = phi1.codomain;

  std::vector<int> vars;
  for (int i = 0; i < a1.num_blocks(); ++i)
    for (int j = 0; j < a2.num_blocks(); ++j)
      vars.push_back(a1.block_size(i) * a2.block_size(j));

  std::vector<Constraint> cs;
  add_unitality_constraints(a1, a2, &cs);

  // Factorization phi2 . Psi = phi1, expanded in Hermitian bases:
  //   tr[G (phi2 . Psi)(H)] = sum_j tr[(H^T (x) phi2*_{jl}(G)) S_{ij}].
  for (int i = 0; i < a1.num_blocks(); ++i) {
    const int n = a1.block_size(i);
    for (int l = 0; l < cod.num_blocks(); ++l) {
      const int d = cod.block_size(l);
      for (const auto& h : hermitian_basis(n)) {
        const CMatrix image = apply_choi(phi1.choi_block(i, l), n, d, h);
        for (const auto& g : hermitian_basis(d)) {
          Constraint c;
          for (int j = 0; j < a2.num_blocks(); ++j) {
            const int k = a2.block_size(j);
            const CMatrix coeff = apply_choi_adjoint(phi2.choi_block(j, l), k, d, g);
            c.coeffs.emplace_back(i * a2.num_blocks() + j,
                                  kron(h.transpose(), coeff));
          }
          c.target = (g * image).trace().real();
          c.label = idx_label("factorization", i, l);
          cs.push_back(std::move(c));
        }
      }
    }
  }

  const FeasibilityProblem problem(vars, std::move(cs));
  const FeasibilityResult r = problem.solve(opts);

  PreorderVerdict verdict;
  verdict.iterations = r.iterations;
  switch (r.status) {
    case FeasStatus::Feasible: {
      verdict.holds = Tern::Yes;
      verdict.witness = channel_from_witness(a1, a2, r.witness);
      verdict.residual = action_distance(compose(phi2, *verdict.witness), phi1);
      break;
    }
    case FeasStatus::Infeasible:
      verdict.holds = Tern::No;
      verdict.gap = r.certificate_gap;
      break;
    case FeasStatus::Undecided:
      verdict.holds = Tern::Undecided;
      verdict.gap = r.certificate_gap;
      break;
  }
  return verdict;
}

EquivVerdict channel_equiv(const Channel& phi1, const Channel& phi2,
                           const FeasibilityOptions& opts) {
  EquivVerdict v;
  v.forward = channel_leq(phi1, phi2, opts);
  v.backward = channel_leq(phi2, phi1, opts);
  if (v.forward.holds == Tern::Undecided || v.backward.holds == Tern::Undecided)
    v.equivalent = Tern::Undecided;
  else if (v.forward.holds == Tern::Yes && v.backward.holds == Tern::Yes)
    v.equivalent = Tern::Yes;
  else
    v.equivalent = Tern::No;
  return v;
}

void require_valid(const StochasticKernel& k, double tol) {
  const auto& m = k.matrix;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) < -tol || m(i, j) > 1.0 + tol)
        fail(ErrorCode::ShapeMismatch, "kernel entry outside [0, 1]");
      col += m(i, j);
    }
    if (std::abs(col - 1.0) > tol * m.rows())
      fail(ErrorCode::ShapeMismatch, "kernel column does not sum to 1");
  }
}

PovmLeqVerdict povm_leq(const Povm& m, const Povm& n,
                        const FeasibilityOptions& opts) {
  if (m.dim != n.dim) fail(ErrorCode::DimMismatch, "POVMs on different spaces");
  require_valid(m);
  require_valid(n);
  const int km = m.num_outcomes();
  const int kn = n.num_outcomes();
  const int d = m.dim;

  // Variables: kappa_ij >= 0 as 1x1 PSD blocks, row-major in (i, j).
  std::vector<int> vars(static_cast<std::size_t>(km * kn), 1);
  std::vector<Constraint> cs;
  for (int j = 0; j < kn; ++j) {
    Constraint c;
    for (int i = 0; i < km; ++i)
      c.coeffs.emplace_back(i * kn + j, CMatrix::Identity(1, 1));
    c.target = 1.0;
    c.label = idx_label("column", j, 0);
    cs.push_back(std::move(c));
  }
  for (int i = 0; i < km; ++i) {
    for (const auto& g : hermitian_basis(d)) {
      Constraint c;
      for (int j = 0; j < kn; ++j) {
        const double w = (g * n.effects[static_cast<std::size_t>(j)]).trace().real();
        c.coeffs.emplace_back(i * kn + j, w * CMatrix::Identity(1, 1));
      }
      c.target = (g * m.effects[static_cast<std::size_t>(i)]).trace().real();
      c.label = idx_label("reconstruction", i, 0);
      cs.push_back(std::move(c));
    }
  }

  const FeasibilityProblem problem(vars, std::move(cs));
  // Effect reconstructions are Frobenius norms over d^2 coefficients; scale
  // the constraint tolerance down so they stay within feas_tol.
  FeasibilityOptions tight = opts;
  tight.feas_tol = opts.feas_tol / (2.0 * d);
  const FeasibilityResult r = problem.solve(tight);

  PovmLeqVerdict verdict;
  verdict.iterations = r.iterations;
  if (r.status == FeasStatus::Feasible) {
    verdict.holds = Tern::Yes;
    StochasticKernel kernel;
    kernel.matrix.resize(km, kn);
    for (int i = 0; i < km; ++i)
      for (int j = 0; j < kn; ++j)
        kernel.matrix(i, j) = r.witness[static_cast<std::size_t>(i * kn + j)](0, 0).real();
    for (int i = 0; i < km; ++i) {
      CMatrix rec = CMatrix::Zero(d, d);
      for (int j = 0; j < kn; ++j)
        rec += kernel.matrix(i, j) * n.effects[static_cast<std::size_t>(j)];
      verdict.residual = std::max(
          verdict.residual, (rec - m.effects[static_cast<std::size_t>(i)]).norm());
    }
    verdict.kernel = std::move(kernel);
  } else if (r.status == FeasStatus::Infeasible) {
    verdict.holds = Tern::No;
    verdict.gap = r.certificate_gap;
  } else {
    verdict.holds = Tern::Undecided;
    verdict.gap = r.certificate_gap;
  }
  return verdict;
}

PreorderVerdict experiment_leq(const StatExperiment& e, const StatExperiment& f,
                               const FeasibilityOptions& opts) {
  if (e.num_parameters() != f.num_parameters())
    fail(ErrorCode::ParameterMismatch, "experiments have different parameter sets");
  require_valid(e);
  require_valid(f);
  const FdAlgebra& ae = e.algebra;
  const FdAlgebra& af = f.algebra;

  std::vector<int> vars;
  for (int i = 0; i < ae.num_blocks(); ++i)
    for (int j = 0; j < af.num_blocks(); ++j)
      vars.push_back(ae.block_size(i) * af.block_size(j));

  std::vector<Constraint> cs;
  add_unitality_constraints(ae, af, &cs);

  // State matching: phi_theta(H) = psi_theta(Gamma(H)) for every Hermitian
  // basis element H of alg(e).
  for (int theta = 0; theta < e.num_parameters(); ++theta) {
    const auto& rho = e.states[static_cast<std::size_t>(theta)];
    const auto& sigma = f.states[static_cast<std::size_t>(theta)];
    for (int i = 0; i < ae.num_blocks(); ++i) {
      const int n = ae.block_size(i);
      for (const auto& h : hermitian_basis(n)) {
        Constraint c;
        for (int j = 0; j < af.num_blocks(); ++j) {
          c.coeffs.emplace_back(
              i * af.num_blocks() + j,
              kron(h.transpose(),
                   hermitize(sigma.block_data[static_cast<std::size_t>(j)])));
        }
        c.target =
            (rho.block_data[static_cast<std::size_t>(i)] * h).trace().real();
        c.label = idx_label("state", theta, i);
        cs.push_back(std::move(c));
      }
    }
  }

  const FeasibilityProblem problem(vars, std::move(cs));
  const FeasibilityResult r = problem.solve(opts);

  PreorderVerdict verdict;
  verdict.iterations = r.iterations;
  if (r.status == FeasStatus::Feasible) {
    verdict.holds = Tern::Yes;
    verdict.witness = channel_from_witness(ae, af, r.witness);
    // Worst state mismatch across parameters.
    for (int theta = 0; theta < e.num_parameters(); ++theta) {
      double acc = 0.0;
      for (const auto& h : hermitian_element_basis(ae)) {
        const double lhs = state_pairing(e.states[static_cast<std::size_t>(theta)], h);
        const double rhs = state_pairing(f.states[static_cast<std::size_t>(theta)],
                                         verdict.witness->apply(h));
        acc += (lhs - rhs) * (lhs - rhs);
      }
      verdict.residual = std::max(verdict.residual, std::sqrt(acc));
    }
  } else if (r.status == FeasStatus::Infeasible) {
    verdict.holds = Tern::No;
    verdict.gap = r.certificate_gap;
  } else {
    verdict.holds = Tern::Undecided;
    verdict.gap = r.certificate_gap;
  }
  return verdict;
}

}  // namespace qcompat
