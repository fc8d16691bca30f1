// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/compat.hpp"

#include <cmath>

#include "qcompat/errors.hpp"

namespace qcompat {

namespace {

void require_common_full_codomain(const Channel& lambda, const Channel& gamma) {
  if (lambda.codomain != gamma.codomain)
    fail(ErrorCode::CodomainMismatch, "channels must share the codomain");
  if (lambda.codomain.num_blocks() != 1)
    fail(ErrorCode::CodomainMismatch,
         "compatibility oracles need a full matrix block input space");
}

}  // namespace

AlgebraElement lift_first(const FdAlgebra& a, const FdAlgebra& b,
                          const AlgebraElement& x) {
  check_element(a, x);
  AlgebraElement out = AlgebraElement::zero(algebra_tensor(a, b));
  for (int i = 0; i < a.num_blocks(); ++i)
    for (int j = 0; j < b.num_blocks(); ++j)
      out.block_data[static_cast<std::size_t>(i * b.num_blocks() + j)] =
          kron(x.block_data[static_cast<std::size_t>(i)],
               CMatrix::Identity(b.block_size(j), b.block_size(j)));
  return out;
}

AlgebraElement lift_second(const FdAlgebra& a, const FdAlgebra& b,
                           const AlgebraElement& x) {
  check_element(b, x);
  AlgebraElement out = AlgebraElement::zero(algebra_tensor(a, b));
  for (int i = 0; i < a.num_blocks(); ++i)
    for (int j = 0; j < b.num_blocks(); ++j)
      out.block_data[static_cast<std::size_t>(i * b.num_blocks() + j)] =
          kron(CMatrix::Identity(a.block_size(i), a.block_size(i)),
               x.block_data[static_cast<std::size_t>(j)]);
  return out;
}

CompatVerdict compatible_channels(const Channel& lambda, const Channel& gamma,
                                  const FeasibilityOptions& opts) {
  require_common_full_codomain(lambda, gamma);
  const FdAlgebra& a = lambda.domain;
  const FdAlgebra& b = gamma.domain;
  const int d = lambda.codomain.block_size(0);

  std::vector<int> vars;
  for (int i = 0; i < a.num_blocks(); ++i)
    for (int j = 0; j < b.num_blocks(); ++j)
      vars.push_back(a.block_size(i) * b.block_size(j) * d);

  std::vector<Constraint> cs;
  // Theta(A (x) 1_B) = Lambda(A).
  for (int i = 0; i < a.num_blocks(); ++i) {
    const int n = a.block_size(i);
    for (const auto& h : hermitian_basis(n)) {
      const CMatrix image = apply_choi(lambda.choi_block(i, 0), n, d, h);
      for (const auto& g : hermitian_basis(d)) {
        Constraint c;
        for (int j = 0; j < b.num_blocks(); ++j) {
          const int k = b.block_size(j);
          c.coeffs.emplace_back(
              i * b.num_blocks() + j,
              kron(kron(h.transpose(), CMatrix::Identity(k, k)), g));
        }
        c.target = (g * image).trace().real();
        c.label = "marginal_lambda[" + std::to_string(i) + "]";
        cs.push_back(std::move(c));
      }
    }
  }
  // Theta(1_A (x) B) = Gamma(B).
  for (int j = 0; j < b.num_blocks(); ++j) {
    const int k = b.block_size(j);
    for (const auto& f : hermitian_basis(k)) {
      const CMatrix image = apply_choi(gamma.choi_block(j, 0), k, d, f);
      for (const auto& g : hermitian_basis(d)) {
        Constraint c;
        for (int i = 0; i < a.num_blocks(); ++i) {
          const int n = a.block_size(i);
          c.coeffs.emplace_back(
              i * b.num_blocks() + j,
              kron(kron(CMatrix::Identity(n, n), f.transpose()), g));
        }
        c.target = (g * image).trace().real();
        c.label = "marginal_gamma[" + std::to_string(j) + "]";
        cs.push_back(std::move(c));
      }
    }
  }

  const FeasibilityProblem problem(vars, std::move(cs));
  const FeasibilityResult r = problem.solve(opts);

  CompatVerdict verdict;
  verdict.iterations = r.iterations;
  if (r.status == FeasStatus::Feasible) {
    verdict.compatible = Tern::Yes;
    JointChannelCertificate cert;
    cert.joint = Channel::zero(algebra_tensor(a, b), lambda.codomain);
    for (std::size_t k = 0; k < r.witness.size(); ++k)
      cert.joint.choi[k] = r.witness[k];
    for (const auto& e : hermitian_element_basis(a))
      cert.marginal_residual_lambda = std::max(
          cert.marginal_residual_lambda,
          (cert.joint.apply(lift_first(a, b, e)) - lambda.apply(e)).fnorm());
    for (const auto& e : hermitian_element_basis(b))
      cert.marginal_residual_gamma = std::max(
          cert.marginal_residual_gamma,
          (cert.joint.apply(lift_second(a, b, e)) - gamma.apply(e)).fnorm());
    verdict.certificate = std::move(cert);
  } else if (r.status == FeasStatus::Infeasible) {
    verdict.compatible = Tern::No;
    verdict.gap = r.certificate_gap;
  } else {
    verdict.compatible = Tern::Undecided;
    verdict.gap = r.certificate_gap;
  }
  return verdict;
}

PreorderVerdict compatible_via_conjugate(const Channel& lambda,
                                         const Channel& gamma,
                                         const FeasibilityOptions& opts) {
  require_common_full_codomain(lambda, gamma);
  return channel_leq(gamma, commutant_conjugate(lambda), opts);
}

JointMeasVerdict jointly_measurable(const Povm& m1, const Povm& m2,
                                    const FeasibilityOptions& opts) {
  if (m1.dim != m2.dim) fail(ErrorCode::DimMismatch, "POVMs on different spaces");
  require_valid(m1);
  require_valid(m2);
  const int d = m1.dim;
  const int k1 = m1.num_outcomes();
  const int k2 = m2.num_outcomes();

  std::vector<int> vars(static_cast<std::size_t>(k1 * k2), d);
  std::vector<Constraint> cs;
  for (int i = 0; i < k1; ++i)
    for (const auto& g : hermitian_basis(d)) {
      Constraint c;
      for (int j = 0; j < k2; ++j) c.coeffs.emplace_back(i * k2 + j, g);
      c.target = (g * m1.effects[static_cast<std::size_t>(i)]).trace().real();
      c.label = "row_marginal[" + std::to_string(i) + "]";
      cs.push_back(std::move(c));
    }
  for (int j = 0; j < k2; ++j)
    for (const auto& g : hermitian_basis(d)) {
      Constraint c;
      for (int i = 0; i < k1; ++i) c.coeffs.emplace_back(i * k2 + j, g);
      c.target = (g * m2.effects[static_cast<std::size_t>(j)]).trace().real();
      c.label = "col_marginal[" + std::to_string(j) + "]";
      cs.push_back(std::move(c));
    }

  const FeasibilityProblem problem(vars, std::move(cs));
  // Marginal residuals are Frobenius norms over d^2 coefficients; scale the
  // constraint tolerance down so they stay within feas_tol.
  FeasibilityOptions tight = opts;
  tight.feas_tol = opts.feas_tol / (2.0 * d);
  const FeasibilityResult r = problem.solve(tight);

  JointMeasVerdict verdict;
  verdict.iterations = r.iterations;
  if (r.status == FeasStatus::Feasible) {
    verdict.compatible = Tern::Yes;
    JointPovmCertificate cert;
    cert.k1 = k1;
    cert.k2 = k2;
    cert.joint.dim = d;
    cert.joint.effects = r.witness;
    for (int i = 0; i < k1; ++i) {
      CMatrix row = CMatrix::Zero(d, d);
      for (int j = 0; j < k2; ++j)
        row += r.witness[static_cast<std::size_t>(i * k2 + j)];
      cert.marginal_residual_1 =
          std::max(cert.marginal_residual_1,
                   (row - m1.effects[static_cast<std::size_t>(i)]).norm());
    }
    for (int j = 0; j < k2; ++j) {
      CMatrix col = CMatrix::Zero(d, d);
      for (int i = 0; i < k1; ++i)
        col += r.witness[static_cast<std::size_t>(i * k2 + j)];
      cert.marginal_residual_2 =
          std::max(cert.marginal_residual_2,
                   (col - m2.effects[static_cast<std::size_t>(j)]).norm());
    }
    verdict.certificate = std::move(cert);
  } else if (r.status == FeasStatus::Infeasible) {
    verdict.compatible = Tern::No;
    verdict.gap = r.certificate_gap;
  } else {
    verdict.compatible = Tern::Undecided;
    verdict.gap = r.certificate_gap;
  }
  return verdict;
}

void require_valid(const Instrument& ins, double tol) {
  if (ins.arms.empty()) fail(ErrorCode::InvalidInstrument, "no arms");
  const FdAlgebra cod = FdAlgebra::full(ins.dim);
  CMatrix total = CMatrix::Zero(ins.dim, ins.dim);
  for (const auto& arm : ins.arms) {
    if (arm.domain != ins.domain || arm.codomain != cod)
      fail(ErrorCode::InvalidInstrument, "arm domain/codomain mismatch");
    for (const auto& blk : arm.choi) {
      if (!is_hermitian(blk, 1e-8))
        fail(ErrorCode::InvalidInstrument, "arm Choi block is not Hermitian");
      if (min_eigenvalue(hermitize(blk)) < -tol)
        fail(ErrorCode::InvalidInstrument, "arm is not CP");
    }
    total += arm.apply(AlgebraElement::identity(ins.domain)).block_data[0];
  }
  if ((total - CMatrix::Identity(ins.dim, ins.dim)).norm() > tol * ins.dim)
    fail(ErrorCode::InvalidInstrument, "arm sum is not unital");
}

std::pair<Povm, Channel> instrument_marginals(const Instrument& ins, double tol) {
  require_valid(ins, tol);
  Povm povm;
  povm.dim = ins.dim;
  Channel channel = Channel::zero(ins.domain, FdAlgebra::full(ins.dim));
  for (const auto& arm : ins.arms) {
    povm.effects.push_back(
        arm.apply(AlgebraElement::identity(ins.domain)).block_data[0]);
    for (std::size_t k = 0; k < channel.choi.size(); ++k)
      channel.choi[k] += arm.choi[k];
  }
  require_valid(povm, tol);
  require_valid(channel, std::max(tol, 1e-8));
  return {povm, channel};
}

PovmChannelVerdict compatible_povm_channel(const Povm& m, const Channel& lambda,
                                           const FeasibilityOptions& opts) {
  require_valid(m);
  if (lambda.codomain.num_blocks() != 1 ||
      lambda.codomain.block_size(0) != m.dim)
    fail(ErrorCode::DimMismatch, "channel codomain must be M_d of the POVM");
  const FdAlgebra& dom = lambda.domain;
  const int d = m.dim;
  const int k = m.num_outcomes();
  const int nb = dom.num_blocks();

  // Route (a): one Choi block set per arm; the arm sum must reproduce lambda
  // and the arm values at the identity the effects.
  std::vector<int> vars;
  for (int o = 0; o < k; ++o)
    for (int a = 0; a < nb; ++a) vars.push_back(dom.block_size(a) * d);

  std::vector<Constraint> cs;
  for (int a = 0; a < nb; ++a) {
    const int n = dom.block_size(a);
    for (const auto& w : hermitian_basis(n * d)) {
      Constraint c;
      for (int o = 0; o < k; ++o) c.coeffs.emplace_back(o * nb + a, w);
      c.target = (w * lambda.choi_block(a, 0)).trace().real();
      c.label = "arm_sum[" + std::to_string(a) + "]";
      cs.push_back(std::move(c));
    }
  }
  for (int o = 0; o < k; ++o) {
    for (const auto& g : hermitian_basis(d)) {
      Constraint c;
      for (int a = 0; a < nb; ++a) {
        const int n = dom.block_size(a);
        c.coeffs.emplace_back(o * nb + a, kron(CMatrix::Identity(n, n), g));
      }
      c.target = (g * m.effects[static_cast<std::size_t>(o)]).trace().real();
      c.label = "arm_effect[" + std::to_string(o) + "]";
      cs.push_back(std::move(c));
    }
  }

  const FeasibilityProblem problem(vars, std::move(cs));
  const FeasibilityResult direct = problem.solve(opts);

  // Route (b): lambda <= (Gamma^m)^c.
  const PreorderVerdict conj =
      channel_leq(lambda, commutant_conjugate(qc_channel(m)), opts);

  PovmChannelVerdict verdict;
  verdict.iterations = direct.iterations + conj.iterations;
  verdict.direct_route = direct.status == FeasStatus::Feasible  ? Tern::Yes
                         : direct.status == FeasStatus::Infeasible ? Tern::No
                                                                   : Tern::Undecided;
  verdict.conjugate_route = conj.holds;

  if (verdict.direct_route != Tern::Undecided &&
      verdict.conjugate_route != Tern::Undecided &&
      verdict.direct_route != verdict.conjugate_route)
    fail(ErrorCode::NumericalFailure,
         "instrument and conjugate routes disagree on a decided instance");

  if (verdict.direct_route == Tern::Yes) {
    verdict.compatible = Tern::Yes;
    Instrument ins;
    ins.domain = dom;
    ins.dim = d;
    for (int o = 0; o < k; ++o) {
      Channel arm = Channel::zero(dom, FdAlgebra::full(d));
      for (int a = 0; a < nb; ++a)
        arm.choi_block(a, 0) = direct.witness[static_cast<std::size_t>(o * nb + a)];
      ins.arms.push_back(std::move(arm));
    }
    verdict.instrument = std::move(ins);
  } else if (verdict.direct_route == Tern::No ||
             verdict.conjugate_route == Tern::No) {
    verdict.compatible = Tern::No;
    verdict.gap = std::max(direct.certificate_gap, conj.gap);
  } else if (verdict.conjugate_route == Tern::Yes) {
    // Conjugate route decided yes while the direct solve ran out of budget.
    verdict.compatible = Tern::Yes;
  } else {
    verdict.compatible = Tern::Undecided;
    verdict.gap = std::max(direct.certificate_gap, conj.gap);
  }
  return verdict;
}

}  // namespace qcompat
