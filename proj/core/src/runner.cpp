// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/runner.hpp"

#include <chrono>
#include <cmath>

#include "qcompat/dilation.hpp"
#include "qcompat/errors.hpp"
#include "qcompat/povmtools.hpp"

namespace qcompat {

using nlohmann::json;

namespace {

constexpr double kCertTol = 1e-6;     // solver-grade witness certificates
constexpr double kKernelTol = 1e-7;   // stochastic kernel / joint POVM marginals
constexpr double kDilationTol = 1e-9; // exact dilation constructions
constexpr double kExactTol = 1e-8;    // deterministic algebraic constructions

const json& find_object(const json& problem, const std::string& name) {
  if (!problem.contains("objects") || !problem["objects"].is_object())
    fail(ErrorCode::ParseError, "problem has no objects table");
  const json& objects = problem["objects"];
  if (!objects.contains(name))
    fail(ErrorCode::ParseError, "unknown object '" + name + "'");
  return objects[name];
}

std::string object_type(const json& problem, const std::string& name) {
  const json& obj = find_object(problem, name);
  if (!obj.is_object() || !obj.contains("type") || !obj["type"].is_string())
    fail(ErrorCode::ParseError, "object '" + name + "' has no type");
  return obj["type"].get<std::string>();
}

Channel need_channel(const json& problem, const std::string& name) {
  if (object_type(problem, name) != "channel")
    fail(ErrorCode::ParseError, "object '" + name + "' is not a channel");
  return channel_from_json(find_object(problem, name), "objects." + name);
}

Povm need_povm(const json& problem, const std::string& name) {
  if (object_type(problem, name) != "povm")
    fail(ErrorCode::ParseError, "object '" + name + "' is not a povm");
  Povm p = povm_from_json(find_object(problem, name), "objects." + name);
  try {
    require_valid(p);
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, "object '" + name + "': " + e.what());
  }
  return p;
}

StatExperiment need_experiment(const json& problem, const std::string& name) {
  if (object_type(problem, name) != "experiment")
    fail(ErrorCode::ParseError, "object '" + name + "' is not an experiment");
  StatExperiment e =
      experiment_from_json(find_object(problem, name), "objects." + name);
  try {
    require_valid(e);
  } catch (const Error& err) {
    fail(ErrorCode::ParseError, "object '" + name + "': " + err.what());
  }
  return e;
}

std::vector<std::string> query_args(const json& problem, std::size_t expected) {
  if (!problem.contains("query") || !problem["query"].is_object())
    fail(ErrorCode::ParseError, "problem has no query");
  const json& q = problem["query"];
  if (!q.contains("args") || !q["args"].is_array() || q["args"].size() != expected)
    fail(ErrorCode::ParseError,
         "query needs exactly " + std::to_string(expected) + " argument name(s)");
  std::vector<std::string> names;
  for (const auto& a : q["args"]) {
    if (!a.is_string()) fail(ErrorCode::ParseError, "query args must be strings");
    names.push_back(a.get<std::string>());
  }
  return names;
}

double povm_validity_defect(const Povm& p) {
  double defect = 0.0;
  CMatrix sum = CMatrix::Zero(p.dim, p.dim);
  for (const auto& e : p.effects) {
    defect = std::max(defect, herm_defect(e));
    defect = std::max(defect, -std::min(0.0, min_eigenvalue(hermitize(e))));
    sum += e;
  }
  return std::max(defect, (sum - CMatrix::Identity(p.dim, p.dim)).norm());
}

double kernel_defect(const RMatrix& k) {
  double defect = 0.0;
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      defect = std::max(defect, std::max(-k(i, j), k(i, j) - 1.0));
      col += k(i, j);
    }
    defect = std::max(defect, std::abs(col - 1.0));
  }
  return std::max(defect, 0.0);
}

double kernel_reconstruction_defect(const RMatrix& k, const Povm& target,
                                    const Povm& source) {
  double worst = 0.0;
  for (int i = 0; i < target.num_outcomes(); ++i) {
    CMatrix rec = CMatrix::Zero(target.dim, target.dim);
    for (int j = 0; j < source.num_outcomes(); ++j)
      rec += k(i, j) * source.effects[static_cast<std::size_t>(j)];
    worst = std::max(worst,
                     (rec - target.effects[static_cast<std::size_t>(i)]).norm());
  }
  return worst;
}

// Shared between run (recording) and verify (recomputation).

struct PreorderCertCheck {
  double witness_validity = 0.0;
  double witness_action = 0.0;
};

PreorderCertCheck check_channel_witness(const Channel& phi1, const Channel& phi2,
                                        const Channel& witness) {
  PreorderCertCheck out;
  out.witness_validity = validate(witness).max_violation;
  out.witness_action = action_distance(compose(phi2, witness), phi1);
  return out;
}

double experiment_witness_residual(const StatExperiment& e,
                                   const StatExperiment& f,
                                   const Channel& witness) {
  double worst = 0.0;
  for (int theta = 0; theta < e.num_parameters(); ++theta) {
    double acc = 0.0;
    for (const auto& h : hermitian_element_basis(e.algebra)) {
      const double lhs = state_pairing(e.states[static_cast<std::size_t>(theta)], h);
      const double rhs = state_pairing(f.states[static_cast<std::size_t>(theta)],
                                       witness.apply(h));
      acc += (lhs - rhs) * (lhs - rhs);
    }
    worst = std::max(worst, std::sqrt(acc));
  }
  return worst;
}

struct JointCheck {
  double marginal_lambda = 0.0;
  double marginal_gamma = 0.0;
  double validity = 0.0;
};

JointCheck check_joint_channel(const Channel& lambda, const Channel& gamma,
                               const Channel& joint) {
  JointCheck out;
  out.validity = validate(joint).max_violation;
  for (const auto& e : hermitian_element_basis(lambda.domain))
    out.marginal_lambda = std::max(
        out.marginal_lambda,
        (joint.apply(lift_first(lambda.domain, gamma.domain, e)) - lambda.apply(e))
            .fnorm());
  for (const auto& e : hermitian_element_basis(gamma.domain))
    out.marginal_gamma = std::max(
        out.marginal_gamma,
        (joint.apply(lift_second(lambda.domain, gamma.domain, e)) - gamma.apply(e))
            .fnorm());
  return out;
}

struct JointPovmCheck {
  double marginal_1 = 0.0;
  double marginal_2 = 0.0;
  double validity = 0.0;
};

JointPovmCheck check_joint_povm(const Povm& m1, const Povm& m2, const Povm& joint,
                                int k1, int k2) {
  JointPovmCheck out;
  if (joint.num_outcomes() != k1 * k2 || joint.dim != m1.dim)
    fail(ErrorCode::ShapeMismatch, "joint POVM has the wrong shape");
  for (const auto& e : joint.effects)
    out.validity = std::max(
        out.validity, -std::min(0.0, min_eigenvalue(hermitize(e))));
  for (int i = 0; i < k1; ++i) {
    CMatrix row = CMatrix::Zero(m1.dim, m1.dim);
    for (int j = 0; j < k2; ++j)
      row += joint.effects[static_cast<std::size_t>(i * k2 + j)];
    out.marginal_1 =
        std::max(out.marginal_1,
                 (row - m1.effects[static_cast<std::size_t>(i)]).norm());
  }
  for (int j = 0; j < k2; ++j) {
    CMatrix col = CMatrix::Zero(m2.dim, m2.dim);
    for (int i = 0; i < k1; ++i)
      col += joint.effects[static_cast<std::size_t>(i * k2 + j)];
    out.marginal_2 =
        std::max(out.marginal_2,
                 (col - m2.effects[static_cast<std::size_t>(j)]).norm());
  }
  return out;
}

struct InstrumentCheck {
  double cp_defect = 0.0;
  double effects = 0.0;
  double channel_action = 0.0;
};

InstrumentCheck check_instrument(const Povm& m, const Channel& lambda,
                                 const Instrument& ins) {
  InstrumentCheck out;
  if (static_cast<int>(ins.arms.size()) != m.num_outcomes() ||
      ins.domain != lambda.domain || ins.dim != m.dim)
    fail(ErrorCode::ShapeMismatch, "instrument has the wrong shape");
  Channel total = Channel::zero(lambda.domain, lambda.codomain);
  for (int o = 0; o < m.num_outcomes(); ++o) {
    const Channel& arm = ins.arms[static_cast<std::size_t>(o)];
    for (const auto& blk : arm.choi)
      out.cp_defect = std::max(
          out.cp_defect, -std::min(0.0, min_eigenvalue(hermitize(blk))));
    const CMatrix effect =
        arm.apply(AlgebraElement::identity(ins.domain)).block_data[0];
    out.effects = std::max(
        out.effects, (effect - m.effects[static_cast<std::size_t>(o)]).norm());
    for (std::size_t k = 0; k < total.choi.size(); ++k) total.choi[k] += arm.choi[k];
  }
  out.channel_action = action_distance(total, lambda);
  return out;
}

json options_to_json(const RunOptions& opts) {
  return json{{"feas_tol", opts.feas.feas_tol},
              {"infeas_gap", opts.feas.infeas_gap},
              {"max_iters", opts.feas.max_iters},
              {"seed", opts.seed}};
}

// Report assembly state threaded through the per-kind handlers.
struct ReportBuilder {
  std::string verdict = "ok";
  double gap = 0.0;
  json certificates = json::object();
  json residuals = json::object();
  json tolerances = json::object();
  json routes = json::object();

  void record(const std::string& key, double value, double tol) {
    residuals[key] = value;
    tolerances[key] = tol;
  }
};

void run_preorder(const json& problem, const std::vector<std::string>& args,
                  const RunOptions& opts, ReportBuilder* rb) {
  const std::string type = object_type(problem, args[0]);
  if (type != object_type(problem, args[1]))
    fail(ErrorCode::ParseError, "preorder arguments must have the same type");
  if (type == "channel") {
    const Channel a = need_channel(problem, args[0]);
    const Channel b = need_channel(problem, args[1]);
    const PreorderVerdict v = channel_leq(a, b, opts.feas);
    rb->verdict = to_string(v.holds);
    if (v.holds == Tern::Yes) {
      rb->certificates["witness"] = to_json(*v.witness);
      const PreorderCertCheck c = check_channel_witness(a, b, *v.witness);
      rb->record("witness_validity", c.witness_validity, kCertTol);
      rb->record("witness_action", c.witness_action, kCertTol);
    } else {
      rb->gap = v.gap;
    }
  } else if (type == "povm") {
    const Povm a = need_povm(problem, args[0]);
    const Povm b = need_povm(problem, args[1]);
    const PovmLeqVerdict v = povm_leq(a, b, opts.feas);
    rb->verdict = to_string(v.holds);
    if (v.holds == Tern::Yes) {
      rb->certificates["kernel"] = to_json(v.kernel->matrix);
      rb->record("kernel_stochastic", kernel_defect(v.kernel->matrix), kCertTol);
      rb->record("kernel_reconstruction",
                 kernel_reconstruction_defect(v.kernel->matrix, a, b), kKernelTol);
    } else {
      rb->gap = v.gap;
    }
  } else if (type == "experiment") {
    const StatExperiment a = need_experiment(problem, args[0]);
    const StatExperiment b = need_experiment(problem, args[1]);
    const PreorderVerdict v = experiment_leq(a, b, opts.feas);
    rb->verdict = to_string(v.holds);
    if (v.holds == Tern::Yes) {
      rb->certificates["witness"] = to_json(*v.witness);
      rb->record("witness_validity", validate(*v.witness).max_violation, kCertTol);
      rb->record("witness_state_match",
                 experiment_witness_residual(a, b, *v.witness), kCertTol);
    } else {
      rb->gap = v.gap;
    }
  } else {
    fail(ErrorCode::ParseError, "preorder does not apply to type '" + type + "'");
  }
}

void run_equiv(const json& problem, const std::vector<std::string>& args,
               const RunOptions& opts, ReportBuilder* rb) {
  const std::string type = object_type(problem, args[0]);
  if (type != object_type(problem, args[1]))
    fail(ErrorCode::ParseError, "equiv arguments must have the same type");
  if (type == "channel") {
    const Channel a = need_channel(problem, args[0]);
    const Channel b = need_channel(problem, args[1]);
    const EquivVerdict v = channel_equiv(a, b, opts.feas);
    rb->verdict = to_string(v.equivalent);
    rb->routes["forward"] = to_string(v.forward.holds);
    rb->routes["backward"] = to_string(v.backward.holds);
    if (v.forward.holds == Tern::Yes) {
      rb->certificates["witness_forward"] = to_json(*v.forward.witness);
      const PreorderCertCheck c = check_channel_witness(a, b, *v.forward.witness);
      rb->record("witness_forward_validity", c.witness_validity, kCertTol);
      rb->record("witness_forward_action", c.witness_action, kCertTol);
    }
    if (v.backward.holds == Tern::Yes) {
      rb->certificates["witness_backward"] = to_json(*v.backward.witness);
      const PreorderCertCheck c = check_channel_witness(b, a, *v.backward.witness);
      rb->record("witness_backward_validity", c.witness_validity, kCertTol);
      rb->record("witness_backward_action", c.witness_action, kCertTol);
    }
    rb->gap = std::max(v.forward.gap, v.backward.gap);
  } else if (type == "povm") {
    const Povm a = need_povm(problem, args[0]);
    const Povm b = need_povm(problem, args[1]);
    const PovmLeqVerdict fwd = povm_leq(a, b, opts.feas);
    const PovmLeqVerdict bwd = povm_leq(b, a, opts.feas);
    rb->routes["forward"] = to_string(fwd.holds);
    rb->routes["backward"] = to_string(bwd.holds);
    if (fwd.holds == Tern::Undecided || bwd.holds == Tern::Undecided)
      rb->verdict = "undecided";
    else
      rb->verdict =
          (fwd.holds == Tern::Yes && bwd.holds == Tern::Yes) ? "yes" : "no";
    if (fwd.holds == Tern::Yes) {
      rb->certificates["kernel_forward"] = to_json(fwd.kernel->matrix);
      rb->record("kernel_forward_reconstruction",
                 kernel_reconstruction_defect(fwd.kernel->matrix, a, b), kKernelTol);
    }
    if (bwd.holds == Tern::Yes) {
      rb->certificates["kernel_backward"] = to_json(bwd.kernel->matrix);
      rb->record("kernel_backward_reconstruction",
                 kernel_reconstruction_defect(bwd.kernel->matrix, b, a), kKernelTol);
    }
    rb->gap = std::max(fwd.gap, bwd.gap);
  } else if (type == "experiment") {
    const StatExperiment a = need_experiment(problem, args[0]);
    const StatExperiment b = need_experiment(problem, args[1]);
    const PreorderVerdict fwd = experiment_leq(a, b, opts.feas);
    const PreorderVerdict bwd = experiment_leq(b, a, opts.feas);
    rb->routes["forward"] = to_string(fwd.holds);
    rb->routes["backward"] = to_string(bwd.holds);
    if (fwd.holds == Tern::Undecided || bwd.holds == Tern::Undecided)
      rb->verdict = "undecided";
    else
      rb->verdict =
          (fwd.holds == Tern::Yes && bwd.holds == Tern::Yes) ? "yes" : "no";
    if (fwd.holds == Tern::Yes) {
      rb->certificates["witness_forward"] = to_json(*fwd.witness);
      rb->record("witness_forward_state_match",
                 experiment_witness_residual(a, b, *fwd.witness), kCertTol);
    }
    if (bwd.holds == Tern::Yes) {
      rb->certificates["witness_backward"] = to_json(*bwd.witness);
      rb->record("witness_backward_state_match",
                 experiment_witness_residual(b, a, *bwd.witness), kCertTol);
    }
    rb->gap = std::max(fwd.gap, bwd.gap);
  } else {
    fail(ErrorCode::ParseError, "equiv does not apply to type '" + type + "'");
  }
}

void run_compat(const json& problem, const std::vector<std::string>& args,
                const RunOptions& opts, ReportBuilder* rb) {
  const Channel a = need_channel(problem, args[0]);
  const Channel b = need_channel(problem, args[1]);
  const CompatVerdict direct = compatible_channels(a, b, opts.feas);
  const PreorderVerdict conj = compatible_via_conjugate(a, b, opts.feas);
  rb->routes["direct"] = to_string(direct.compatible);
  rb->routes["conjugate"] = to_string(conj.holds);
  if (direct.compatible == Tern::No) rb->routes["direct_gap"] = direct.gap;
  if (conj.holds == Tern::No) rb->routes["conjugate_gap"] = conj.gap;
  if (direct.compatible != Tern::Undecided && conj.holds != Tern::Undecided &&
      direct.compatible != conj.holds)
    fail(ErrorCode::NumericalFailure,
         "direct and conjugate compatibility routes disagree");

  const Tern verdict =
      direct.compatible != Tern::Undecided ? direct.compatible : conj.holds;
  rb->verdict = to_string(verdict);
  if (direct.compatible == Tern::Yes) {
    rb->certificates["joint"] = to_json(direct.certificate->joint);
    const JointCheck c = check_joint_channel(a, b, direct.certificate->joint);
    rb->record("joint_validity", c.validity, kCertTol);
    rb->record("joint_marginal_lambda", c.marginal_lambda, kCertTol);
    rb->record("joint_marginal_gamma", c.marginal_gamma, kCertTol);
  }
  if (conj.holds == Tern::Yes) {
    rb->certificates["conjugate_witness"] = to_json(*conj.witness);
    const PreorderCertCheck c =
        check_channel_witness(b, commutant_conjugate(a), *conj.witness);
    rb->record("conjugate_witness_validity", c.witness_validity, kCertTol);
    rb->record("conjugate_witness_action", c.witness_action, kCertTol);
  }
  if (verdict == Tern::No) rb->gap = std::max(direct.gap, conj.gap);
}

void run_jointly_measurable(const json& problem,
                            const std::vector<std::string>& args,
                            const RunOptions& opts, ReportBuilder* rb) {
  const Povm m1 = need_povm(problem, args[0]);
  const Povm m2 = need_povm(problem, args[1]);
  const JointMeasVerdict v = jointly_measurable(m1, m2, opts.feas);
  rb->verdict = to_string(v.compatible);
  if (v.compatible == Tern::Yes) {
    rb->certificates["joint_povm"] = to_json(v.certificate->joint);
    rb->certificates["k1"] = v.certificate->k1;
    rb->certificates["k2"] = v.certificate->k2;
    const JointPovmCheck c = check_joint_povm(m1, m2, v.certificate->joint,
                                              v.certificate->k1, v.certificate->k2);
    rb->record("joint_psd", c.validity, kKernelTol);
    rb->record("joint_marginal_1", c.marginal_1, kKernelTol);
    rb->record("joint_marginal_2", c.marginal_2, kKernelTol);
  } else {
    rb->gap = v.gap;
  }
}

void run_povm_channel(const json& problem, const std::vector<std::string>& args,
                      const RunOptions& opts, ReportBuilder* rb) {
  const Povm m = need_povm(problem, args[0]);
  const Channel lambda = need_channel(problem, args[1]);
  const PovmChannelVerdict v = compatible_povm_channel(m, lambda, opts.feas);
  rb->routes["direct"] = to_string(v.direct_route);
  rb->routes["conjugate"] = to_string(v.conjugate_route);
  rb->verdict = to_string(v.compatible);
  if (v.instrument.has_value()) {
    rb->certificates["instrument"] = to_json(*v.instrument);
    const InstrumentCheck c = check_instrument(m, lambda, *v.instrument);
    rb->record("instrument_cp", c.cp_defect, kCertTol);
    rb->record("instrument_effects", c.effects, kCertTol);
    rb->record("instrument_channel_action", c.channel_action, kCertTol);
  }
  if (v.compatible == Tern::No) rb->gap = v.gap;
}

void run_maximal(const json& problem, const std::vector<std::string>& args,
                 const RunOptions& opts, ReportBuilder* rb) {
  const Povm m = need_povm(problem, args[0]);
  const MaximalityVerdict v = is_maximal(m, opts.feas);
  rb->verdict = v.maximal ? "yes" : "no";
  const CanonicalPovm canonical = canonicalize(m);
  rb->certificates["canonical"] = to_json(canonical.povm);
  rb->certificates["canonical_ranks"] = v.evidence.canonical_ranks;
  rb->routes["rank1"] = v.evidence.rank1 ? "yes" : "no";
  rb->routes["conjugate"] = to_string(v.evidence.conjugate_route);
  rb->record("canonical_validity", povm_validity_defect(canonical.povm), kExactTol);
  const Channel qc = qc_channel(m);
  if (v.evidence.conjugate_equiv.forward.holds == Tern::Yes) {
    rb->certificates["conjugate_witness_forward"] =
        to_json(*v.evidence.conjugate_equiv.forward.witness);
    const PreorderCertCheck c = check_channel_witness(
        qc, commutant_conjugate(qc), *v.evidence.conjugate_equiv.forward.witness);
    rb->record("conjugate_forward_action", c.witness_action, kCertTol);
  }
  if (v.evidence.conjugate_equiv.backward.holds == Tern::Yes) {
    rb->certificates["conjugate_witness_backward"] =
        to_json(*v.evidence.conjugate_equiv.backward.witness);
    const PreorderCertCheck c = check_channel_witness(
        commutant_conjugate(qc), qc, *v.evidence.conjugate_equiv.backward.witness);
    rb->record("conjugate_backward_action", c.witness_action, kCertTol);
  }
}

void run_refine(const json& problem, const std::vector<std::string>& args,
                const RunOptions& opts, ReportBuilder* rb) {
  const Povm m = need_povm(problem, args[0]);
  const Povm refined = maximal_refinement(m);
  const PovmLeqVerdict leq = povm_leq(m, refined, opts.feas);
  rb->certificates["refined"] = to_json(refined);
  std::vector<int> ranks;
  for (const auto& e : refined.effects) ranks.push_back(psd_rank(hermitize(e)));
  rb->certificates["refined_ranks"] = ranks;
  rb->record("refined_validity", povm_validity_defect(refined), kExactTol);
  if (leq.holds == Tern::Yes) {
    rb->verdict = "ok";
    rb->certificates["kernel"] = to_json(leq.kernel->matrix);
    rb->record("kernel_stochastic", kernel_defect(leq.kernel->matrix), kCertTol);
    rb->record("kernel_reconstruction",
               kernel_reconstruction_defect(leq.kernel->matrix, m, refined),
               kKernelTol);
  } else {
    rb->verdict = "undecided";
  }
}

void run_dilate(const json& problem, const std::vector<std::string>& args,
                const RunOptions&, ReportBuilder* rb) {
  const std::string type = object_type(problem, args[0]);
  if (type == "povm") {
    const Povm m = need_povm(problem, args[0]);
    const NaimarkDilation nd = naimark_dilation(m);
    json projections = json::array();
    for (const auto& p : nd.pvm_projections) projections.push_back(to_json(p));
    rb->certificates["kind"] = "naimark";
    rb->certificates["dilation_dim"] = nd.total_dim;
    rb->certificates["isometry"] = to_json(nd.isometry);
    rb->certificates["projections"] = std::move(projections);

    double iso = (nd.isometry.adjoint() * nd.isometry -
                  CMatrix::Identity(m.dim, m.dim)).norm();
    double rec = 0.0, proj = 0.0;
    CMatrix psum = CMatrix::Zero(nd.total_dim, nd.total_dim);
    for (int i = 0; i < m.num_outcomes(); ++i) {
      const CMatrix& p = nd.pvm_projections[static_cast<std::size_t>(i)];
      rec = std::max(rec, (nd.isometry.adjoint() * p * nd.isometry -
                           m.effects[static_cast<std::size_t>(i)]).norm());
      proj = std::max(proj, (p * p - p).norm());
      psum += p;
    }
    proj = std::max(proj,
                    (psum - CMatrix::Identity(nd.total_dim, nd.total_dim)).norm());
    rb->record("isometry_defect", iso, kDilationTol);
    rb->record("reconstruction", rec, kDilationTol);
    rb->record("projection_defect", proj, kDilationTol);
    int rank_sum = 0;
    for (const auto& e : m.effects) rank_sum += psd_rank(hermitize(e));
    rb->record("dimension_defect", std::abs(nd.total_dim - rank_sum), 0.5);
    rb->verdict = "ok";
  } else if (type == "channel") {
    const Channel ch = need_channel(problem, args[0]);
    const StinespringRep st = minimal_stinespring(ch);
    rb->certificates["kind"] = "stinespring";
    rb->certificates["dilation_dim"] = st.total_dim();
    rb->certificates["isometry"] = to_json(st.isometry);
    rb->certificates["algebra"] = to_json(ch.domain);
    rb->certificates["multiplicities"] = st.rep.multiplicities;

    const int d = ch.codomain.block_size(0);
    double iso =
        (st.isometry.adjoint() * st.isometry - CMatrix::Identity(d, d)).norm();
    double rec = 0.0;
    for (const auto& e : hermitian_element_basis(ch.domain))
      rec = std::max(rec, (st.isometry.adjoint() * embed(st.rep, e) * st.isometry -
                           ch.apply(e).block_data[0]).norm());
    rb->record("isometry_defect", iso, kDilationTol);
    rb->record("reconstruction", rec, kDilationTol);
    rb->verdict = "ok";
  } else {
    fail(ErrorCode::ParseError, "dilate applies to povm or channel objects");
  }
}

void run_conjugate(const json& problem, const std::vector<std::string>& args,
                   const RunOptions&, ReportBuilder* rb) {
  const Channel ch = need_channel(problem, args[0]);
  const Channel conj = commutant_conjugate(ch);
  rb->certificates["conjugate"] = to_json(conj);
  rb->record("conjugate_validity", validate(conj).max_violation, kExactTol);
  // Domain blocks must equal the nonzero component Choi ranks.
  std::vector<int> ranks;
  for (int i = 0; i < ch.domain.num_blocks(); ++i) {
    const int r = psd_rank(hermitize(ch.choi_block(i, 0)));
    if (r > 0) ranks.push_back(r);
  }
  rb->record("conjugate_domain_defect",
             conj.domain.blocks == ranks ? 0.0 : 1.0, 0.5);
  rb->verdict = "ok";
}

void run_canonicalize(const json& problem, const std::vector<std::string>& args,
                      const RunOptions&, ReportBuilder* rb) {
  const Povm m = need_povm(problem, args[0]);
  const CanonicalPovm c = canonicalize(m);
  rb->certificates["canonical"] = to_json(c.povm);
  rb->certificates["merge_kernel"] = to_json(c.merge_map.matrix);
  rb->record("canonical_validity", povm_validity_defect(c.povm), kExactTol);
  rb->record("kernel_stochastic", kernel_defect(c.merge_map.matrix), kExactTol);
  rb->record("kernel_reconstruction",
             kernel_reconstruction_defect(c.merge_map.matrix, c.povm, m), kExactTol);
  rb->verdict = "ok";
}

}  // namespace

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

RunOptions resolve_options(const json& problem, const json& cli_overrides) {
  RunOptions opts;
  auto apply = [&opts](const json& src) {
    if (!src.is_object()) return;
    if (src.contains("feas_tol")) opts.feas.feas_tol = src["feas_tol"].get<double>();
    if (src.contains("infeas_gap"))
      opts.feas.infeas_gap = src["infeas_gap"].get<double>();
    if (src.contains("max_iters")) opts.feas.max_iters = src["max_iters"].get<int>();
    if (src.contains("seed")) opts.seed = src["seed"].get<std::uint64_t>();
  };
  if (problem.contains("options")) apply(problem["options"]);
  apply(cli_overrides);
  if (opts.feas.feas_tol <= 0 || opts.feas.infeas_gap <= 0 || opts.feas.max_iters <= 0)
    fail(ErrorCode::ParseError, "options must be positive");
  return opts;
}

RunOutcome run_problem(const json& problem, const std::string& problem_bytes,
                       const json& cli_overrides) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!problem.is_object() || problem.value("version", "") != kSchemaVersion)
    fail(ErrorCode::ParseError,
         std::string("problem version must be \"") + kSchemaVersion + "\"");
  const RunOptions opts = resolve_options(problem, cli_overrides);
  if (!problem.contains("query") || !problem["query"].is_object() ||
      !problem["query"].contains("kind") || !problem["query"]["kind"].is_string())
    fail(ErrorCode::ParseError, "problem has no query.kind");
  const std::string kind = problem["query"]["kind"].get<std::string>();

  ReportBuilder rb;
  try {
    if (kind == "preorder") {
      run_preorder(problem, query_args(problem, 2), opts, &rb);
    } else if (kind == "equiv") {
      run_equiv(problem, query_args(problem, 2), opts, &rb);
    } else if (kind == "compat") {
      run_compat(problem, query_args(problem, 2), opts, &rb);
    } else if (kind == "jointly-measurable") {
      run_jointly_measurable(problem, query_args(problem, 2), opts, &rb);
    } else if (kind == "povm-channel") {
      run_povm_channel(problem, query_args(problem, 2), opts, &rb);
    } else if (kind == "maximal") {
      run_maximal(problem, query_args(problem, 1), opts, &rb);
    } else if (kind == "refine") {
      run_refine(problem, query_args(problem, 1), opts, &rb);
    } else if (kind == "dilate") {
      run_dilate(problem, query_args(problem, 1), opts, &rb);
    } else if (kind == "conjugate") {
      run_conjugate(problem, query_args(problem, 1), opts, &rb);
    } else if (kind == "canonicalize") {
      run_canonicalize(problem, query_args(problem, 1), opts, &rb);
    } else {
      fail(ErrorCode::ParseError, "unknown query kind '" + kind + "'");
    }
  } catch (const Error& e) {
    // Name the objects involved so mismatches are attributable.
    std::string ctx;
    if (problem["query"].contains("args"))
      for (const auto& a : problem["query"]["args"])
        if (a.is_string()) ctx += (ctx.empty() ? "" : ", ") + a.get<std::string>();
    std::string detail = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (detail.rfind(prefix, 0) == 0) detail = detail.substr(prefix.size());
    throw Error(e.code(), detail + " [query objects: " + ctx + "]");
  }

  RunOutcome outcome;
  json& report = outcome.report;
  report["version"] = kSchemaVersion;
  report["tool"] = json{{"name", kToolName}, {"version", kToolVersion}};
  report["input_hash"] = fnv1a64_hex(problem_bytes);
  report["query"] = problem["query"];
  report["options"] = options_to_json(opts);
  report["verdict"] = rb.verdict;
  if (rb.verdict == "no") report["gap"] = rb.gap;
  if (!rb.routes.empty()) report["routes"] = rb.routes;
  report["certificates"] = rb.certificates;
  report["residuals"] = rb.residuals;
  report["tolerances"] = rb.tolerances;
  const auto t1 = std::chrono::steady_clock::now();
  report["timings"] = json{
      {"total_ms",
       std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1000.0}};
  outcome.exit_code = rb.verdict == "undecided" ? 2 : 0;
  return outcome;
}

namespace {

// Recomputes one residual map from the certificates; returns false with a
// message when something cannot be recomputed or exceeds its tolerance.
bool verify_certificates(const json& report, const json& problem,
                         std::string* message) {
  const std::string kind = report["query"]["kind"].get<std::string>();
  const std::string verdict = report.value("verdict", "");
  const json& certs = report["certificates"];
  const json& tols = report["tolerances"];

  json recomputed = json::object();
  std::vector<std::string> args;
  for (const auto& a : report["query"]["args"]) args.push_back(a.get<std::string>());

  auto against = [&](const std::string& key, double value) -> bool {
    if (!tols.contains(key)) {
      *message = "missing tolerance for '" + key + "'";
      return false;
    }
    if (!(value <= tols[key].get<double>())) {
      *message = "residual '" + key + "' = " + std::to_string(value) +
                 " exceeds tolerance " + std::to_string(tols[key].get<double>());
      return false;
    }
    return true;
  };

  if (kind == "preorder" || kind == "equiv") {
    const std::string type = object_type(problem, args[0]);
    if (verdict != "yes" && kind == "preorder") return true;
    if (type == "channel") {
      const Channel a = need_channel(problem, args[0]);
      const Channel b = need_channel(problem, args[1]);
      auto check_dir = [&](const std::string& key, const Channel& x,
                           const Channel& y, const std::string& prefix) -> bool {
        if (!certs.contains(key)) return true;
        const Channel w = channel_from_json(certs[key], "certificates." + key);
        const PreorderCertCheck c = check_channel_witness(x, y, w);
        return against(prefix + "_validity", c.witness_validity) &&
               against(prefix + "_action", c.witness_action);
      };
      if (kind == "preorder") {
        if (!certs.contains("witness")) {
          *message = "yes verdict without a witness";
          return false;
        }
        return check_dir("witness", a, b, "witness");
      }
      if (verdict == "yes" &&
          (!certs.contains("witness_forward") || !certs.contains("witness_backward"))) {
        *message = "equivalence verdict without both witnesses";
        return false;
      }
      return check_dir("witness_forward", a, b, "witness_forward") &&
             check_dir("witness_backward", b, a, "witness_backward");
    }
    if (type == "povm") {
      const Povm a = need_povm(problem, args[0]);
      const Povm b = need_povm(problem, args[1]);
      auto check_kernel = [&](const std::string& key, const Povm& x, const Povm& y,
                              const std::string& prefix) -> bool {
        if (!certs.contains(key)) return true;
        const RMatrix k = rmatrix_from_json(certs[key], "certificates." + key);
        if (tols.contains(prefix + "_stochastic") &&
            !against(prefix + "_stochastic", kernel_defect(k)))
          return false;
        return against(prefix + "_reconstruction",
                       kernel_reconstruction_defect(k, x, y));
      };
      if (kind == "preorder") {
        if (!certs.contains("kernel")) {
          *message = "yes verdict without a kernel";
          return false;
        }
        return check_kernel("kernel", a, b, "kernel");
      }
      return check_kernel("kernel_forward", a, b, "kernel_forward") &&
             check_kernel("kernel_backward", b, a, "kernel_backward");
    }
    if (type == "experiment") {
      const StatExperiment a = need_experiment(problem, args[0]);
      const StatExperiment b = need_experiment(problem, args[1]);
      auto check_w = [&](const std::string& key, const StatExperiment& x,
                         const StatExperiment& y, const std::string& prefix) -> bool {
        if (!certs.contains(key)) return true;
        const Channel w = channel_from_json(certs[key], "certificates." + key);
        if (tols.contains(prefix + "_validity") &&
            !against(prefix + "_validity", validate(w).max_violation))
          return false;
        return against(prefix + "_state_match", experiment_witness_residual(x, y, w));
      };
      if (kind == "preorder") {
        if (!certs.contains("witness")) {
          *message = "yes verdict without a witness";
          return false;
        }
        return check_w("witness", a, b, "witness");
      }
      return check_w("witness_forward", a, b, "witness_forward") &&
             check_w("witness_backward", b, a, "witness_backward");
    }
    *message = "unknown object type";
    return false;
  }

  if (kind == "compat") {
    const Channel a = need_channel(problem, args[0]);
    const Channel b = need_channel(problem, args[1]);
    if (verdict != "yes") return true;
    if (!certs.contains("joint") && !certs.contains("conjugate_witness")) {
      *message = "yes verdict without a certificate";
      return false;
    }
    if (certs.contains("joint")) {
      const Channel joint = channel_from_json(certs["joint"], "certificates.joint");
      const JointCheck c = check_joint_channel(a, b, joint);
      if (!against("joint_validity", c.validity) ||
          !against("joint_marginal_lambda", c.marginal_lambda) ||
          !against("joint_marginal_gamma", c.marginal_gamma))
        return false;
    }
    if (certs.contains("conjugate_witness")) {
      const Channel w = channel_from_json(certs["conjugate_witness"],
                                          "certificates.conjugate_witness");
      const PreorderCertCheck c = check_channel_witness(b, commutant_conjugate(a), w);
      if (!against("conjugate_witness_validity", c.witness_validity) ||
          !against("conjugate_witness_action", c.witness_action))
        return false;
    }
    return true;
  }

  if (kind == "jointly-measurable") {
    if (verdict != "yes") return true;
    const Povm m1 = need_povm(problem, args[0]);
    const Povm m2 = need_povm(problem, args[1]);
    if (!certs.contains("joint_povm")) {
      *message = "yes verdict without a joint POVM";
      return false;
    }
    const Povm joint = povm_from_json(certs["joint_povm"], "certificates.joint_povm");
    const JointPovmCheck c = check_joint_povm(m1, m2, joint,
                                              certs["k1"].get<int>(),
                                              certs["k2"].get<int>());
    return against("joint_psd", c.validity) &&
           against("joint_marginal_1", c.marginal_1) &&
           against("joint_marginal_2", c.marginal_2);
  }

  if (kind == "povm-channel") {
    if (verdict != "yes") return true;
    const Povm m = need_povm(problem, args[0]);
    const Channel lambda = need_channel(problem, args[1]);
    if (!certs.contains("instrument")) {
      // A conjugate-route yes can stand alone; nothing to recompute.
      return true;
    }
    const Instrument ins =
        instrument_from_json(certs["instrument"], "certificates.instrument");
    const InstrumentCheck c = check_instrument(m, lambda, ins);
    return against("instrument_cp", c.cp_defect) &&
           against("instrument_effects", c.effects) &&
           against("instrument_channel_action", c.channel_action);
  }

  if (kind == "maximal") {
    const Povm m = need_povm(problem, args[0]);
    const CanonicalPovm canonical = canonicalize(m);
    std::vector<int> ranks;
    for (const auto& e : canonical.povm.effects)
      ranks.push_back(psd_rank(hermitize(e)));
    const bool rank1 =
        std::all_of(ranks.begin(), ranks.end(), [](int r) { return r == 1; });
    if ((verdict == "yes") != rank1) {
      *message = "verdict does not match the recomputed rank-1 criterion";
      return false;
    }
    if (certs.contains("canonical_ranks") &&
        certs["canonical_ranks"].get<std::vector<int>>() != ranks) {
      *message = "recorded canonical ranks differ from recomputation";
      return false;
    }
    if (!against("canonical_validity", povm_validity_defect(canonical.povm)))
      return false;
    const Channel qc = qc_channel(m);
    if (certs.contains("conjugate_witness_forward")) {
      const Channel w = channel_from_json(certs["conjugate_witness_forward"],
                                          "certificates.conjugate_witness_forward");
      const PreorderCertCheck c = check_channel_witness(qc, commutant_conjugate(qc), w);
      if (!against("conjugate_forward_action", c.witness_action)) return false;
    }
    if (certs.contains("conjugate_witness_backward")) {
      const Channel w = channel_from_json(certs["conjugate_witness_backward"],
                                          "certificates.conjugate_witness_backward");
      const PreorderCertCheck c = check_channel_witness(commutant_conjugate(qc), qc, w);
      if (!against("conjugate_backward_action", c.witness_action)) return false;
    }
    return true;
  }

  if (kind == "refine") {
    const Povm m = need_povm(problem, args[0]);
    if (!certs.contains("refined")) {
      *message = "refine report without the refined POVM";
      return false;
    }
    const Povm refined = povm_from_json(certs["refined"], "certificates.refined");
    if (!against("refined_validity", povm_validity_defect(refined))) return false;
    for (const auto& e : refined.effects)
      if (psd_rank(hermitize(e)) != 1) {
        *message = "refined POVM has an effect of rank != 1";
        return false;
      }
    if (certs.contains("kernel")) {
      const RMatrix k = rmatrix_from_json(certs["kernel"], "certificates.kernel");
      return against("kernel_stochastic", kernel_defect(k)) &&
             against("kernel_reconstruction",
                     kernel_reconstruction_defect(k, m, refined));
    }
    return true;
  }

  if (kind == "dilate") {
    const std::string type = object_type(problem, args[0]);
    if (type == "povm") {
      const Povm m = need_povm(problem, args[0]);
      const CMatrix v = cmatrix_from_json(certs["isometry"], "certificates.isometry");
      const int total = certs["dilation_dim"].get<int>();
      double iso = (v.adjoint() * v - CMatrix::Identity(m.dim, m.dim)).norm();
      double rec = 0.0, proj = 0.0;
      CMatrix psum = CMatrix::Zero(total, total);
      for (int i = 0; i < m.num_outcomes(); ++i) {
        const CMatrix p = cmatrix_from_json(certs["projections"][static_cast<std::size_t>(i)],
                                            "certificates.projections");
        rec = std::max(rec, (v.adjoint() * p * v -
                             m.effects[static_cast<std::size_t>(i)]).norm());
        proj = std::max(proj, (p * p - p).norm());
        psum += p;
      }
      proj = std::max(proj, (psum - CMatrix::Identity(total, total)).norm());
      int rank_sum = 0;
      for (const auto& e : m.effects) rank_sum += psd_rank(hermitize(e));
      return against("isometry_defect", iso) && against("reconstruction", rec) &&
             against("projection_defect", proj) &&
             against("dimension_defect", std::abs(total - rank_sum));
    }
    const Channel ch = need_channel(problem, args[0]);
    const CMatrix v = cmatrix_from_json(certs["isometry"], "certificates.isometry");
    const std::vector<int> mults = certs["multiplicities"].get<std::vector<int>>();
    const Representation rep = Representation::standard(ch.domain, mults);
    const int d = ch.codomain.block_size(0);
    double iso = (v.adjoint() * v - CMatrix::Identity(d, d)).norm();
    double rec = 0.0;
    for (const auto& e : hermitian_element_basis(ch.domain))
      rec = std::max(rec, (v.adjoint() * embed(rep, e) * v -
                           ch.apply(e).block_data[0]).norm());
    return against("isometry_defect", iso) && against("reconstruction", rec);
  }

  if (kind == "conjugate") {
    const Channel ch = need_channel(problem, args[0]);
    const Channel conj =
        channel_from_json(certs["conjugate"], "certificates.conjugate");
    if (!against("conjugate_validity", validate(conj).max_violation)) return false;
    std::vector<int> ranks;
    for (int i = 0; i < ch.domain.num_blocks(); ++i) {
      const int r = psd_rank(hermitize(ch.choi_block(i, 0)));
      if (r > 0) ranks.push_back(r);
    }
    return against("conjugate_domain_defect",
                   conj.domain.blocks == ranks ? 0.0 : 1.0);
  }

  if (kind == "canonicalize") {
    const Povm m = need_povm(problem, args[0]);
    const Povm canonical =
        povm_from_json(certs["canonical"], "certificates.canonical");
    const RMatrix k =
        rmatrix_from_json(certs["merge_kernel"], "certificates.merge_kernel");
    for (std::size_t a = 0; a < canonical.effects.size(); ++a) {
      if (canonical.effects[a].norm() <= 1e-10) {
        *message = "canonical POVM contains a zero effect";
        return false;
      }
      for (std::size_t b = a + 1; b < canonical.effects.size(); ++b) {
        const CMatrix na = canonical.effects[a] / canonical.effects[a].trace().real();
        const CMatrix nb = canonical.effects[b] / canonical.effects[b].trace().real();
        if ((na - nb).norm() <= 1e-8) {
          *message = "canonical POVM contains proportional effects";
          return false;
        }
      }
    }
    return against("canonical_validity", povm_validity_defect(canonical)) &&
           against("kernel_stochastic", kernel_defect(k)) &&
           against("kernel_reconstruction",
                   kernel_reconstruction_defect(k, canonical, m));
  }

  *message = "unknown query kind '" + kind + "'";
  return false;
}

}  // namespace

int verify_report(const json& report, const json& problem,
                  const std::string& problem_bytes, std::string* message) {
  std::string local;
  std::string* msg = message ? message : &local;
  try {
    if (!report.is_object() || report.value("version", "") != kSchemaVersion) {
      *msg = "report schema version mismatch";
      return 1;
    }
    if (!problem.is_object() || problem.value("version", "") != kSchemaVersion) {
      *msg = "problem schema version mismatch";
      return 1;
    }
    const std::string expected = fnv1a64_hex(problem_bytes);
    if (report.value("input_hash", "") != expected) {
      *msg = "HashMismatch: report input_hash does not match the problem file";
      return 1;
    }
    if (!report.contains("query") || !report.contains("certificates") ||
        !report.contains("residuals") || !report.contains("tolerances")) {
      *msg = "report is missing required sections";
      return 1;
    }
    if (!verify_certificates(report, problem, msg)) return 1;
    *msg = "verified";
    return 0;
  } catch (const Error& e) {
    *msg = e.what();
    return 1;
  } catch (const nlohmann::json::exception& e) {
    *msg = std::string("malformed report: ") + e.what();
    return 1;
  }
}

}  // namespace qcompat
