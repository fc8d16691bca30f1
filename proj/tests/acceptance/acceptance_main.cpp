// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
//
// End-to-end acceptance suite. Each criterion drives the batch runner the
// same way the CLI does, prints one PASS/FAIL line, and stashes every
// yes-verdict report so the final criterion can re-verify all certificates
// with the solver disabled.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "qcompat/dilation.hpp"
#include "qcompat/errors.hpp"
#include "qcompat/povmtools.hpp"
#include "qcompat/runner.hpp"

using namespace qcompat;
using nlohmann::json;

namespace {

struct YesReport {
  json problem;
  std::string bytes;
  json report;
};

std::vector<YesReport> g_yes_reports;

json problem_shell() {
  json p;
  p["version"] = kSchemaVersion;
  p["objects"] = json::object();
  p["options"] = json{{"feas_tol", 1e-7}, {"infeas_gap", 1e-4},
                      {"max_iters", 50000}, {"seed", 1}};
  return p;
}

RunOutcome run_and_collect(json problem, const std::string& kind,
                           const std::vector<std::string>& args) {
  problem["query"] = json{{"kind", kind}, {"args", args}};
  const std::string bytes = problem.dump();
  RunOutcome out = run_problem(problem, bytes);
  const std::string verdict = out.report["verdict"].get<std::string>();
  if (verdict == "yes" || verdict == "ok")
    g_yes_reports.push_back({problem, bytes, out.report});
  return out;
}

FdAlgebra domain_menu(int idx) {
  switch (idx % 4) {
    case 0: return FdAlgebra::full(2);
    case 1: return FdAlgebra::classical(2);
    case 2: return FdAlgebra::full(3);
    default: return FdAlgebra{{2, 1}};
  }
}

Channel depolarizing_to_mixed() {
  Channel ch = Channel::zero(FdAlgebra::full(2), FdAlgebra::full(2));
  ch.choi_block(0, 0) = 0.5 * CMatrix::Identity(4, 4);
  return ch;
}

Instrument lueders_instrument(const Povm& p) {
  Instrument ins;
  ins.domain = FdAlgebra::full(p.dim);
  ins.dim = p.dim;
  for (const auto& effect : p.effects) {
    Channel arm = Channel::zero(ins.domain, ins.domain);
    CMatrix& j = arm.choi_block(0, 0);
    for (int a = 0; a < p.dim; ++a)
      for (int b = 0; b < p.dim; ++b)
        j.block(a * p.dim, b * p.dim, p.dim, p.dim) =
            effect * matrix_unit(p.dim, a, b) * effect;
    ins.arms.push_back(std::move(arm));
  }
  return ins;
}

// --- criteria -------------------------------------------------------------

bool criterion_oracle_agreement(std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  int decided = 0, both_decided = 0;
  for (int t = 0; t < 50; ++t) {
    const FdAlgebra da = domain_menu(t);
    const FdAlgebra db = domain_menu(t / 4);
    const int d = 2 + (t % 2);
    json p = problem_shell();
    p["objects"]["lam"] =
        to_json(random_channel(da, FdAlgebra::full(d), 1000 + t));
    p["objects"]["gam"] =
        to_json(random_channel(db, FdAlgebra::full(d), 2000 + t));
    RunOutcome out;
    try {
      out = run_and_collect(p, "compat", {"lam", "gam"});
    } catch (const Error& e) {
      log << "route disagreement at pair " << t << ": " << e.what();
      return false;
    }
    if (out.report["verdict"] != "undecided") ++decided;
    if (out.report["routes"]["direct"] != "undecided" &&
        out.report["routes"]["conjugate"] != "undecided")
      ++both_decided;
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  log << decided << "/50 decided, " << both_decided
      << " cross-checked on both routes, " << secs << " s";
  return decided >= 45 && secs < 600.0;
}

bool criterion_double_conjugate(std::ostream& log) {
  int ok = 0;
  double worst = 0.0;
  for (int t = 0; t < 25; ++t) {
    const int d = 2 + (t % 2);
    const FdAlgebra dom = t % 5 == 4 ? FdAlgebra{{3, 2}} : domain_menu(t);
    const Channel lam = random_channel(dom, FdAlgebra::full(d), 3000 + t);
    const Channel lamcc = commutant_conjugate(commutant_conjugate(lam));
    json p = problem_shell();
    p["objects"]["lam"] = to_json(lam);
    p["objects"]["lamcc"] = to_json(lamcc);
    const RunOutcome out = run_and_collect(p, "equiv", {"lam", "lamcc"});
    if (out.report["verdict"] != "yes") {
      log << "pair " << t << " not equivalent (verdict "
          << out.report["verdict"] << "); ";
      continue;
    }
    worst = std::max({worst,
                      out.report["residuals"]["witness_forward_action"].get<double>(),
                      out.report["residuals"]["witness_backward_action"].get<double>()});
    ++ok;
  }
  log << ok << "/25 equivalent, worst witness residual " << worst;
  return ok == 25 && worst <= 1e-6;
}

bool criterion_no_cloning(std::ostream& log) {
  json p = problem_shell();
  p["objects"]["id"] = to_json(Channel::identity(FdAlgebra::full(2)));
  const RunOutcome out = run_and_collect(p, "compat", {"id", "id"});
  if (out.report["verdict"] != "no") {
    log << "verdict " << out.report["verdict"];
    return false;
  }
  const double gap = out.report["routes"]["conjugate_gap"].get<double>();
  log << "no with conjugate-route gap " << gap;
  return gap >= 0.05;
}

bool criterion_joint_measurability_threshold(std::ostream& log) {
  auto decide = [](double eta) -> std::pair<Tern, double> {
    json p = problem_shell();
    p["objects"]["mx"] = to_json(noisy_observable({1, 0, 0}, eta));
    p["objects"]["mz"] = to_json(noisy_observable({0, 0, 1}, eta));
    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome out = run_and_collect(p, "jointly-measurable", {"mx", "mz"});
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    const std::string v = out.report["verdict"].get<std::string>();
    return {v == "yes" ? Tern::Yes : v == "no" ? Tern::No : Tern::Undecided, secs};
  };

  const auto [low, tlow] = decide(0.5);
  const auto [high, thigh] = decide(0.9);
  if (low != Tern::Yes || high != Tern::No || tlow > 30.0 || thigh > 30.0) {
    log << "endpoints: eta=0.5 -> " << to_string(low) << " (" << tlow
        << " s), eta=0.9 -> " << to_string(high) << " (" << thigh << " s)";
    return false;
  }
  double lo = 0.5, hi = 0.9;
  for (int step = 0; step < 5; ++step) {
    const double mid = 0.5 * (lo + hi);
    const auto [v, secs] = decide(mid);
    if (secs > 30.0) {
      log << "midpoint " << mid << " took " << secs << " s";
      return false;
    }
    if (v == Tern::Undecided) break;
    (v == Tern::Yes ? lo : hi) = mid;
  }
  const double estimate = 0.5 * (lo + hi);
  const double target = 1.0 / std::sqrt(2.0);
  log << "bracket [" << lo << ", " << hi << "], estimate " << estimate
      << " vs " << target;
  return std::abs(estimate - target) <= 0.02;
}

bool criterion_povm_channel_routes(std::ostream& log) {
  int agreed = 0;
  for (int t = 0; t < 30; ++t) {
    const Povm m = random_povm(2, 2 + (t % 2), 4000 + t);
    const FdAlgebra dom = domain_menu(t);
    const Channel lam = random_channel(dom, FdAlgebra::full(2), 5000 + t);
    json p = problem_shell();
    p["objects"]["m"] = to_json(m);
    p["objects"]["lam"] = to_json(lam);
    try {
      const RunOutcome out = run_and_collect(p, "povm-channel", {"m", "lam"});
      (void)out;
      ++agreed;
    } catch (const Error& e) {
      log << "route disagreement at pair " << t << ": " << e.what();
      return false;
    }
  }

  // Lueders pair: compatible with a small instrument residual.
  const Povm sharp = noisy_observable({0, 0, 1}, 1.0);
  const auto [mp, lueders_channel] = instrument_marginals(lueders_instrument(sharp));
  json p = problem_shell();
  p["objects"]["m"] = to_json(sharp);
  p["objects"]["lueders"] = to_json(lueders_channel);
  const RunOutcome lued = run_and_collect(p, "povm-channel", {"m", "lueders"});
  if (lued.report["verdict"] != "yes") {
    log << "Lueders pair verdict " << lued.report["verdict"];
    return false;
  }
  const double resid = std::max(
      lued.report["residuals"]["instrument_effects"].get<double>(),
      lued.report["residuals"]["instrument_channel_action"].get<double>());

  // Sharp POVM with the identity channel: measurement disturbs.
  json q = problem_shell();
  q["objects"]["m"] = to_json(sharp);
  q["objects"]["id"] = to_json(Channel::identity(FdAlgebra::full(2)));
  const RunOutcome dist = run_and_collect(q, "povm-channel", {"m", "id"});
  log << agreed << "/30 pairs agree, Lueders residual " << resid
      << ", sharp+id verdict " << dist.report["verdict"];
  return agreed == 30 && resid <= 1e-6 && dist.report["verdict"] == "no";
}

bool criterion_qc_self_compatibility(std::ostream& log) {
  int ok = 0;
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + (t % 2);
    const int k = 2 + (t % 3);
    const Channel qc = qc_channel(random_povm(d, k, 6000 + t));
    json p = problem_shell();
    p["objects"]["qc"] = to_json(qc);
    const RunOutcome out = run_and_collect(p, "compat", {"qc", "qc"});
    if (out.report["verdict"] == "yes") ++ok;
  }
  log << ok << "/20 self-compatible";
  return ok == 20;
}

bool criterion_maximality_routes(std::ostream& log) {
  int checked = 0, planted_ok = 0;
  for (int t = 0; t < 30; ++t) {
    Povm m;
    int expected;  // 1 = maximal, 0 = not, -1 = unknown
    if (t % 3 == 0) {
      m = maximal_refinement(random_povm(2 + (t % 2), 2, 7000 + t));
      expected = 1;
    } else if (t % 3 == 1) {
      m = random_povm(2 + (t % 2), 2, 7100 + t);  // full-rank effects
      expected = 0;
    } else {
      m = random_povm(2, 3, 7200 + t);
      expected = -1;
    }
    json p = problem_shell();
    p["objects"]["m"] = to_json(m);
    try {
      const RunOutcome out = run_and_collect(p, "maximal", {"m"});
      ++checked;
      if (expected >= 0) {
        const bool is_max = out.report["verdict"] == "yes";
        if (is_max == (expected == 1)) ++planted_ok;
      } else {
        ++planted_ok;
      }
    } catch (const Error& e) {
      log << "route disagreement at POVM " << t << ": " << e.what();
      return false;
    }
  }
  log << checked << "/30 routes agree, " << planted_ok
      << "/30 planted verdicts correct";
  return checked == 30 && planted_ok == 30;
}

bool criterion_maximal_refinement(std::ostream& log) {
  int ok = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Povm m = random_povm(2 + (t % 2), 2 + (t % 2), 8000 + t);
    json p = problem_shell();
    p["objects"]["m"] = to_json(m);
    const RunOutcome out = run_and_collect(p, "refine", {"m"});
    if (out.report["verdict"] != "ok") continue;
    const auto ranks =
        out.report["certificates"]["refined_ranks"].get<std::vector<int>>();
    const bool rank1 =
        std::all_of(ranks.begin(), ranks.end(), [](int r) { return r == 1; });
    const double resid =
        out.report["residuals"]["kernel_reconstruction"].get<double>();
    worst = std::max(worst, resid);
    if (rank1 && resid <= 1e-7) ++ok;
  }
  log << ok << "/20 refinements maximal and certified, worst residual " << worst;
  return ok == 20;
}

bool criterion_dilation_exactness(std::ostream& log) {
  struct Fixture {
    std::string name;
    json object;
    int expected_dim;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({"trine", to_json(trine_povm()), 3});
  fixtures.push_back({"depolarizing", to_json(depolarizing_to_mixed()), 8});
  fixtures.push_back({"sharp_z", to_json(noisy_observable({0, 0, 1}, 1.0)), 2});
  fixtures.push_back({"trivial_d3", to_json(trivial_povm(3)), 3});
  fixtures.push_back(
      {"random_channel", to_json(random_channel(FdAlgebra{{2, 1}},
                                                FdAlgebra::full(2), 9001)), -1});
  fixtures.push_back({"random_povm_d3", to_json(random_povm(3, 3, 9002)), -1});

  double worst = 0.0;
  for (const auto& f : fixtures) {
    json p = problem_shell();
    p["objects"]["x"] = f.object;
    const RunOutcome out = run_and_collect(p, "dilate", {"x"});
    if (out.report["verdict"] != "ok") {
      log << f.name << " failed";
      return false;
    }
    for (const auto& [key, value] : out.report["residuals"].items()) {
      if (key == "dimension_defect") continue;
      worst = std::max(worst, value.get<double>());
    }
    if (f.expected_dim > 0 &&
        out.report["certificates"]["dilation_dim"].get<int>() != f.expected_dim) {
      log << f.name << " has dilation dim "
          << out.report["certificates"]["dilation_dim"] << ", expected "
          << f.expected_dim;
      return false;
    }
  }
  log << fixtures.size() << " fixtures, worst dilation residual " << worst;
  return worst <= 1e-9;
}

bool criterion_tensor_vs_commutant_conjugate(std::ostream& log) {
  int ok = 0;
  for (int t = 0; t < 15; ++t) {
    const int n = 2 + (t % 2);
    const int d = 2 + ((t / 2) % 2);
    const Channel lam =
        random_channel(FdAlgebra::full(n), FdAlgebra::full(d), 9100 + t);
    json p = problem_shell();
    p["objects"]["cconj"] = to_json(commutant_conjugate(lam));
    p["objects"]["tconj"] = to_json(complementary_channel(lam));
    const RunOutcome out = run_and_collect(p, "equiv", {"cconj", "tconj"});
    if (out.report["verdict"] == "yes") ++ok;
  }
  log << ok << "/15 conjugate pairs equivalent";
  return ok == 15;
}

bool criterion_experiment_channel_agreement(std::ostream& log) {
  int agreed = 0, decided = 0;
  for (int t = 0; t < 25; ++t) {
    const FdAlgebra ae = domain_menu(t);
    const FdAlgebra af = domain_menu(t + 1);
    const int params = 2 + (t % 3);
    const StatExperiment e = random_experiment(ae, params, 9200 + t);
    const StatExperiment f = random_experiment(af, params, 9300 + t);

    json p = problem_shell();
    p["objects"]["e"] = to_json(e);
    p["objects"]["f"] = to_json(f);
    const RunOutcome direct = run_and_collect(p, "preorder", {"e", "f"});

    json q = problem_shell();
    q["objects"]["le"] = to_json(associated_channel(e));
    q["objects"]["lf"] = to_json(associated_channel(f));
    const RunOutcome lifted = run_and_collect(q, "preorder", {"le", "lf"});

    if (direct.report["verdict"] == "undecided" ||
        lifted.report["verdict"] == "undecided")
      continue;
    ++decided;
    if (direct.report["verdict"] == lifted.report["verdict"]) ++agreed;
  }
  log << agreed << "/" << decided << " decided pairs agree (of 25)";
  return decided >= 20 && agreed == decided;
}

bool criterion_certificate_soundness(std::ostream& log) {
  int verified = 0;
  for (const auto& yr : g_yes_reports) {
    std::string msg;
    if (verify_report(yr.report, yr.problem, yr.bytes, &msg) != 0) {
      log << "verification failed: " << msg;
      return false;
    }
    ++verified;
  }
  log << verified << " yes/ok reports re-verified without the solver";
  return verified > 0;
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  struct Criterion {
    int number;
    const char* name;
    std::function<bool(std::ostream&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "joint-channel and conjugate compatibility oracles agree",
       criterion_oracle_agreement},
      {2, "channels are equivalent to their double conjugate",
       criterion_double_conjugate},
      {3, "no-cloning: identity incompatible with itself", criterion_no_cloning},
      {4, "noisy X/Z joint-measurability threshold near 1/sqrt(2)",
       criterion_joint_measurability_threshold},
      {5, "instrument and conjugate POVM-channel routes agree",
       criterion_povm_channel_routes},
      {6, "QC channels are self-compatible", criterion_qc_self_compatibility},
      {7, "rank-1 and conjugate maximality routes agree",
       criterion_maximality_routes},
      {8, "maximal refinements are maximal upper bounds",
       criterion_maximal_refinement},
      {9, "Stinespring and Naimark dilation exactness",
       criterion_dilation_exactness},
      {10, "tensor and commutant conjugates are equivalent",
       criterion_tensor_vs_commutant_conjugate},
      {11, "experiment order matches associated-channel order",
       criterion_experiment_channel_agreement},
      {12, "every yes certificate passes verify without the solver",
       criterion_certificate_soundness},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only && c.number != 12) continue;
    std::ostringstream log;
    bool ok = false;
    try {
      ok = c.run(log);
    } catch (const std::exception& e) {
      log << "exception: " << e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.number << ": "
              << c.name << " [" << log.str() << "]" << std::endl;
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
