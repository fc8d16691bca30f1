// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/serialize.hpp"

#include "qcompat/errors.hpp"

namespace qcompat {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::ParseError, where + ": " + what);
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

}  // namespace

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix cmatrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a non-empty matrix array");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) bad(where, "expected nested row arrays");
  const std::size_t cols = j[0].size();
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      bad(where, "ragged matrix row " + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (!e.is_array() || e.size() != 2)
        bad(where, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                       ") is not an [re, im] pair");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(number_at(e[0], where), number_at(e[1], where));
    }
  }
  if (!all_finite(m)) bad(where, "matrix has non-finite entries");
  return m;
}

json to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RMatrix rmatrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a non-empty matrix array");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) bad(where, "expected nested row arrays");
  const std::size_t cols = j[0].size();
  RMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      bad(where, "ragged matrix row " + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_at(j[r][c], where);
  }
  return m;
}

json to_json(const FdAlgebra& a) { return json{{"blocks", a.blocks}}; }

FdAlgebra fdalgebra_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array())
    bad(where, "expected {\"blocks\": [...]}");
  FdAlgebra a;
  for (const auto& b : j["blocks"]) {
    if (!b.is_number_integer() || b.get<int>() < 1)
      bad(where, "block sizes must be integers >= 1");
    a.blocks.push_back(b.get<int>());
  }
  if (a.blocks.empty()) bad(where, "algebra needs at least one block");
  return a;
}

json to_json(const Channel& ch) {
  json blocks = json::object();
  for (int i = 0; i < ch.domain.num_blocks(); ++i)
    for (int j = 0; j < ch.codomain.num_blocks(); ++j)
      blocks[std::to_string(i) + "," + std::to_string(j)] =
          to_json(ch.choi_block(i, j));
  return json{{"type", "channel"},
              {"domain", to_json(ch.domain)},
              {"codomain", to_json(ch.codomain)},
              {"choi_blocks", std::move(blocks)}};
}

Channel channel_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("domain") || !j.contains("codomain") ||
      !j.contains("choi_blocks"))
    bad(where, "channel needs domain, codomain and choi_blocks");
  Channel ch = Channel::zero(fdalgebra_from_json(j["domain"], where + ".domain"),
                             fdalgebra_from_json(j["codomain"], where + ".codomain"));
  for (int i = 0; i < ch.domain.num_blocks(); ++i)
    for (int jj = 0; jj < ch.codomain.num_blocks(); ++jj) {
      const std::string key = std::to_string(i) + "," + std::to_string(jj);
      if (!j["choi_blocks"].contains(key))
        bad(where, "missing Choi block \"" + key + "\"");
      const CMatrix m =
          cmatrix_from_json(j["choi_blocks"][key], where + ".choi_blocks[" + key + "]");
      const int s = ch.domain.block_size(i) * ch.codomain.block_size(jj);
      if (m.rows() != s || m.cols() != s)
        bad(where, "Choi block \"" + key + "\" must be " + std::to_string(s) +
                       "x" + std::to_string(s));
      ch.choi_block(i, jj) = m;
    }
  return ch;
}

json to_json(const Povm& p) {
  json effects = json::array();
  for (const auto& e : p.effects) effects.push_back(to_json(e));
  return json{{"type", "povm"}, {"dim", p.dim}, {"effects", std::move(effects)}};
}

Povm povm_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("effects") ||
      !j["effects"].is_array())
    bad(where, "POVM needs dim and an effects array");
  Povm p;
  p.dim = j["dim"].get<int>();
  if (p.dim < 1) bad(where, "dim must be >= 1");
  int idx = 0;
  for (const auto& e : j["effects"]) {
    const std::string eff = where + ".effects[" + std::to_string(idx) + "]";
    const CMatrix m = cmatrix_from_json(e, eff);
    if (m.rows() != p.dim || m.cols() != p.dim)
      bad(eff, "effect must be " + std::to_string(p.dim) + "x" +
                   std::to_string(p.dim));
    if (!is_hermitian(m, 1e-8)) bad(eff, "effect is not Hermitian");
    p.effects.push_back(m);
    ++idx;
  }
  if (p.effects.empty()) bad(where, "POVM needs at least one effect");
  return p;
}

json to_json(const StatExperiment& e) {
  json states = json::array();
  for (const auto& s : e.states) {
    json blocks = json::array();
    for (const auto& b : s.block_data) blocks.push_back(to_json(b));
    states.push_back(std::move(blocks));
  }
  return json{{"type", "experiment"},
              {"algebra", to_json(e.algebra)},
              {"states", std::move(states)}};
}

StatExperiment experiment_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("algebra") || !j.contains("states") ||
      !j["states"].is_array())
    bad(where, "experiment needs algebra and a states array");
  StatExperiment e{fdalgebra_from_json(j["algebra"], where + ".algebra"), {}};
  int sidx = 0;
  for (const auto& s : j["states"]) {
    const std::string sw = where + ".states[" + std::to_string(sidx) + "]";
    if (!s.is_array() || s.size() != static_cast<std::size_t>(e.algebra.num_blocks()))
      bad(sw, "state needs one matrix per algebra block");
    AlgebraElement state = AlgebraElement::zero(e.algebra);
    for (int b = 0; b < e.algebra.num_blocks(); ++b) {
      const CMatrix m = cmatrix_from_json(s[static_cast<std::size_t>(b)],
                                          sw + "[" + std::to_string(b) + "]");
      const int n = e.algebra.block_size(b);
      if (m.rows() != n || m.cols() != n) bad(sw, "state block shape mismatch");
      state.block_data[static_cast<std::size_t>(b)] = m;
    }
    e.states.push_back(std::move(state));
    ++sidx;
  }
  if (e.states.empty()) bad(where, "experiment needs at least one state");
  return e;
}

json to_json(const Instrument& ins) {
  json arms = json::array();
  for (const auto& arm : ins.arms) arms.push_back(to_json(arm));
  return json{{"type", "instrument"},
              {"domain", to_json(ins.domain)},
              {"dim", ins.dim},
              {"arms", std::move(arms)}};
}

Instrument instrument_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("domain") || !j.contains("dim") ||
      !j.contains("arms") || !j["arms"].is_array())
    bad(where, "instrument needs domain, dim and arms");
  Instrument ins;
  ins.domain = fdalgebra_from_json(j["domain"], where + ".domain");
  ins.dim = j["dim"].get<int>();
  int idx = 0;
  for (const auto& a : j["arms"]) {
    ins.arms.push_back(
        channel_from_json(a, where + ".arms[" + std::to_string(idx) + "]"));
    ++idx;
  }
  return ins;
}

}  // namespace qcompat
