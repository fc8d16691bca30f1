// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_SERIALIZE_HPP
#define QCOMPAT_SERIALIZE_HPP

#include <json.hpp>

#include "qcompat/compat.hpp"
#include "qcompat/experiments.hpp"
#include "qcompat/order.hpp"

namespace qcompat {

// Schema "qcompat/1": complex numbers as [re, im] pairs, matrices as
// row-major nested arrays, FdAlgebra as {"blocks": [...]}, channels as
// {"domain", "codomain", "choi_blocks": {"i,j": matrix}}, POVMs as
// {"dim", "effects": [matrix, ...]}.
inline constexpr const char* kSchemaVersion = "qcompat/1";

nlohmann::json to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const RMatrix& m);
RMatrix rmatrix_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const FdAlgebra& a);
FdAlgebra fdalgebra_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const Channel& ch);
Channel channel_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const Povm& p);
Povm povm_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const StatExperiment& e);
StatExperiment experiment_from_json(const nlohmann::json& j,
                                    const std::string& where);

nlohmann::json to_json(const Instrument& ins);
Instrument instrument_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace qcompat

#endif
