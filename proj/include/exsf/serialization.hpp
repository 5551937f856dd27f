#pragma once

// Versioned JSON records for fitted models. Doubles are written with
// round-trip precision, so a reloaded model predicts bit-identically.

#include "json.hpp"

#include "exsf/kernel.hpp"
#include "exsf/pnn.hpp"
#include "exsf/swf.hpp"

namespace exsf {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const KernelModel& model);
nlohmann::json to_json(const SwfModel& model);
nlohmann::json to_json(const PnnModel& model);

/// Throw IngestionError on a wrong record type, unknown version or missing field.
KernelModel kernel_model_from_json(const nlohmann::json& j);
SwfModel swf_model_from_json(const nlohmann::json& j);
PnnModel pnn_model_from_json(const nlohmann::json& j);

nlohmann::json positions_to_json(const PositionList& pts);
PositionList positions_from_json(const nlohmann::json& j);
nlohmann::json complex_to_json(const CVector& v);
CVector complex_from_json(const nlohmann::json& j);

}  // namespace exsf
