#include "exsf/serialization.hpp"

#include <string>

#include "exsf/errors.hpp"

namespace exsf {

using nlohmann::json;

namespace {

void check_header(const json& j, const std::string& type) {
  if (!j.is_object() || j.value("type", "") != type)
    throw IngestionError("expected a '" + type + "' record");
  if (j.value("version", -1) != kModelFormatVersion)
    throw IngestionError("unsupported " + type + " record version");
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw IngestionError(std::string("record is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IngestionError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

json positions_to_json(const PositionList& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x(), p.y(), p.z()});
  return arr;
}

PositionList positions_from_json(const json& j) {
  if (!j.is_array()) throw IngestionError("positions must be an array of [x, y, z]");
  PositionList pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3) throw IngestionError("position must be [x, y, z]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return pts;
}

json complex_to_json(const CVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

CVector complex_from_json(const json& j) {
  if (!j.is_array()) throw IngestionError("complex vector must be an array of [re, im]");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& c = j[i];
    if (!c.is_array() || c.size() != 2) throw IngestionError("complex value must be [re, im]");
    v(static_cast<Eigen::Index>(i)) = {c[0].get<double>(), c[1].get<double>()};
  }
  return v;
}

json to_json(const KernelModel& model) {
  return {{"type", "exsf.kernel_model"},
          {"version", kModelFormatVersion},
          {"alpha", model.params.alpha},
          {"beta", model.params.beta},
          {"box",
           {{"delta_min", model.params.box.delta_min},
            {"delta_max", model.params.box.delta_max},
            {"beta_min", model.params.box.beta_min},
            {"beta_max", model.params.box.beta_max}}},
          {"lambda", model.lambda},
          {"max_order", model.max_order},
          {"frequency_hz", model.frequency},
          {"speed_of_sound", model.speed_of_sound},
          {"wavenumber", model.context().wavenumber()},
          {"mic_positions", positions_to_json(model.mic_positions)},
          {"coefficients", complex_to_json(model.coefficients)}};
}

KernelModel kernel_model_from_json(const json& j) {
  check_header(j, "exsf.kernel_model");
  KernelModel m;
  m.params.alpha = field<double>(j, "alpha");
  m.params.beta = field<double>(j, "beta");
  if (j.contains("box")) {
    const auto& b = j.at("box");
    m.params.box = {field<double>(b, "delta_min"), field<double>(b, "delta_max"), field<double>(b, "beta_min"),
                    field<double>(b, "beta_max")};
  }
  m.lambda = field<double>(j, "lambda");
  m.max_order = field<int>(j, "max_order");
  m.frequency = field<double>(j, "frequency_hz");
  m.speed_of_sound = field<double>(j, "speed_of_sound");
  m.mic_positions = positions_from_json(j.at("mic_positions"));
  m.coefficients = complex_from_json(field<json>(j, "coefficients"));
  if (static_cast<std::size_t>(m.coefficients.size()) != m.mic_positions.size())
    throw IngestionError("kernel model: coefficient count differs from microphone count");
  return m;
}

json to_json(const SwfModel& model) {
  return {{"type", "exsf.swf_model"},
          {"version", kModelFormatVersion},
          {"max_order", model.max_order},
          {"lambda", model.lambda},
          {"frequency_hz", model.frequency},
          {"speed_of_sound", model.speed_of_sound},
          {"coefficients", complex_to_json(model.coefficients)}};
}

SwfModel swf_model_from_json(const json& j) {
  check_header(j, "exsf.swf_model");
  SwfModel m;
  m.max_order = field<int>(j, "max_order");
  m.lambda = field<double>(j, "lambda");
  m.frequency = field<double>(j, "frequency_hz");
  m.speed_of_sound = field<double>(j, "speed_of_sound");
  m.coefficients = complex_from_json(field<json>(j, "coefficients"));
  if (m.coefficients.size() != (m.max_order + 1) * (m.max_order + 1))
    throw IngestionError("swf model: coefficient count does not match truncation order");
  return m;
}

json to_json(const PnnModel& model) {
  return {{"type", "exsf.pnn_model"},
          {"version", kModelFormatVersion},
          {"lambda", model.lambda},
          {"radius_bound", model.radius_bound},
          {"frequency_hz", model.frequency},
          {"speed_of_sound", model.speed_of_sound},
          {"centers", positions_to_json(model.centers)},
          {"weights", complex_to_json(model.weights)}};
}

PnnModel pnn_model_from_json(const json& j) {
  check_header(j, "exsf.pnn_model");
  PnnModel m;
  m.lambda = field<double>(j, "lambda");
  m.radius_bound = field<double>(j, "radius_bound");
  m.frequency = field<double>(j, "frequency_hz");
  m.speed_of_sound = field<double>(j, "speed_of_sound");
  m.centers = positions_from_json(field<json>(j, "centers"));
  m.weights = complex_from_json(field<json>(j, "weights"));
  if (static_cast<std::size_t>(m.weights.size()) != m.centers.size())
    throw IngestionError("pnn model: weight count differs from centre count");
  return m;
}

}  // namespace exsf
