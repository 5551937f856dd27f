#include "exsf/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "exsf/errors.hpp"

namespace exsf {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::Proposed: return "proposed";
    case Method::SwfLoo: return "swf_loo";
    case Method::SwfIdeal: return "swf_ideal";
    case Method::Pnn: return "pnn";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Method> all_methods() { return {Method::Proposed, Method::SwfLoo, Method::SwfIdeal, Method::Pnn}; }

std::vector<double> FrequencySweep::values() const {
  std::vector<double> out;
  if (!(step_hz > 0.0)) return out;
  const int count = static_cast<int>(std::floor((stop_hz - start_hz) / step_hz + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) out.push_back(start_hz + i * step_hz);
  return out;
}

namespace {

// Read-only view of a JSON object that remembers where it sits in the document.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("at " + (path_.empty() ? std::string("/") : path_) + ": " + msg);
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!known.count(k)) throw ConfigError("at " + path_ + "/" + k + ": unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string child_path(const std::string& key) const { return path_ + "/" + key; }

  Node object(const char* key) const { return Node(j_.at(key), child_path(key)); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("at " + child_path(key) + ": expected a number");
    return v.get<double>();
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError("at " + child_path(key) + ": expected an integer");
    return v.get<int>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError("at " + child_path(key) + ": expected a string");
    return v.get<std::string>();
  }

  const json& raw(const char* key) const { return j_.at(key); }

  const json& array(const char* key) const {
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError("at " + child_path(key) + ": expected an array");
    return v;
  }

 private:
  const json& j_;
  std::string path_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string kind_name(ArrayKind k) { return k == ArrayKind::TDesign ? "t-design" : "random-volumetric"; }

ArraySpec parse_array(const Node& n, const std::filesystem::path& base) {
  n.allow({"name", "kind", "file", "order", "points", "radius"});
  ArraySpec a;
  const std::string kind = n.string("kind", "");
  if (kind == "t-design") {
    a.kind = ArrayKind::TDesign;
    if (!n.has("file")) n.fail("t-design array needs 'file'");
    a.design_file = resolve(base, n.string("file", ""));
    a.design_order = n.integer("order", 9);
    a.points = n.integer("points", 48);
    a.radius = n.number("radius", 0.81);
  } else if (kind == "random-volumetric") {
    a.kind = ArrayKind::RandomVolumetric;
    a.points = n.integer("points", 50);
    if (n.has("file") || n.has("order") || n.has("radius")) n.fail("random-volumetric arrays take only 'points'");
  } else {
    n.fail("kind must be 't-design' or 'random-volumetric'");
  }
  a.name = n.string("name", kind);
  return a;
}

void fill(ExperimentConfig& c, const Node& root, const std::filesystem::path& base) {
  root.allow({"region", "speed_of_sound", "arrays", "source_design", "frequency", "snr_db", "test_points", "methods",
              "proposed", "lambda_grid", "pnn", "seeds", "nse", "output_dir"});
  if (root.has("region")) {
    const auto n = root.object("region");
    n.allow({"source_radius", "inner_radius", "outer_radius"});
    c.region.source_radius = n.number("source_radius", c.region.source_radius);
    c.region.inner_radius = n.number("inner_radius", c.region.inner_radius);
    c.region.outer_radius = n.number("outer_radius", c.region.outer_radius);
  }
  c.speed_of_sound = root.number("speed_of_sound", c.speed_of_sound);
  if (root.has("arrays")) {
    c.arrays.clear();
    const auto& arr = root.array("arrays");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.arrays.push_back(parse_array(Node(arr[i], root.child_path("arrays") + "/" + std::to_string(i)), base));
  }
  if (root.has("source_design")) {
    const auto n = root.object("source_design");
    n.allow({"file", "order", "points"});
    if (n.has("file")) c.source_design_file = resolve(base, n.string("file", ""));
    c.source_design_order = n.integer("order", c.source_design_order);
    c.source_design_points = n.integer("points", c.source_design_points);
  }
  if (root.has("frequency")) {
    const auto n = root.object("frequency");
    n.allow({"start_hz", "stop_hz", "step_hz"});
    c.sweep.start_hz = n.number("start_hz", c.sweep.start_hz);
    c.sweep.stop_hz = n.number("stop_hz", c.sweep.stop_hz);
    c.sweep.step_hz = n.number("step_hz", c.sweep.step_hz);
  }
  c.snr_db = root.number("snr_db", c.snr_db);
  c.test_points = root.integer("test_points", c.test_points);
  if (root.has("methods")) {
    c.methods.clear();
    const auto& arr = root.array("methods");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = root.child_path("methods") + "/" + std::to_string(i);
      if (!arr[i].is_string()) throw ConfigError("at " + where + ": expected a method name");
      const auto m = parse_method(arr[i].get<std::string>());
      if (!m) throw ConfigError("at " + where + ": unknown method '" + arr[i].get<std::string>() + "'");
      c.methods.push_back(*m);
    }
  }
  if (root.has("proposed")) {
    const auto n = root.object("proposed");
    n.allow({"max_order", "lambda_cond", "box", "init_log10_lambda", "learn_lambda", "max_iterations",
             "gradient_tolerance"});
    auto& p = c.proposed;
    p.max_order = n.integer("max_order", p.max_order);
    p.lambda_cond = n.number("lambda_cond", p.lambda_cond);
    p.max_iterations = n.integer("max_iterations", p.max_iterations);
    if (n.has("learn_lambda")) {
      const auto& v = n.raw("learn_lambda");
      if (!v.is_boolean()) throw ConfigError("at " + n.child_path("learn_lambda") + ": expected true or false");
      p.learn_lambda = v.get<bool>();
    }
    p.gradient_tolerance = n.number("gradient_tolerance", p.gradient_tolerance);
    if (n.has("box")) {
      const auto b = n.object("box");
      b.allow({"delta_min", "delta_max", "beta_min", "beta_max"});
      p.box.delta_min = b.number("delta_min", p.box.delta_min);
      p.box.delta_max = b.number("delta_max", p.box.delta_max);
      p.box.beta_min = b.number("beta_min", p.box.beta_min);
      p.box.beta_max = b.number("beta_max", p.box.beta_max);
    }
    if (n.has("init_log10_lambda")) {
      const auto& r = n.array("init_log10_lambda");
      if (r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw ConfigError("at " + n.child_path("init_log10_lambda") + ": expected [min, max]");
      p.init_log10_lambda_min = r[0].get<double>();
      p.init_log10_lambda_max = r[1].get<double>();
    }
  }
  if (root.has("lambda_grid")) {
    const auto n = root.object("lambda_grid");
    n.allow({"log10_min", "log10_max", "step"});
    c.lambda_grid.log10_min = n.number("log10_min", c.lambda_grid.log10_min);
    c.lambda_grid.log10_max = n.number("log10_max", c.lambda_grid.log10_max);
    c.lambda_grid.step = n.number("step", c.lambda_grid.step);
  }
  if (root.has("pnn")) {
    const auto n = root.object("pnn");
    n.allow({"neurons", "lambda", "iterations", "learning_rate"});
    c.pnn.neurons = n.integer("neurons", c.pnn.neurons);
    c.pnn.lambda = n.number("lambda", c.pnn.lambda);
    c.pnn.iterations = n.integer("iterations", c.pnn.iterations);
    c.pnn.learning_rate = n.number("learning_rate", c.pnn.learning_rate);
  }
  if (root.has("seeds")) {
    c.seeds.clear();
    const auto& arr = root.array("seeds");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number_unsigned())
        throw ConfigError("at " + root.child_path("seeds") + "/" + std::to_string(i) + ": expected a nonnegative integer");
      c.seeds.push_back(arr[i].get<std::uint64_t>());
    }
  }
  if (root.has("nse")) {
    const auto n = root.object("nse");
    n.allow({"frequency_hz", "side_m", "resolution", "array"});
    c.nse.frequency_hz = n.number("frequency_hz", c.nse.frequency_hz);
    c.nse.grid.side = n.number("side_m", c.nse.grid.side);
    c.nse.grid.resolution = n.integer("resolution", c.nse.grid.resolution);
    c.nse.array = n.string("array", c.nse.array);
  }
  c.nse.grid.mask_radius = c.region.source_radius;
  if (root.has("output_dir")) c.output_dir = resolve(base, root.string("output_dir", ""));
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    region.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("at /region: ") + e.what());
  }
  if (!(speed_of_sound > 0.0)) throw ConfigError("at /speed_of_sound: must be positive");
  if (arrays.empty()) throw ConfigError("at /arrays: at least one array required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    const auto& a = arrays[i];
    const std::string where = "at /arrays/" + std::to_string(i);
    if (!names.insert(a.name).second) throw ConfigError(where + ": duplicate array name '" + a.name + "'");
    if (a.points < 1) throw ConfigError(where + "/points: must be positive");
    if (a.kind == ArrayKind::TDesign) {
      if (!std::filesystem::exists(a.design_file))
        throw ConfigError(where + "/file: not found: " + a.design_file.string());
      if (!(a.radius >= region.inner_radius && a.radius <= region.outer_radius))
        throw ConfigError(where + "/radius: must lie within the target shell");
    }
  }
  if (!std::filesystem::exists(source_design_file))
    throw ConfigError("at /source_design/file: not found: " + source_design_file.string());
  const auto freqs = sweep.values();
  if (!(sweep.start_hz > 0.0) || !(sweep.step_hz > 0.0) || !(sweep.stop_hz >= sweep.start_hz) || freqs.empty())
    throw ConfigError("at /frequency: need 0 < start_hz <= stop_hz and step_hz > 0");
  // Half-wavelength sampling of the NSE grid caps the meaningful band.
  const double spacing = nse.grid.side / nse.grid.resolution;
  const double limit = speed_of_sound / (2.0 * spacing);
  if (!(sweep.stop_hz < limit) || !(nse.frequency_hz > 0.0 && nse.frequency_hz < limit))
    throw ConfigError("at /frequency: frequencies must stay below " + std::to_string(limit) +
                      " Hz for the configured grid spacing");
  if (std::isnan(snr_db)) throw ConfigError("at /snr_db: must be a number");
  if (test_points < 1) throw ConfigError("at /test_points: must be positive");
  if (methods.empty()) throw ConfigError("at /methods: at least one method required");
  if (proposed.max_order < 0 || proposed.max_order > 25) throw ConfigError("at /proposed/max_order: must be in [0, 25]");
  if (!(proposed.lambda_cond >= 0.0)) throw ConfigError("at /proposed/lambda_cond: must be nonnegative");
  try {
    proposed.box.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("at /proposed/box: ") + e.what());
  }
  if (!(proposed.init_log10_lambda_max >= proposed.init_log10_lambda_min))
    throw ConfigError("at /proposed/init_log10_lambda: max must not be below min");
  if (proposed.max_iterations < 1) throw ConfigError("at /proposed/max_iterations: must be positive");
  if (!(lambda_grid.step > 0.0) || !(lambda_grid.log10_max >= lambda_grid.log10_min))
    throw ConfigError("at /lambda_grid: need step > 0 and log10_max >= log10_min");
  if (pnn.neurons < 1) throw ConfigError("at /pnn/neurons: must be positive");
  if (!(pnn.lambda >= 0.0)) throw ConfigError("at /pnn/lambda: must be nonnegative");
  if (pnn.iterations < 0) throw ConfigError("at /pnn/iterations: must be nonnegative");
  if (!(pnn.learning_rate > 0.0)) throw ConfigError("at /pnn/learning_rate: must be positive");
  if (seeds.empty()) throw ConfigError("at /seeds: at least one seed required");
  if (nse.grid.resolution < 1 || !(nse.grid.side > 0.0)) throw ConfigError("at /nse: invalid grid");
  if (!nse.array.empty() && !names.count(nse.array)) throw ConfigError("at /nse/array: unknown array '" + nse.array + "'");
}

const ArraySpec& ExperimentConfig::nse_array() const {
  if (nse.array.empty()) return arrays.at(0);
  for (const auto& a : arrays) {
    if (a.name == nse.array) return a;
  }
  throw ConfigError("at /nse/array: unknown array '" + nse.array + "'");
}

ExperimentConfig default_config(const std::filesystem::path& data_dir) {
  ExperimentConfig c;
  ArraySpec td;
  td.name = "tdesign";
  td.kind = ArrayKind::TDesign;
  td.design_file = data_dir / "tdesign" / "des.3.48.9.txt";
  td.design_order = 9;
  td.points = 48;
  td.radius = 0.81;
  ArraySpec rnd;
  rnd.name = "random";
  rnd.kind = ArrayKind::RandomVolumetric;
  rnd.points = 50;
  c.arrays = {td, rnd};
  c.source_design_file = data_dir / "tdesign" / "des.3.26.6.txt";
  c.methods = all_methods();
  for (std::uint64_t s = 1; s <= 10; ++s) c.seeds.push_back(s);
  c.nse.grid.mask_radius = c.region.source_radius;
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("syntax error at " + line_column(text, e.byte) + ": " + e.what());
  }
  ExperimentConfig c = default_config();
  try {
    fill(c, Node(doc, ""), base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open configuration file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::absolute(file).parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  json arrays = json::array();
  for (const auto& a : c.arrays) {
    json j{{"name", a.name}, {"kind", kind_name(a.kind)}, {"points", a.points}};
    if (a.kind == ArrayKind::TDesign) {
      j["file"] = a.design_file.string();
      j["order"] = a.design_order;
      j["radius"] = a.radius;
    }
    arrays.push_back(j);
  }
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  return {
      {"region",
       {{"source_radius", c.region.source_radius},
        {"inner_radius", c.region.inner_radius},
        {"outer_radius", c.region.outer_radius}}},
      {"speed_of_sound", c.speed_of_sound},
      {"arrays", arrays},
      {"source_design",
       {{"file", c.source_design_file.string()}, {"order", c.source_design_order}, {"points", c.source_design_points}}},
      {"frequency", {{"start_hz", c.sweep.start_hz}, {"stop_hz", c.sweep.stop_hz}, {"step_hz", c.sweep.step_hz}}},
      {"snr_db", c.snr_db},
      {"test_points", c.test_points},
      {"methods", methods},
      {"proposed",
       {{"max_order", c.proposed.max_order},
        {"lambda_cond", c.proposed.lambda_cond},
        {"box",
         {{"delta_min", c.proposed.box.delta_min},
          {"delta_max", c.proposed.box.delta_max},
          {"beta_min", c.proposed.box.beta_min},
          {"beta_max", c.proposed.box.beta_max}}},
        {"init_log10_lambda", {c.proposed.init_log10_lambda_min, c.proposed.init_log10_lambda_max}},
        {"learn_lambda", c.proposed.learn_lambda},
        {"max_iterations", c.proposed.max_iterations},
        {"gradient_tolerance", c.proposed.gradient_tolerance}}},
      {"lambda_grid", {{"log10_min", c.lambda_grid.log10_min}, {"log10_max", c.lambda_grid.log10_max}, {"step", c.lambda_grid.step}}},
      {"pnn",
       {{"neurons", c.pnn.neurons},
        {"lambda", c.pnn.lambda},
        {"iterations", c.pnn.iterations},
        {"learning_rate", c.pnn.learning_rate}}},
      {"seeds", c.seeds},
      {"nse",
       {{"frequency_hz", c.nse.frequency_hz},
        {"side_m", c.nse.grid.side},
        {"resolution", c.nse.grid.resolution},
        {"array", c.nse.array}}},
      {"output_dir", c.output_dir.string()},
  };
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string dump = config_to_json(config).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace exsf
