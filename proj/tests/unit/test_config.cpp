#include <string>

#include "doctest.h"
#include "exsf/config.hpp"
#include "exsf/errors.hpp"

using namespace exsf;

namespace {

const std::filesystem::path kConfigs = EXSF_TEST_CONFIG_DIR;
const std::filesystem::path kData = EXSF_DEFAULT_DATA_DIR;

std::string error_of(const std::string& text) {
  try {
    parse_config(text, kData);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("default protocol") {
  const auto c = default_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.sweep.values().size() == 49u);
  CHECK(c.sweep.values().front() == 100.0);
  CHECK(c.sweep.values().back() == 2500.0);
  CHECK(c.arrays.size() == 2u);
  CHECK(c.seeds.size() == 10u);
  CHECK(c.methods.size() == 4u);
  CHECK(c.snr_db == 20.0);
  CHECK(c.test_points == 500);
  CHECK(c.proposed.lambda_cond == 0.0075);
  CHECK(c.proposed.max_order == 20);
}

TEST_CASE("shipped configs load") {
  const auto protocol = load_config(kConfigs / "protocol.json");
  const auto def = default_config();
  CHECK(protocol.sweep.values() == def.sweep.values());
  CHECK(protocol.arrays[0].design_file == def.arrays[0].design_file.lexically_normal());
  CHECK_NOTHROW(load_config(kConfigs / "smoke.json"));
}

TEST_CASE("method names round trip") {
  for (auto m : all_methods()) CHECK(parse_method(method_name(m)) == m);
  CHECK_FALSE(parse_method("kriging").has_value());
}

TEST_CASE("unknown keys are rejected with their path") {
  const auto msg = error_of(R"({"frequency": {"start_hz": 100, "stpe_hz": 50}})");
  CHECK(msg.find("/frequency/stpe_hz") != std::string::npos);
  CHECK(error_of(R"({"colour": 1})").find("/colour") != std::string::npos);
  CHECK(error_of(R"({"proposed": {"box": {"delta_mn": 1}}})").find("/proposed/box/delta_mn") != std::string::npos);
}

TEST_CASE("type and value errors name their path") {
  CHECK(error_of(R"({"snr_db": "loud"})").find("/snr_db") != std::string::npos);
  CHECK(error_of(R"({"methods": ["proposed", "magic"]})").find("/methods/1") != std::string::npos);
  CHECK_FALSE(error_of(R"({"seeds": []})").empty());
  CHECK_FALSE(error_of(R"({"region": {"inner_radius": 0.1}})").empty());
  CHECK_FALSE(error_of(R"({"frequency": {"start_hz": 500, "stop_hz": 100}})").empty());
}

TEST_CASE("syntax errors report line and column") {
  const auto msg = error_of("{\n  \"snr_db\": 20,\n  oops\n}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("grid too coarse for the sweep is rejected") {
  CHECK_FALSE(error_of(R"({"nse": {"resolution": 5}})").empty());
  CHECK(error_of(R"({"nse": {"resolution": 100}})").empty());
}

TEST_CASE("relative paths resolve against the config directory") {
  const auto c = parse_config(R"({"source_design": {"file": "tdesign/des.3.26.6.txt"}})", kData);
  CHECK(c.source_design_file.is_absolute());
  CHECK(std::filesystem::exists(c.source_design_file));
  CHECK_FALSE(error_of(R"({"source_design": {"file": "tdesign/nope.txt"}})").empty());
}

TEST_CASE("canonical form and hash") {
  auto a = default_config();
  a.output_dir = "/tmp/exsf_out";
  const auto b = parse_config(config_to_json(a).dump(), "/");
  CHECK(config_to_json(a) == config_to_json(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16u);
  auto c = a;
  c.snr_db = 10.0;
  CHECK(config_hash(c) != config_hash(a));
}
