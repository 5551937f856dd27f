#pragma once

// Experiment configuration: a single JSON document, validated against a fixed
// schema. Unknown keys are rejected; every error names the offending JSON path
// (or line/column for syntax errors).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "exsf/attenuation.hpp"
#include "exsf/metrics.hpp"
#include "exsf/simulation.hpp"

namespace exsf {

enum class Method { Proposed, SwfLoo, SwfIdeal, Pnn };

/// Stable identifiers used in configs and CSV output.
std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);
std::vector<Method> all_methods();

struct FrequencySweep {
  double start_hz = 100.0;
  double stop_hz = 2500.0;
  double step_hz = 50.0;

  /// start, start + step, ..., stop (inclusive within 1e-9 of a step).
  std::vector<double> values() const;
};

struct ProposedConfig {
  int max_order = 20;
  double lambda_cond = 0.0075;
  ConstraintBox box{};
  /// Initial lambda drawn log-uniformly from 10^[min, max] before (alpha, beta) optimization.
  double init_log10_lambda_min = -3.0;
  double init_log10_lambda_max = 1.0;
  /// Treat lambda as a third hyperparameter during (alpha, beta) optimization,
  /// starting from the random initial value. false keeps it fixed.
  bool learn_lambda = false;
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
};

struct LambdaGridConfig {
  double log10_min = -10.0;
  double log10_max = 2.0;
  double step = 0.25;
};

struct PnnConfig {
  int neurons = 100;
  double lambda = 1e-2;
  int iterations = 3000;
  double learning_rate = 1e-2;
};

struct NseConfig {
  double frequency_hz = 1000.0;
  GridSpec grid{};
  /// Array used for the maps; empty selects the first configured array.
  std::string array;
};

struct ExperimentConfig {
  RegionSpec region{};
  double speed_of_sound = 343.0;
  std::vector<ArraySpec> arrays;
  std::filesystem::path source_design_file;
  int source_design_order = 6;
  int source_design_points = 26;
  FrequencySweep sweep{};
  double snr_db = 20.0;
  int test_points = 500;
  std::vector<Method> methods;
  ProposedConfig proposed{};
  LambdaGridConfig lambda_grid{};
  PnnConfig pnn{};
  std::vector<std::uint64_t> seeds;
  NseConfig nse{};
  std::filesystem::path output_dir = "out";

  /// Throws ConfigError on inconsistent values or unreadable referenced files.
  void validate() const;
  const ArraySpec& nse_array() const;
};

/// The reference protocol: both arrays, 100 Hz - 2.5 kHz in 50 Hz steps,
/// 20 dB SNR, 500 test points, seeds 1..10.
ExperimentConfig default_config(const std::filesystem::path& data_dir = EXSF_DEFAULT_DATA_DIR);

/// Parse and validate; relative paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Canonical JSON form (absolute paths, every field explicit).
nlohmann::json config_to_json(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the canonical dump.
std::string config_hash(const ExperimentConfig& config);

}  // namespace exsf
