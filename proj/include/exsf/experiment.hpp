#pragma once

// Experiment driver: per-(seed, array, frequency) fits of every configured
// method, NMSE sweeps, NSE maps and summary tables.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "exsf/config.hpp"
#include "exsf/field_model.hpp"
#include "exsf/metrics.hpp"
#include "exsf/types.hpp"

namespace exsf {

/// Everything drawn once per seed and shared by all arrays, frequencies and methods.
struct SeedContext {
  std::uint64_t seed = 0;
  MonopoleScene scene;
  std::vector<PositionList> arrays;  // parallel to config.arrays
  PositionList test_points;
};

SeedContext make_seed_context(const ExperimentConfig& config, std::uint64_t seed);

/// One fitted estimator. alpha/beta are NaN for methods without them.
struct FittedMethod {
  Method method = Method::Proposed;
  FieldFunction predict;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  bool ok = false;
  std::string status;
};

struct CellRecord {
  std::string array;
  double frequency_hz = 0.0;
  Method method = Method::Proposed;
  std::uint64_t seed = 0;
  double nmse_db = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  bool oracle = false;
  std::string status;
  std::string config_hash;
  double seconds = 0.0;
};

/// Measure the scene at the array for this frequency and fit every configured method.
/// Per-method failures are reported through FittedMethod::status, never thrown.
/// truth_at_test is only handed to the ideal-lambda SWF reference.
std::vector<FittedMethod> fit_methods(const ExperimentConfig& config, const SeedContext& seed_ctx,
                                      std::size_t array_index, double frequency_hz,
                                      std::vector<double>* seconds = nullptr);

std::vector<CellRecord> run_cell(const ExperimentConfig& config, const SeedContext& seed_ctx,
                                 std::size_t array_index, double frequency_hz, const std::string& hash);

struct RunOptions {
  std::filesystem::path out_dir;
  int jobs = 1;
  /// Called after each cell is committed (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

struct RunResult {
  std::string config_hash;
  std::vector<CellRecord> records;
};

/// Writes nmse.csv (committed in cell order as cells finish), timings.csv and run.json.
RunResult run_sweep(const ExperimentConfig& config, const RunOptions& options);

struct NseResult {
  double frequency_hz = 0.0;
  /// method name -> per-seed median NSE (dB) over unmasked cells
  std::map<std::string, std::vector<double>> medians;
  /// method name -> median over all seeds' unmasked cells pooled
  std::map<std::string, double> pooled_median;
  std::size_t masked_cells = 0;
};

/// Per seed: ground-truth real-part grid, estimated real-part grid and NSE grid
/// per method, plus nse_summary.csv.
NseResult run_nse(const ExperimentConfig& config, double frequency_hz, const RunOptions& options);

struct MethodSummary {
  std::string method;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean_db = 0.0;
  double std_db = 0.0;
  double mean_below_db = 0.0;  // frequencies below the split
};

/// gap_db = mean(other) - mean(method): positive when `method` has the lower error.
struct GapSummary {
  std::string method;
  std::string other;
  double gap_db = 0.0;
  double gap_below_db = 0.0;
};

struct Summary {
  double split_hz = 1600.0;
  std::vector<MethodSummary> methods;
  std::vector<GapSummary> gaps;
  /// (frequency, method) -> mean NMSE over seeds and arrays
  std::map<std::pair<double, std::string>, double> by_frequency;
};

Summary summarize(const std::vector<CellRecord>& records, double split_hz = 1600.0);
void write_summary_csv(std::ostream& os, const Summary& summary);
void write_summary_text(std::ostream& os, const Summary& summary);

void write_records_header(std::ostream& os);
void write_record(std::ostream& os, const CellRecord& record);
/// Reads an nmse.csv written by run_sweep. Throws IngestionError on malformed rows.
std::vector<CellRecord> read_records_csv(const std::filesystem::path& file);

/// Frequency label used for per-cell random streams (milli-hertz, so the label
/// does not depend on the sweep layout).
std::uint64_t frequency_label(double frequency_hz);

}  // namespace exsf
