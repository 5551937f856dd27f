#include "exsf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "exsf/errors.hpp"
#include "exsf/gpr.hpp"
#include "exsf/kernel.hpp"
#include "exsf/lambda_search.hpp"
#include "exsf/pnn.hpp"
#include "exsf/simulation.hpp"
#include "exsf/swf.hpp"

namespace exsf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Keeps free-form messages inside a single CSV field.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

CVector eval_field(const WaveContext& ctx, const MonopoleScene& scene, const PositionList& pts) {
  CVector out(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out(static_cast<Eigen::Index>(i)) = scene_field(ctx, scene, pts[i]);
  return out;
}

FittedMethod failed(Method m, const std::string& what) {
  FittedMethod f;
  f.method = m;
  f.alpha = f.beta = f.lambda = kNaN;
  f.ok = false;
  f.status = "error: " + sanitize(what);
  return f;
}

template <class Fn>
FittedMethod guarded(Method m, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return failed(m, e.what());
  }
}

FittedMethod fit_proposed(const ExperimentConfig& cfg, const WaveContext& ctx, const PositionList& pos,
                          const CVector& s, std::mt19937_64 rng) {
  const auto& p = cfg.proposed;
  std::uniform_real_distribution<double> u(p.init_log10_lambda_min, p.init_log10_lambda_max);
  const double lambda0 = std::pow(10.0, u(rng));
  GprProblem problem(ctx, p.max_order, pos, s, lambda0, p.lambda_cond);
  optimize::BfgsOptions opts;
  opts.max_iterations = p.max_iterations;
  opts.gradient_tolerance = p.gradient_tolerance;
  const auto init = default_initial_params(ctx, pos, p.box);
  const auto hyper = p.learn_lambda ? optimize_hyperparams_with_lambda(problem, p.box, init, opts)
                                    : optimize_hyperparams(problem, p.box, init, opts);
  const CMatrix gram = problem.gram(hyper.params.alpha, hyper.params.beta);
  const auto lambdas = log_lambda_grid(cfg.lambda_grid.log10_min, cfg.lambda_grid.log10_max, cfg.lambda_grid.step);
  const auto search = loo_cv_krr(gram, s, lambdas);
  auto model = std::make_shared<KernelModel>(
      fit_kernel_model(ctx, hyper.params, p.max_order, pos, s, search.best_lambda));
  auto predictor = std::make_shared<KernelPredictor>(*model);
  FittedMethod f;
  f.method = Method::Proposed;
  f.predict = [predictor](const PositionList& pts) { return predictor->predict(pts); };
  f.alpha = hyper.params.alpha;
  f.beta = hyper.params.beta;
  f.lambda = search.best_lambda;
  f.ok = true;
  f.status = "ok";
  return f;
}

FittedMethod swf_result(Method m, const WaveContext& ctx, const SwfDesign& design, int order, const CVector& s,
                        double lambda) {
  auto model = std::make_shared<SwfModel>();
  model->max_order = order;
  model->lambda = lambda;
  model->frequency = ctx.frequency();
  model->speed_of_sound = ctx.speed_of_sound();
  model->coefficients = swf_fit(design, s, lambda);
  FittedMethod f;
  f.method = m;
  f.predict = [model](const PositionList& pts) { return swf_predict(*model, pts); };
  f.alpha = f.beta = kNaN;
  f.lambda = lambda;
  f.ok = true;
  f.status = "ok";
  return f;
}

}  // namespace

std::uint64_t frequency_label(double frequency_hz) {
  return static_cast<std::uint64_t>(std::llround(frequency_hz * 1000.0));
}

SeedContext make_seed_context(const ExperimentConfig& config, std::uint64_t seed) {
  SeedContext sc;
  sc.seed = seed;
  const auto dirs = load_tdesign(config.source_design_order, config.source_design_points, config.source_design_file);
  auto scene_rng = substream(seed, {1});
  sc.scene = make_source_scene(config.region, dirs, scene_rng);
  PositionList all_mics;
  for (std::size_t a = 0; a < config.arrays.size(); ++a) {
    auto rng = substream(seed, {3, a});
    sc.arrays.push_back(make_array(config.arrays[a], config.region, rng));
    all_mics.insert(all_mics.end(), sc.arrays.back().begin(), sc.arrays.back().end());
  }
  auto test_rng = substream(seed, {2});
  sc.test_points = sample_test_points(config.region, config.test_points, all_mics, test_rng);
  return sc;
}

std::vector<FittedMethod> fit_methods(const ExperimentConfig& config, const SeedContext& sc, std::size_t array_index,
                                      double frequency_hz, std::vector<double>* seconds) {
  const WaveContext ctx(frequency_hz, config.speed_of_sound);
  const PositionList& pos = sc.arrays.at(array_index);
  const std::uint64_t fl = frequency_label(frequency_hz);
  auto noise_rng = substream(sc.seed, {4, array_index, fl});
  const CVector s = measure(ctx, sc.scene, pos, config.snr_db, noise_rng);

  // SWF design and its lambda grid are shared between the two SWF variants.
  std::optional<SwfDesign> design;
  int swf_order = swf_truncation(pos.size());
  const auto lambdas = log_lambda_grid(config.lambda_grid.log10_min, config.lambda_grid.log10_max, config.lambda_grid.step);
  auto get_design = [&]() -> const SwfDesign& {
    if (!design) design = swf_design_matrices(ctx, pos, swf_order);
    return *design;
  };

  std::vector<FittedMethod> out;
  if (seconds) seconds->clear();
  for (Method m : config.methods) {
    const auto t0 = std::chrono::steady_clock::now();
    FittedMethod f = guarded(m, [&]() -> FittedMethod {
      switch (m) {
        case Method::Proposed:
          return fit_proposed(config, ctx, pos, s, substream(sc.seed, {5, array_index, fl}));
        case Method::SwfLoo: {
          const auto& d = get_design();
          const auto search = swf_loo_lambda(d, s, lambdas);
          return swf_result(m, ctx, d, swf_order, s, search.best_lambda);
        }
        case Method::SwfIdeal: {
          const auto& d = get_design();
          const CMatrix test_psi = swf_basis(ctx, sc.test_points, swf_order);
          const CVector truth = eval_field(ctx, sc.scene, sc.test_points);
          const auto search = swf_ideal_lambda(d, s, lambdas, test_psi, truth);
          return swf_result(m, ctx, d, swf_order, s, search.best_lambda);
        }
        case Method::Pnn: {
          PnnOptions opts;
          opts.iterations = config.pnn.iterations;
          opts.learning_rate = config.pnn.learning_rate;
          opts.init_radius = config.region.source_radius;
          auto seed_rng = substream(sc.seed, {6, array_index, fl});
          auto model = std::make_shared<PnnModel>(pnn_fit(ctx, pos, s, config.pnn.neurons, config.pnn.lambda,
                                                          config.region.inner_radius, seed_rng(), opts));
          FittedMethod r;
          r.method = m;
          r.predict = [model](const PositionList& pts) { return pnn_forward(*model, pts); };
          r.alpha = r.beta = kNaN;
          r.lambda = config.pnn.lambda;
          r.ok = true;
          r.status = "ok";
          return r;
        }
      }
      throw ConfigError("unknown method");
    });
    if (seconds) seconds->push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<CellRecord> run_cell(const ExperimentConfig& config, const SeedContext& sc, std::size_t array_index,
                                 double frequency_hz, const std::string& hash) {
  std::vector<CellRecord> records;
  std::vector<double> seconds;
  std::vector<FittedMethod> fits;
  try {
    fits = fit_methods(config, sc, array_index, frequency_hz, &seconds);
  } catch (const std::exception& e) {
    // Measurement itself failed: every method in the cell carries the diagnostic.
    for (Method m : config.methods) fits.push_back(failed(m, e.what()));
    seconds.assign(fits.size(), 0.0);
  }
  const WaveContext ctx(frequency_hz, config.speed_of_sound);
  const CVector truth = eval_field(ctx, sc.scene, sc.test_points);
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& f = fits[i];
    CellRecord r;
    r.array = config.arrays.at(array_index).name;
    r.frequency_hz = frequency_hz;
    r.method = f.method;
    r.seed = sc.seed;
    r.alpha = f.alpha;
    r.beta = f.beta;
    r.lambda = f.lambda;
    r.oracle = f.method == Method::SwfIdeal;
    r.config_hash = hash;
    r.seconds = seconds.at(i);
    r.status = f.status;
    r.nmse_db = kNaN;
    if (f.ok) {
      try {
        r.nmse_db = nmse_db(truth, f.predict(sc.test_points));
      } catch (const std::exception& e) {
        r.status = "error: " + sanitize(e.what());
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_records_header(std::ostream& os) {
  os << "array,frequency_hz,method,seed,nmse_db,alpha,beta,lambda,oracle,status,config_hash\n";
}

void write_record(std::ostream& os, const CellRecord& r) {
  os << r.array << ',' << fmt(r.frequency_hz) << ',' << method_name(r.method) << ',' << r.seed << ','
     << fmt(r.nmse_db) << ',' << fmt(r.alpha) << ',' << fmt(r.beta) << ',' << fmt(r.lambda) << ','
     << (r.oracle ? "true" : "false") << ',' << r.status << ',' << r.config_hash << '\n';
}

namespace {

void write_manifest(const ExperimentConfig& config, const std::string& hash, const std::filesystem::path& file,
                    const nlohmann::json& extra) {
  nlohmann::json j;
  j["tool"] = "exsf";
  j["version"] = kVersion;
  j["config_hash"] = hash;
  j["config"] = config_to_json(config);
  j["seeds"] = config.seeds;
  j["swf_weights"] = "equal 1/M";
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream out(file);
  if (!out) throw IngestionError("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IngestionError("cannot write " + file.string());
  return out;
}

}  // namespace

RunResult run_sweep(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::string hash = config_hash(config);
  const auto out_dir = options.out_dir.empty() ? config.output_dir : options.out_dir;
  std::filesystem::create_directories(out_dir);

  std::vector<SeedContext> seeds;
  for (auto seed : config.seeds) seeds.push_back(make_seed_context(config, seed));

  struct Cell {
    std::size_t seed_index;
    std::size_t array_index;
    double frequency;
  };
  std::vector<Cell> cells;
  const auto freqs = config.sweep.values();
  for (std::size_t si = 0; si < seeds.size(); ++si)
    for (std::size_t a = 0; a < config.arrays.size(); ++a)
      for (double f : freqs) cells.push_back({si, a, f});

  write_manifest(config, hash, out_dir / "run.json",
                 {{"cells", cells.size()}, {"frequencies", freqs.size()}, {"outputs", {"nmse.csv", "timings.csv"}}});

  auto nmse_out = open_out(out_dir / "nmse.csv");
  auto time_out = open_out(out_dir / "timings.csv");
  write_records_header(nmse_out);
  time_out << "array,frequency_hz,method,seed,seconds\n";
  nmse_out.flush();

  std::vector<std::optional<std::vector<CellRecord>>> done(cells.size());
  std::size_t next_commit = 0;
  std::mutex mu;
  std::atomic<std::size_t> next_cell{0};
  RunResult result;
  result.config_hash = hash;

  // Single collector: finished cells are written strictly in cell order.
  auto commit = [&](std::size_t index, std::vector<CellRecord> recs) {
    std::lock_guard<std::mutex> lock(mu);
    done[index] = std::move(recs);
    while (next_commit < cells.size() && done[next_commit]) {
      for (const auto& r : *done[next_commit]) {
        write_record(nmse_out, r);
        time_out << r.array << ',' << fmt(r.frequency_hz) << ',' << method_name(r.method) << ',' << r.seed << ','
                 << fmt(r.seconds) << '\n';
        result.records.push_back(r);
      }
      done[next_commit].reset();
      ++next_commit;
      nmse_out.flush();
      time_out.flush();
      if (options.progress) options.progress(next_commit, cells.size());
    }
  };

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next_cell.fetch_add(1);
      if (i >= cells.size()) return;
      const auto& c = cells[i];
      commit(i, run_cell(config, seeds[c.seed_index], c.array_index, c.frequency, hash));
    }
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

NseResult run_nse(const ExperimentConfig& config, double frequency_hz, const RunOptions& options) {
  config.validate();
  if (!(frequency_hz > 0.0)) throw ConfigError("NSE frequency must be positive");
  const std::string hash = config_hash(config);
  const auto out_dir = options.out_dir.empty() ? config.output_dir : options.out_dir;
  std::filesystem::create_directories(out_dir);

  std::size_t array_index = 0;
  const auto& chosen = config.nse_array();
  for (std::size_t a = 0; a < config.arrays.size(); ++a)
    if (config.arrays[a].name == chosen.name) array_index = a;

  GridSpec grid = config.nse.grid;
  grid.mask_radius = config.region.source_radius;
  const WaveContext ctx(frequency_hz, config.speed_of_sound);

  NseResult result;
  result.frequency_hz = frequency_hz;
  std::map<std::string, std::vector<double>> pooled;
  std::vector<std::optional<std::vector<std::pair<std::string, std::vector<double>>>>> per_seed(config.seeds.size());
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::size_t masked = 0;

  auto run_seed = [&](std::size_t si) {
    const auto seed = config.seeds[si];
    const auto sc = make_seed_context(config, seed);
    const auto fits = fit_methods(config, sc, array_index, frequency_hz);
    const FieldFunction truth = [&](const PositionList& pts) { return eval_field(ctx, sc.scene, pts); };
    std::map<std::string, std::string> meta{{"frequency_hz", fmt(frequency_hz)},
                                            {"seed", std::to_string(seed)},
                                            {"array", chosen.name},
                                            {"side_m", fmt(grid.side)},
                                            {"resolution", std::to_string(grid.resolution)},
                                            {"mask_radius_m", fmt(grid.mask_radius)},
                                            {"plane", "z=0"},
                                            {"config_hash", hash}};
    {
      auto m = meta;
      m["field"] = "ground_truth_real";
      auto out = open_out(out_dir / ("truth_seed" + std::to_string(seed) + ".csv"));
      const auto g = real_part_map(truth, grid);
      write_grid_csv(out, g, m);
      std::lock_guard<std::mutex> lock(mu);
      masked = g.masked_count();
    }
    std::vector<std::pair<std::string, std::vector<double>>> values;
    for (const auto& f : fits) {
      const std::string name = method_name(f.method);
      if (!f.ok) {
        values.emplace_back(name, std::vector<double>{});
        continue;
      }
      auto m = meta;
      m["method"] = name;
      m["oracle"] = f.method == Method::SwfIdeal ? "true" : "false";
      m["field"] = "estimate_real";
      {
        auto out = open_out(out_dir / ("estimate_" + name + "_seed" + std::to_string(seed) + ".csv"));
        write_grid_csv(out, real_part_map(f.predict, grid), m);
      }
      m["field"] = "nse_db";
      const auto g = nse_map(truth, f.predict, grid);
      auto out = open_out(out_dir / ("nse_" + name + "_seed" + std::to_string(seed) + ".csv"));
      write_grid_csv(out, g, m);
      values.emplace_back(name, g.unmasked());
    }
    std::lock_guard<std::mutex> lock(mu);
    per_seed[si] = std::move(values);
  };

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.seeds.size()) return;
      run_seed(i);
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(config.seeds.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  auto out = open_out(out_dir / "nse_summary.csv");
  out << "method,seed,median_nse_db\n";
  for (std::size_t si = 0; si < config.seeds.size(); ++si) {
    for (const auto& [name, vals] : *per_seed[si]) {
      const double med = vals.empty() ? kNaN : median(vals);
      result.medians[name].push_back(med);
      pooled[name].insert(pooled[name].end(), vals.begin(), vals.end());
      out << name << ',' << config.seeds[si] << ',' << fmt(med) << '\n';
    }
  }
  for (const auto& [name, vals] : pooled) {
    result.pooled_median[name] = vals.empty() ? kNaN : median(vals);
    out << name << ",pooled," << fmt(result.pooled_median[name]) << '\n';
  }
  result.masked_cells = masked;
  write_manifest(config, hash, out_dir / "nse_run.json",
                 {{"nse_frequency_hz", frequency_hz}, {"nse_array", chosen.name}, {"masked_cells", masked}});
  return result;
}

Summary summarize(const std::vector<CellRecord>& records, double split_hz) {
  Summary s;
  s.split_hz = split_hz;
  std::vector<std::string> order;
  struct Acc {
    std::vector<double> all, below;
    std::size_t failures = 0;
    std::map<std::tuple<std::string, double, std::uint64_t>, double> cells;
  };
  std::map<std::string, Acc> acc;
  std::map<std::pair<double, std::string>, std::pair<double, std::size_t>> freq_acc;
  for (const auto& r : records) {
    const std::string name = method_name(r.method);
    if (!acc.count(name)) order.push_back(name);
    auto& a = acc[name];
    if (!std::isfinite(r.nmse_db)) {
      ++a.failures;
      continue;
    }
    a.all.push_back(r.nmse_db);
    if (r.frequency_hz < split_hz) a.below.push_back(r.nmse_db);
    auto& fa = freq_acc[{r.frequency_hz, name}];
    fa.first += r.nmse_db;
    fa.second += 1;
  }
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double t = 0.0;
    for (double x : v) t += x;
    return t / static_cast<double>(v.size());
  };
  for (const auto& name : order) {
    const auto& a = acc[name];
    MethodSummary m;
    m.method = name;
    m.count = a.all.size();
    m.failures = a.failures;
    m.mean_db = mean(a.all);
    m.mean_below_db = mean(a.below);
    double ss = 0.0;
    for (double x : a.all) ss += (x - m.mean_db) * (x - m.mean_db);
    m.std_db = a.all.size() > 1 ? std::sqrt(ss / static_cast<double>(a.all.size() - 1)) : 0.0;
    s.methods.push_back(m);
  }
  for (const auto& a : s.methods)
    for (const auto& b : s.methods) {
      if (a.method == b.method) continue;
      s.gaps.push_back({a.method, b.method, b.mean_db - a.mean_db, b.mean_below_db - a.mean_below_db});
    }
  for (const auto& [key, v] : freq_acc) s.by_frequency[key] = v.first / static_cast<double>(v.second);
  return s;
}

void write_summary_csv(std::ostream& os, const Summary& s) {
  os << "kind,method,other,value_db,below_split_db,count,failures\n";
  for (const auto& m : s.methods)
    os << "mean," << m.method << ",," << fmt(m.mean_db) << ',' << fmt(m.mean_below_db) << ',' << m.count << ','
       << m.failures << '\n';
  for (const auto& m : s.methods) os << "std," << m.method << ",," << fmt(m.std_db) << ",,," << '\n';
  for (const auto& g : s.gaps)
    os << "gap," << g.method << ',' << g.other << ',' << fmt(g.gap_db) << ',' << fmt(g.gap_below_db) << ",," << '\n';
  for (const auto& [key, v] : s.by_frequency)
    os << "frequency_mean," << key.second << ',' << fmt(key.first) << ',' << fmt(v) << ",,," << '\n';
}

void write_summary_text(std::ostream& os, const Summary& s) {
  char line[256];
  os << "Mean NMSE over all frequencies, seeds and arrays\n";
  std::snprintf(line, sizeof line, "  %-10s %10s %10s %10s %8s %8s\n", "method", "mean[dB]", "std[dB]", "<split", "n",
                "failed");
  os << line;
  for (const auto& m : s.methods) {
    std::snprintf(line, sizeof line, "  %-10s %10.3f %10.3f %10.3f %8zu %8zu\n", m.method.c_str(), m.mean_db,
                  m.std_db, m.mean_below_db, m.count, m.failures);
    os << line;
  }
  std::snprintf(line, sizeof line, "Average gaps (positive: first method has lower error; split at %.0f Hz)\n",
                s.split_hz);
  os << line;
  for (const auto& g : s.gaps) {
    std::snprintf(line, sizeof line, "  %-10s vs %-10s %8.3f dB   below split %8.3f dB\n", g.method.c_str(),
                  g.other.c_str(), g.gap_db, g.gap_below_db);
    os << line;
  }
}

namespace {

double parse_number(const std::string& text) {
  if (text == "nan") return kNaN;
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw IngestionError("malformed number '" + text + "'");
  return v;
}

}  // namespace

std::vector<CellRecord> read_records_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IngestionError("cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("array,frequency_hz,method", 0) != 0) throw IngestionError(file.string() + ":1: unexpected header");
  std::vector<CellRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw IngestionError(file.string() + ":" + std::to_string(lineno) + ": expected 11 fields");
    try {
      CellRecord r;
      r.array = f[0];
      r.frequency_hz = std::stod(f[1]);
      const auto m = parse_method(f[2]);
      if (!m) throw IngestionError("unknown method '" + f[2] + "'");
      r.method = *m;
      r.seed = std::stoull(f[3]);
      r.nmse_db = parse_number(f[4]);
      r.alpha = parse_number(f[5]);
      r.beta = parse_number(f[6]);
      r.lambda = parse_number(f[7]);
      r.oracle = f[8] == "true";
      r.status = f[9];
      r.config_hash = f[10];
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw IngestionError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace exsf
