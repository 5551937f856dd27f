// Acceptance run: one PASS/FAIL line per criterion.
//
//   exsf_acceptance [--criteria 1,2,...] [--work-dir DIR] [--jobs N] [--expect-fail 8]
//
// Exit status is nonzero when a criterion fails that was not listed in
// --expect-fail, or when a criterion throws.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "exsf/attenuation.hpp"
#include "exsf/config.hpp"
#include "exsf/experiment.hpp"
#include "exsf/gpr.hpp"
#include "exsf/kernel.hpp"
#include "exsf/metrics.hpp"
#include "exsf/simulation.hpp"
#include "exsf/swf.hpp"
#include "oracles.hpp"

using namespace exsf;

namespace {

const std::filesystem::path kData = EXSF_DEFAULT_DATA_DIR;
const std::filesystem::path kConfigs = EXSF_ACCEPTANCE_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Context {
  std::filesystem::path work_dir;
  int jobs = 1;
};

std::string num(double v, const char* f = "%.3g") {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

PositionList design(int order, int points, const char* file) {
  return load_tdesign(order, points, kData / "tdesign" / file);
}

Outcome xi_closed_form(const Context&) {
  double worst = 0.0;
  for (double a : {0.5, 2.0, 10.0, 50.0})
    for (double b : {0.5, 1.0, 2.0, 4.0}) worst = std::max(worst, oracle::rel_err(xi(0, a, b), oracle::xi0(a, b)));
  return {worst < 1e-6, "max rel err " + num(worst)};
}

Outcome kernel_equivalence(const Context&) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ub(0.05, 3.0), ud(1.0, 60.0), uf(100.0, 2500.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const WaveContext ctx(uf(rng));
    AttenuationParams p;
    p.beta = ub(rng);
    p.alpha = p.beta + ud(rng);
    const auto r = oracle::random_in_shell(rng, 0.4, 1.0), rp = oracle::random_in_shell(rng, 0.4, 1.0);
    worst = std::max(worst, oracle::rel_err(kernel_eval(ctx, p, 12, r, rp),
                                            oracle::kernel_double_sum(ctx, p.alpha, p.beta, 12, r, rp)));
  }
  return {worst < 1e-10, "max rel err " + num(worst)};
}

Outcome loo_oracles(const Context&) {
  std::mt19937_64 rng(102);
  const WaveContext ctx(800.0);
  PositionList mics;
  for (int i = 0; i < 16; ++i) mics.push_back(oracle::random_in_shell(rng, 0.4, 1.0));
  const auto scene = make_source_scene(RegionSpec{}, design(6, 26, "des.3.26.6.txt"), rng);
  const CVector s = measure(ctx, scene, mics, 20.0, rng);
  const std::vector<double> lambdas{1e-6, 1e-4, 1e-2, 1.0, 10.0};
  AttenuationParams p;
  p.alpha = 16.0;
  p.beta = 1.0;
  const CMatrix K = gram_matrix(ctx, p, 20, mics);
  const auto krr = loo_cv_krr(K, s, lambdas);
  const auto d = swf_design_matrices(ctx, mics, swf_truncation(16));
  const auto swf = swf_loo_lambda(d, s, lambdas);
  double worst = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    worst = std::max(worst, oracle::rel_err(krr.scores[i], oracle::krr_loo_refit(K, s, lambdas[i])));
    worst = std::max(worst, oracle::rel_err(swf.scores[i], oracle::swf_loo_refit(d, s, lambdas[i])));
  }
  return {worst < 1e-8, "max rel err " + num(worst)};
}

Outcome gradient_check(const Context&) {
  std::mt19937_64 rng(103);
  const WaveContext ctx(1000.0);
  const auto mics = make_array(ArraySpec{"t", ArrayKind::TDesign, kData / "tdesign" / "des.3.48.9.txt", 9, 0.81, 48},
                               RegionSpec{}, rng);
  const auto scene = make_source_scene(RegionSpec{}, design(6, 26, "des.3.26.6.txt"), rng);
  const CVector s = measure(ctx, scene, mics, 20.0, rng);
  const GprProblem problem(ctx, 20, mics, s, 0.01);
  std::uniform_real_distribution<double> ub(0.2, 4.0), ud(2.0, 80.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double b = ub(rng), a = b + ud(rng);
    const auto g = problem.gradient(a, b, 1e-6);
    const double ga = oracle::richardson_derivative([&](double x) { return problem.objective(x, b); }, a, 1e-3 * a);
    const double gb = oracle::richardson_derivative([&](double x) { return problem.objective(a, x); }, b, 1e-3 * b);
    const double scale = std::hypot(ga, gb);
    worst = std::max(worst, std::hypot(g[0] - ga, g[1] - gb) / scale);
  }
  return {worst < 1e-4, "max rel err " + num(worst)};
}

Outcome helmholtz(const Context&) {
  std::mt19937_64 rng(104);
  const WaveContext ctx(1000.0);
  const double k = ctx.wavenumber(), h = 1e-3;
  const auto scene = make_source_scene(RegionSpec{}, design(6, 26, "des.3.26.6.txt"), rng);
  const Position3 src(0.05, -0.1, 0.12);
  std::uniform_int_distribution<int> order(0, 8);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto r = oracle::random_in_shell(rng, 0.4, 1.0);
    const int n = order(rng);
    std::uniform_int_distribution<int> mode(-n, n);
    const specfun::HarmonicIndex idx{n, mode(rng)};
    worst = std::max({worst,
                      oracle::helmholtz_residual([&](const Position3& x) { return green_free(ctx, src, x); }, r, k, h),
                      oracle::helmholtz_residual([&](const Position3& x) { return scene_field(ctx, scene, x); }, r, k, h),
                      oracle::helmholtz_residual([&](const Position3& x) { return psi(ctx, idx, x); }, r, k, h)});
  }
  return {worst < 1e-4, "max residual " + num(worst)};
}

Outcome noise_calibration(const Context&) {
  std::mt19937_64 rng(105);
  const WaveContext ctx(1000.0);
  const auto scene = make_source_scene(RegionSpec{}, design(6, 26, "des.3.26.6.txt"), rng);
  const auto mics = design(9, 48, "des.3.48.9.txt");
  PositionList pos;
  for (const auto& d : mics) pos.push_back(0.81 * d);
  CVector clean(48);
  for (int i = 0; i < 48; ++i) clean(i) = scene_field(ctx, scene, pos[i]);
  double noise = 0.0;
  for (int t = 0; t < 1000; ++t) noise += (measure(ctx, scene, pos, 20.0, rng) - clean).squaredNorm();
  const double snr = 10.0 * std::log10(clean.squaredNorm() / (noise / 1000.0));
  return {std::abs(snr - 20.0) <= 0.5, "realized SNR " + num(snr, "%.3f") + " dB"};
}

Outcome swf_recovery(const Context&) {
  std::mt19937_64 rng(106);
  const WaveContext ctx(700.0);
  PositionList mics;
  for (const auto& d : design(9, 48, "des.3.48.9.txt")) mics.push_back(0.81 * d);
  const int N = swf_truncation(mics.size());
  const CVector c = oracle::random_complex(rng, specfun::harmonic_count(5));
  const auto d = swf_design_matrices(ctx, mics, N);
  const CVector s = swf_basis(ctx, mics, 5) * c;
  SwfModel m;
  m.max_order = N;
  m.frequency = 700.0;
  m.coefficients = swf_fit(d, s, 1e-12);
  PositionList held;
  for (int i = 0; i < 200; ++i) held.push_back(oracle::random_in_shell(rng, 0.4, 1.0));
  const CVector truth = swf_basis(ctx, held, 5) * c;
  const double err = (swf_predict(m, held) - truth).norm() / truth.norm();
  return {N == 5 && err < 1e-3, "truncation " + std::to_string(N) + ", held-out rel err " + num(err)};
}

const MethodSummary* find(const Summary& s, const std::string& name) {
  for (const auto& m : s.methods)
    if (m.method == name) return &m;
  return nullptr;
}

Outcome end_to_end(const Context& c) {
  const auto config = load_config(kConfigs / "protocol.json");
  const auto run = run_sweep(config, {c.work_dir / "sweep", c.jobs, {}});
  const auto s = summarize(run.records, 1600.0);
  {
    std::ofstream out(c.work_dir / "sweep" / "summary.csv");
    write_summary_csv(out, s);
  }
  const auto* p = find(s, "proposed");
  const auto* pnn = find(s, "pnn");
  const auto* ideal = find(s, "swf_ideal");
  if (!p || !pnn || !ideal) return {false, "missing methods in sweep"};
  const double gap_pnn = pnn->mean_db - p->mean_db;
  const double gap_ideal = ideal->mean_db - p->mean_db;
  const double gap_pnn_low = pnn->mean_below_db - p->mean_below_db;
  const bool order_ok = gap_pnn >= 0.5 && gap_ideal >= 0.5;
  const bool band_ok = std::abs(gap_pnn - 1.94) <= 1.5 && std::abs(gap_ideal - 2.06) <= 1.5;
  const bool low_ok = gap_pnn_low > gap_pnn;
  const bool seeds_ok = config.seeds.size() >= 10 && config.arrays.size() == 2;
  std::string detail = "gap vs pnn " + num(gap_pnn, "%.2f") + " dB, vs swf_ideal " + num(gap_ideal, "%.2f") +
                       " dB, below 1.6 kHz vs pnn " + num(gap_pnn_low, "%.2f") + " dB; ordering " +
                       (order_ok ? "ok" : "violated") + ", gap magnitude " + (band_ok ? "within" : "outside") +
                       " 1.94/2.06 +- 1.5 dB, low-band widening " + (low_ok ? "ok" : "violated");
  return {order_ok && band_ok && low_ok && seeds_ok, detail};
}

Outcome nse_maps(const Context& c) {
  const auto config = load_config(kConfigs / "protocol.json");
  const auto dir = c.work_dir / "nse";
  const auto r = run_nse(config, 1000.0, {dir, c.jobs, {}});
  GridSpec grid = config.nse.grid;
  const int res = grid.resolution;
  // lattice count of cell centres strictly inside the source radius
  const double bound = 2.0 * res * config.region.source_radius / grid.side;
  std::size_t expect = 0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const double a = 2 * i + 1 - res, b = 2 * j + 1 - res;
      if (a * a + b * b < bound * bound) ++expect;
    }
  bool files_ok = res == 100;
  for (auto seed : config.seeds) {
    files_ok = files_ok && std::filesystem::exists(dir / ("truth_seed" + std::to_string(seed) + ".csv"));
    for (auto m : config.methods)
      files_ok = files_ok && std::filesystem::exists(dir / ("nse_" + method_name(m) + "_seed" + std::to_string(seed) + ".csv")) &&
                 std::filesystem::exists(dir / ("estimate_" + method_name(m) + "_seed" + std::to_string(seed) + ".csv"));
  }
  const double mp = r.pooled_median.at("proposed"), ml = r.pooled_median.at("swf_loo"), mn = r.pooled_median.at("pnn");
  const bool ok = files_ok && r.masked_cells == expect && config.seeds.size() >= 5 && mp <= ml && mp <= mn;
  return {ok, "masked " + std::to_string(r.masked_cells) + " (expected " + std::to_string(expect) + "), median NSE proposed " +
                  num(mp, "%.2f") + " swf_loo " + num(ml, "%.2f") + " pnn " + num(mn, "%.2f") + " dB over " +
                  std::to_string(config.seeds.size()) + " seeds"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const Context& c) {
  auto config = load_config(kConfigs / "smoke.json");
  std::vector<std::string> compared;
  bool same = true;
  std::vector<std::filesystem::path> dirs{c.work_dir / "determinism_a", c.work_dir / "determinism_b"};
  for (std::size_t i = 0; i < 2; ++i) {
    std::filesystem::remove_all(dirs[i]);
    run_sweep(config, {dirs[i], i == 0 ? 1 : 2, {}});
    run_nse(config, config.nse.frequency_hz, {dirs[i] / "nse", 1, {}});
  }
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dirs[0])) {
    if (e.path().extension() != ".csv" || e.path().filename() == "timings.csv") continue;
    const auto rel = std::filesystem::relative(e.path(), dirs[0]);
    same = same && slurp(e.path()) == slurp(dirs[1] / rel);
    ++files;
  }
  return {same && files > 2, std::to_string(files) + " csv files compared"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exsf acceptance checks"};
  std::string criteria = "1,2,3,4,5,6,7,8,9,10";
  std::vector<int> expect_fail;
  Context ctx;
  std::string work = "acceptance_work";
  app.add_option("--criteria", criteria, "Comma separated criterion numbers");
  app.add_option("--work-dir", work, "Scratch directory for experiment outputs");
  app.add_option("--jobs", ctx.jobs, "Worker threads for end-to-end runs (0: hardware threads)");
  app.add_option("--expect-fail", expect_fail, "Criteria known not to be met; reported but not fatal");
  CLI11_PARSE(app, argc, argv);
  ctx.work_dir = work;
  if (ctx.jobs <= 0) ctx.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::filesystem::create_directories(ctx.work_dir);

  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> all{
      {"xi closed form", xi_closed_form},        {"kernel equivalence", kernel_equivalence},
      {"LOO oracles", loo_oracles},              {"gradient check", gradient_check},
      {"Helmholtz residuals", helmholtz},        {"noise calibration", noise_calibration},
      {"SWF exact recovery", swf_recovery},      {"end-to-end ordering", end_to_end},
      {"NSE maps", nse_maps},                    {"determinism", determinism}};

  std::set<int> selected;
  std::stringstream ss(criteria);
  for (std::string item; std::getline(ss, item, ',');) selected.insert(std::stoi(item));
  const std::set<int> tolerated(expect_fail.begin(), expect_fail.end());

  int fatal = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(all.size())) {
      std::printf("criterion %d: unknown\n", id);
      ++fatal;
      continue;
    }
    Outcome o;
    try {
      o = all[id - 1].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool tolerated_fail = !o.pass && tolerated.count(id);
    std::printf("criterion %d (%s): %s%s  %s\n", id, all[id - 1].first.c_str(), o.pass ? "PASS" : "FAIL",
                tolerated_fail ? " (expected)" : "", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !tolerated_fail) ++fatal;
  }
  return fatal ? 1 : 0;
}
