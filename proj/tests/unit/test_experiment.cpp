#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "exsf/config.hpp"
#include "exsf/errors.hpp"
#include "exsf/experiment.hpp"

using namespace exsf;

namespace {

ExperimentConfig tiny(const std::string& extra = "") {
  const std::string text = R"({
    "arrays": [{"name": "t", "kind": "t-design", "file": "tdesign/des.3.48.9.txt", "order": 9, "points": 48, "radius": 0.81},
               {"name": "r", "kind": "random-volumetric", "points": 30}],
    "frequency": {"start_hz": 300, "stop_hz": 600, "step_hz": 300},
    "test_points": 60,
    "proposed": {"max_iterations": 8},
    "pnn": {"neurons": 6, "iterations": 30},
    "seeds": [3])" + extra + "}";
  return parse_config(text, EXSF_DEFAULT_DATA_DIR);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("exsf_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("singleton sweep yields one record") {
  auto c = tiny(R"(, "methods": ["swf_loo"], "frequency": {"start_hz": 400, "stop_hz": 400, "step_hz": 50})");
  c.arrays.resize(1);
  const auto r = run_sweep(c, {scratch("single"), 1, {}});
  REQUIRE(r.records.size() == 1u);
  CHECK(r.records[0].method == Method::SwfLoo);
  CHECK(r.records[0].frequency_hz == 400.0);
  CHECK(std::isfinite(r.records[0].nmse_db));
  CHECK_FALSE(r.records[0].oracle);
  CHECK(r.config_hash == config_hash(c));
}

TEST_CASE("cell results do not depend on the sweep layout") {
  const auto a = tiny(R"(, "methods": ["proposed", "swf_loo", "swf_ideal"])");
  const auto b = tiny(R"(, "methods": ["proposed", "swf_loo", "swf_ideal"], "frequency": {"start_hz": 600, "stop_hz": 600, "step_hz": 50})");
  const auto sa = make_seed_context(a, 3), sb = make_seed_context(b, 3);
  const auto ra = run_cell(a, sa, 1, 600.0, "x");
  const auto rb = run_cell(b, sb, 1, 600.0, "x");
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra[i].nmse_db == rb[i].nmse_db);
    CHECK(ra[i].oracle == (ra[i].method == Method::SwfIdeal));
  }
}

TEST_CASE("reruns are byte identical, serial or threaded") {
  const auto c = tiny();
  const auto d1 = scratch("rerun1"), d2 = scratch("rerun2");
  const auto r1 = run_sweep(c, {d1, 1, {}});
  run_sweep(c, {d2, 2, {}});
  CHECK(r1.records.size() == 2u * 2u * 4u);
  CHECK(slurp(d1 / "nmse.csv") == slurp(d2 / "nmse.csv"));
  CHECK(slurp(d1 / "run.json") == slurp(d2 / "run.json"));

  const auto back = read_records_csv(d1 / "nmse.csv");
  REQUIRE(back.size() == r1.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].array == r1.records[i].array);
    CHECK(back[i].method == r1.records[i].method);
    CHECK(back[i].frequency_hz == r1.records[i].frequency_hz);
    if (std::isnan(r1.records[i].nmse_db))
      CHECK(std::isnan(back[i].nmse_db));
    else
      CHECK(back[i].nmse_db == r1.records[i].nmse_db);
    CHECK(back[i].oracle == r1.records[i].oracle);
  }
}

TEST_CASE("test points avoid every array") {
  const auto c = tiny();
  const auto sc = make_seed_context(c, 3);
  CHECK(sc.test_points.size() == 60u);
  for (const auto& p : sc.test_points)
    for (const auto& arr : sc.arrays)
      for (const auto& m : arr) CHECK((p - m).norm() > 1e-6);
  const auto again = make_seed_context(c, 3);
  CHECK((again.test_points[5] - sc.test_points[5]).norm() == 0.0);
}

TEST_CASE("summary statistics on a toy table") {
  std::vector<CellRecord> recs;
  auto add = [&](Method m, double f, double v) {
    CellRecord r;
    r.method = m;
    r.frequency_hz = f;
    r.nmse_db = v;
    recs.push_back(r);
  };
  add(Method::Proposed, 500, -10);
  add(Method::Proposed, 2000, -6);
  add(Method::Pnn, 500, -7);
  add(Method::Pnn, 2000, -5);
  add(Method::Pnn, 2500, NAN);
  const auto s = summarize(recs, 1600.0);
  REQUIRE(s.methods.size() == 2u);
  CHECK(s.methods[0].mean_db == -8.0);
  CHECK(s.methods[0].mean_below_db == -10.0);
  CHECK(s.methods[0].std_db == doctest::Approx(std::sqrt(8.0)));
  CHECK(s.methods[1].failures == 1u);
  bool found = false;
  for (const auto& g : s.gaps)
    if (g.method == "proposed" && g.other == "pnn") {
      found = true;
      CHECK(g.gap_db == 2.0);
      CHECK(g.gap_below_db == 3.0);
    }
  CHECK(found);
  CHECK(s.by_frequency.at({500.0, "pnn"}) == -7.0);
}

TEST_CASE("malformed record files are rejected") {
  const auto p = std::filesystem::temp_directory_path() / "exsf_bad_records.csv";
  std::ofstream(p) << "array,frequency_hz,method,seed,nmse_db,alpha,beta,lambda,oracle,status,config_hash\n"
                      "t,500,proposed,1,notanumber,1,1,1,0,ok,abc\n";
  CHECK_THROWS_AS(read_records_csv(p), IngestionError);
}

TEST_CASE("frequency labels") {
  CHECK(frequency_label(1000.0) == 1000000u);
  CHECK(frequency_label(100.0) != frequency_label(150.0));
}
