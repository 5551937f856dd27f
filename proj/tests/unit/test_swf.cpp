#include <cmath>
#include <random>

#include "doctest.h"
#include "exsf/errors.hpp"
#include "exsf/metrics.hpp"
#include "exsf/simulation.hpp"
#include "exsf/swf.hpp"
#include "oracles.hpp"

using namespace exsf;

namespace {

PositionList shell_points(std::mt19937_64& rng, int n) {
  PositionList pts;
  for (int i = 0; i < n; ++i) pts.push_back(oracle::random_in_shell(rng, 0.5, 1.0));
  return pts;
}

}  // namespace

TEST_CASE("truncation order") {
  CHECK(swf_truncation(1) == 0);
  CHECK(swf_truncation(3) == 0);
  CHECK(swf_truncation(4) == 1);
  CHECK(swf_truncation(48) == 5);
  CHECK(swf_truncation(49) == 6);
  CHECK(swf_truncation(50) == 6);
  CHECK_THROWS_AS(swf_truncation(0), DomainError);
}

TEST_CASE("design matrices") {
  std::mt19937_64 rng(1);
  const WaveContext ctx(500.0);
  const auto pts = shell_points(rng, 30);
  const auto d = swf_design_matrices(ctx, pts, 2);
  CHECK(d.psi.rows() == 30);
  CHECK(d.psi.cols() == 9);
  const std::vector<double> pen{1, 3, 3, 3, 7, 7, 7, 7, 7};
  for (int p = 0; p < 9; ++p) CHECK(d.penalty(p) == pen[p]);
  CHECK((d.weights.array() - 1.0 / 30.0).abs().maxCoeff() == 0.0);
  const double k = ctx.wavenumber();
  for (int i = 0; i < 30; ++i) {
    const cdouble expect = specfun::sph_hankel1(0, k * pts[i].norm()) / std::sqrt(4.0 * kPi);
    CHECK(oracle::rel_err(d.psi(i, 0), expect) < 1e-13);
  }
  CHECK((swf_basis(ctx, pts, 2) - d.psi).norm() == 0.0);
}

TEST_CASE("fit with identity design and ridge limit") {
  std::mt19937_64 rng(2);
  SwfDesign d;
  d.psi = CMatrix::Identity(4, 4);
  d.weights = RVector::Ones(4);
  d.penalty = RVector::Ones(4);
  const CVector s = oracle::random_complex(rng, 4);
  CHECK((swf_fit(d, s, 0.0) - s).norm() < 1e-14);
  CHECK((swf_fit(d, s, 1.0) - s / 2.0).norm() < 1e-14);
  CHECK(swf_fit(d, s, 1e12).norm() < 1e-11 * s.norm());
}

TEST_CASE("noise-free recovery of a band-limited field") {
  std::mt19937_64 rng(3);
  const WaveContext ctx(300.0);
  const auto pts = shell_points(rng, 40);
  const auto d = swf_design_matrices(ctx, pts, 2);
  const CVector c = oracle::random_complex(rng, 9);
  const CVector s = d.psi * c;
  CHECK((swf_fit(d, s, 0.0) - c).norm() / c.norm() < 1e-9);
  SwfModel m;
  m.max_order = 2;
  m.frequency = 300.0;
  m.coefficients = c;
  const auto test = shell_points(rng, 10);
  const CVector brute = swf_basis(ctx, test, 2) * c;
  CHECK((swf_predict(m, test) - brute).norm() < 1e-12 * brute.norm());
  CHECK(oracle::rel_err(swf_predict(m, test[0]), brute(0)) < 1e-12);
}

TEST_CASE("regularized solution is stationary") {
  std::mt19937_64 rng(4);
  const WaveContext ctx(800.0);
  const auto pts = shell_points(rng, 25);
  const auto d = swf_design_matrices(ctx, pts, 4);
  const CVector s = oracle::random_complex(rng, 25);
  const double lam = 1e-3;
  const CVector c = swf_fit(d, s, lam);
  auto J = [&](const CVector& x) {
    const CVector r = s - d.psi * x;
    double v = 0.0;
    for (int i = 0; i < r.size(); ++i) v += d.weights(i) * std::norm(r(i));
    for (int p = 0; p < x.size(); ++p) v += lam * d.penalty(p) * std::norm(x(p));
    return v;
  };
  const double base = J(c);
  for (int t = 0; t < 50; ++t) {
    CVector dx = oracle::random_complex(rng, c.size());
    dx *= 1e-4 * c.norm() / dx.norm();
    CHECK(J(c + dx) >= base);
  }
}

TEST_CASE("hat-matrix LOO equals refits") {
  std::mt19937_64 rng(5);
  const WaveContext ctx(600.0);
  const auto pts = shell_points(rng, 20);
  const auto d = swf_design_matrices(ctx, pts, 3);
  const CVector s = oracle::random_complex(rng, 20);
  const std::vector<double> lams{1e-6, 1e-4, 1e-2, 1.0};
  const auto r = swf_loo_lambda(d, s, lams);
  for (std::size_t i = 0; i < lams.size(); ++i)
    CHECK(oracle::rel_err(r.scores[i], oracle::swf_loo_refit(d, s, lams[i])) < 1e-8);
}

TEST_CASE("ideal lambda is at least as good as LOO on the test set") {
  std::mt19937_64 rng(6);
  const WaveContext ctx(900.0);
  RegionSpec region;
  const auto dirs = load_tdesign(6, 26, std::filesystem::path(EXSF_DEFAULT_DATA_DIR) / "tdesign" / "des.3.26.6.txt");
  const auto scene = make_source_scene(region, dirs, rng);
  const auto mics = shell_points(rng, 48);
  const CVector s = measure(ctx, scene, mics, 20.0, rng);
  const int N = swf_truncation(48);
  const auto d = swf_design_matrices(ctx, mics, N);
  const auto test = sample_test_points(region, 200, mics, rng);
  CVector truth(200);
  for (int i = 0; i < 200; ++i) truth(i) = scene_field(ctx, scene, test[i]);
  const CMatrix tpsi = swf_basis(ctx, test, N);
  const auto grid = log_lambda_grid();
  const auto loo = swf_loo_lambda(d, s, grid);
  const auto ideal = swf_ideal_lambda(d, s, grid, tpsi, truth);
  const double e_loo = nmse_db(truth, tpsi * swf_fit(d, s, loo.best_lambda));
  const double e_ideal = nmse_db(truth, tpsi * swf_fit(d, s, ideal.best_lambda));
  CHECK(e_ideal <= e_loo + 1e-12);
}
