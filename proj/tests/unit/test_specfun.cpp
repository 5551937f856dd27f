#include <cmath>
#include <random>

#include "doctest.h"
#include "exsf/errors.hpp"
#include "exsf/simulation.hpp"
#include "exsf/specfun.hpp"
#include "oracles.hpp"

using namespace exsf;
using namespace exsf::specfun;

TEST_CASE("hankel closed forms") {
  const cdouble h0 = sph_hankel1(0, 1.0);
  CHECK(std::abs(h0 - cdouble(std::sin(1.0), -std::cos(1.0))) < 1e-15);
  CHECK(std::abs(h0 - cdouble(0.841471, -0.540302)) < 1e-6);
  const cdouble h1 = sph_hankel1(1, 2.0);
  CHECK(oracle::rel_err(h1, cdouble(oracle::j1(2.0), oracle::y1(2.0))) < 1e-14);
  for (double x : {1e-3, 0.01, 0.3, 7.0, 120.0, 1e3}) {
    CHECK(oracle::rel_err(sph_hankel1(0, x), cdouble(0.0, -1.0) * std::exp(cdouble(0.0, x)) / x) < 1e-13);
    CHECK(oracle::rel_err(sph_hankel1(1, x), cdouble(oracle::j1(x), oracle::y1(x))) < 1e-10);
  }
}

TEST_CASE("hankel satisfies the three-term recurrence") {
  for (double x : {0.5, 5.0, 50.0}) {
    const auto h = sph_hankel1_all(21, x);
    for (int n = 2; n <= 20; ++n) {
      const cdouble rhs = (2.0 * n + 1.0) / x * h[n] - h[n - 1];
      CHECK(oracle::rel_err(h[n + 1], rhs) < 1e-10);
    }
  }
}

TEST_CASE("j_n accurate where upward recurrence would fail") {
  // Series j_n(x) ~ x^n / (2n+1)!! for small x.
  const double x = 1e-3;
  const auto j = sph_bessel_j_all(25, x);
  double df = 1.0;
  for (int n = 0; n <= 8; ++n) {
    if (n > 0) df *= 2.0 * n + 1.0;
    const double series = std::pow(x, n) / df * (1.0 - x * x / (2.0 * (2.0 * n + 3.0)));
    CHECK(oracle::rel_err(j[n], series) < 1e-9);
  }
  CHECK(j[25] > 0.0);
}

TEST_CASE("wronskian") {
  for (double x : {0.1, 0.7, 3.0, 17.0, 100.0}) {
    const auto j = sph_bessel_j_all(21, x);
    const auto y = sph_bessel_y_all(21, x);
    for (int n = 0; n <= 20; ++n) {
      // f_n' = f_{n-1} - (n+1)/x f_n, with f_{-1} from j_{-1} = cos x / x, y_{-1} = sin x / x
      const double jm = n == 0 ? std::cos(x) / x : j[n - 1];
      const double ym = n == 0 ? std::sin(x) / x : y[n - 1];
      const double jd = jm - (n + 1.0) / x * j[n];
      const double yd = ym - (n + 1.0) / x * y[n];
      const double w = j[n] * yd - jd * y[n];
      CHECK(oracle::rel_err(w, 1.0 / (x * x)) < 1e-9);
    }
  }
}

TEST_CASE("|h_n|^2 is positive and grows with order past x") {
  for (double x : {0.5, 4.0, 12.0}) {
    const auto h = sph_hankel1_all(25, x);
    for (int n = 0; n <= 25; ++n) CHECK(std::norm(h[n]) > 0.0);
    for (int n = static_cast<int>(std::ceil(x)); n < 25; ++n) CHECK(std::norm(h[n + 1]) >= std::norm(h[n]));
  }
}

TEST_CASE("polar form matches direct evaluation and survives tiny arguments") {
  const auto p = sph_hankel1_polar(25, 2.5);
  const auto h = sph_hankel1_all(25, 2.5);
  for (int n = 0; n <= 25; ++n) CHECK(oracle::rel_err(std::exp(p.log_abs[n]) * p.phase[n], h[n]) < 1e-12);
  const auto tiny = sph_hankel1_polar(25, 1e-30);
  CHECK(std::isfinite(tiny.log_abs[25]));
  CHECK(tiny.log_abs[25] > 1000.0);
}

TEST_CASE("special function domain errors") {
  CHECK_THROWS_AS(sph_hankel1(0, 0.0), DomainError);
  CHECK_THROWS_AS(sph_hankel1(0, -1.0), DomainError);
  CHECK_THROWS_AS(sph_hankel1(26, 1.0), UnsupportedOrderError);
  CHECK_THROWS_AS(legendre_poly(2, 1.5), DomainError);
  CHECK_THROWS_AS(assoc_legendre(2, 1, -1.01), DomainError);
  CHECK_THROWS_AS(sph_harmonic({1, 0}, Position3(1.0, 1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(sph_harmonic({1, 2}, Position3(0.0, 0.0, 1.0)), DomainError);
}

TEST_CASE("legendre polynomials") {
  for (double t : {-1.0, -0.3, 0.0, 0.8, 1.0}) {
    CHECK(legendre_poly(0, t) == 1.0);
    CHECK(legendre_poly(1, t) == t);
  }
  for (int n = 0; n <= 25; ++n) CHECK(legendre_poly(n, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(legendre_poly(6, 0.25) - oracle::legendre6(0.25)) < 1e-14);
}

TEST_CASE("associated legendre against Rodrigues") {
  CHECK(assoc_legendre(0, 0, 0.37) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(assoc_legendre(1, 0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(assoc_legendre(5, 3, 0.3) - oracle::assoc_legendre_rodrigues(5, 3, 0.3)) < 1e-12);
  // Condon-Shortley phase: P_1^1(t) = -sqrt(1 - t^2)
  CHECK(assoc_legendre(1, 1, 0.6) == doctest::Approx(-0.8).epsilon(1e-14));
  for (int n = 0; n <= 10; ++n)
    for (int m = 0; m <= n; ++m)
      for (double t : {-0.9, -0.2, 0.45, 0.99}) {
        const double ref = oracle::assoc_legendre_rodrigues(n, m, t);
        CHECK(std::abs(assoc_legendre(n, m, t) - ref) < 1e-11 * std::max(1.0, std::abs(ref)));
      }
}

TEST_CASE("spherical harmonic conventions") {
  std::mt19937_64 rng(3);
  CHECK(std::abs(sph_harmonic({0, 0}, oracle::random_unit(rng)) - 1.0 / std::sqrt(4.0 * kPi)) < 1e-15);
  CHECK(std::abs(sph_harmonic({0, 0}, oracle::random_unit(rng)) - 0.2820948) < 1e-7);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> nd(0, 20);
    const int n = nd(rng);
    std::uniform_int_distribution<int> md(-n, n);
    const int m = md(rng);
    const auto d = oracle::random_unit(rng);
    const cdouble lhs = std::conj(sph_harmonic({n, m}, d));
    const cdouble rhs = ((m % 2) ? -1.0 : 1.0) * sph_harmonic({n, -m}, d);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("addition theorem") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = oracle::random_unit(rng);
    const auto e = oracle::random_unit(rng);
    const auto yd = sph_harmonics_all(20, d);
    const auto ye = sph_harmonics_all(20, e);
    for (int n = 0; n <= 20; ++n) {
      cdouble sum = 0.0;
      for (int m = -n; m <= n; ++m) sum += yd[HarmonicIndex{n, m}.flat()] * std::conj(ye[HarmonicIndex{n, m}.flat()]);
      const double ref = (2.0 * n + 1.0) / (4.0 * kPi) * legendre_poly(n, std::clamp(d.dot(e), -1.0, 1.0));
      CHECK(std::abs(sum - ref) < 1e-12 * (2.0 * n + 1.0));
    }
  }
}

TEST_CASE("orthonormality under t-design quadrature") {
  // A 48-point design of strength 9 integrates products up to total degree 9 exactly.
  const auto pts = load_tdesign(9, 48, std::filesystem::path(EXSF_DEFAULT_DATA_DIR) / "tdesign" / "des.3.48.9.txt");
  std::vector<std::vector<cdouble>> y;
  for (const auto& p : pts) y.push_back(sph_harmonics_all(4, p));
  for (int a = 0; a < harmonic_count(4); ++a)
    for (int b = 0; b < harmonic_count(4); ++b) {
      const auto ia = HarmonicIndex::from_flat(a), ib = HarmonicIndex::from_flat(b);
      if (ia.order + ib.order > 9) continue;
      cdouble sum = 0.0;
      for (const auto& row : y) sum += row[a] * std::conj(row[b]);
      sum *= 4.0 * kPi / static_cast<double>(pts.size());
      CHECK(std::abs(sum - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("flat harmonic index is a bijection") {
  int expect = 0;
  for (int n = 0; n <= kMaxOrder; ++n)
    for (int m = -n; m <= n; ++m) {
      const HarmonicIndex idx{n, m};
      CHECK(idx.flat() == expect);
      const auto back = HarmonicIndex::from_flat(expect);
      CHECK(back.order == n);
      CHECK(back.mode == m);
      ++expect;
    }
  CHECK(expect == harmonic_count(kMaxOrder));
}

TEST_CASE("orthonormality up to order 10 under a product rule") {
  // Gauss-Legendre in cos(theta) (Golub-Welsch) times a uniform rule in phi.
  const int nt = 12, np = 24;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(nt, nt);
  for (int i = 1; i < nt; ++i) jac(i, i - 1) = jac(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<Position3> pts;
  std::vector<double> w;
  for (int i = 0; i < nt; ++i) {
    const double t = es.eigenvalues()(i);
    const double wt = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    for (int j = 0; j < np; ++j) {
      const double phi = 2.0 * kPi * j / np;
      const double s = std::sqrt(1.0 - t * t);
      pts.emplace_back(s * std::cos(phi), s * std::sin(phi), t);
      w.push_back(wt * 2.0 * kPi / np);
    }
  }
  std::vector<std::vector<cdouble>> y;
  for (const auto& p : pts) y.push_back(sph_harmonics_all(10, p));
  double worst = 0.0;
  for (int a = 0; a < harmonic_count(10); ++a)
    for (int b = 0; b <= a; ++b) {
      cdouble sum = 0.0;
      for (std::size_t q = 0; q < pts.size(); ++q) sum += w[q] * y[q][a] * std::conj(y[q][b]);
      worst = std::max(worst, std::abs(sum - (a == b ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-8);
}
