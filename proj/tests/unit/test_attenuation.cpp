#include <cmath>

#include "doctest.h"
#include "exsf/attenuation.hpp"
#include "exsf/errors.hpp"
#include "exsf/specfun.hpp"
#include "oracles.hpp"

using namespace exsf;

TEST_CASE("xi_0 closed form") {
  CHECK(xi(0, 2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(xi(0, 3.0, 2.0) == doctest::Approx(1.5).epsilon(1e-8));
  for (double a : {0.5, 2.0, 10.0, 50.0})
    for (double b : {0.5, 1.0, 2.0, 4.0}) CHECK(oracle::rel_err(xi(0, a, b), oracle::xi0(a, b)) < 1e-8);
}

TEST_CASE("xi matches the gamma series at every order") {
  for (double a : {0.7, 5.0, 30.0, 101.0})
    for (double b : {1e-4, 0.05, 0.6, 1.0, 2.5, 5.0}) {
      const XiTable t(a, b, 25);
      for (int n = 0; n <= 25; ++n) {
        const double ref = oracle::log_xi_gamma_series(n, a, b);
        // log-domain agreement to 1e-8 relative in xi itself
        CHECK(std::abs(t.log_value(n) - ref) < 1e-8);
      }
    }
}

TEST_CASE("xi decreases with order") {
  const XiTable t(10.0, 1.0, 20);
  for (int n = 0; n < 20; ++n) CHECK(t.log_value(n + 1) < t.log_value(n));
}

TEST_CASE("effective cutoff order moves with alpha") {
  // argmax_n xi_n |h_n(kR)|^2 at fixed beta. xi_n / xi_0 grows like alpha^{2n}, so a
  // larger alpha lets more orders through: the cutoff never moves down.
  const double kR = 8.0;
  const auto h = specfun::sph_hankel1_polar(20, kR);
  auto cutoff = [&](double alpha) {
    const XiTable t(alpha, 1.0, 20);
    int best = 0;
    double best_v = -1e300;
    for (int n = 0; n <= 20; ++n) {
      const double v = t.log_value(n) + 2.0 * h.log_abs[n];
      if (v > best_v) best_v = v, best = n;
    }
    return best;
  };
  int prev = -1;
  for (double alpha : {2.0, 5.0, 10.0, 20.0, 40.0, 80.0}) {
    const int c = cutoff(alpha);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(cutoff(80.0) > cutoff(2.0));
}

TEST_CASE("xi domain errors") {
  CHECK_THROWS_AS(xi(0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(xi(0, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(xi(26, 1.0, 1.0), UnsupportedOrderError);
}

TEST_CASE("constraint box") {
  const ConstraintBox box{};
  CHECK(box.delta_min == 1.0);
  CHECK(box.delta_max == 100.0);
  CHECK(box.beta_min == 1e-4);
  CHECK(box.beta_max == 5.0);
  CHECK(box.contains(3.0, 1.0));
  CHECK_FALSE(box.contains(1.5, 1.0));
  CHECK_FALSE(box.contains(7.0, 6.0));
  CHECK_THROWS_AS((ConstraintBox{0.0, 10.0, 0.1, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((ConstraintBox{2.0, 1.0, 0.1, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((ConstraintBox{1.0, 2.0, 1.0, 0.5}.validate()), DomainError);
}
