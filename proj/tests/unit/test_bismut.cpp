#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torsionlab/bismut.hpp"
#include "torsionlab/oracles.hpp"

using namespace torsionlab;
using std::numbers::pi;

TEST_CASE("Casimir traces and beta") {
  const bismut::CasimirTraces c = bismut::casimir_traces();
  CHECK(c.on_k == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(c.on_p == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(bismut::beta_constant() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("plain supertrace vanishes identically") {
  for (double x : {0.3, 1.0, pi / 2, pi, 5.0}) {
    for (double y : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
      CHECK(std::abs(bismut::supertrace_plain(x, y)) < 1e-14);
    }
  }
}

TEST_CASE("weighted supertrace from its eigenvalues") {
  // exterior algebra of C^3 with eigenvalues e^{+-(ix+y)}, 1: sum_p (-1)^p p e_p
  for (double x : {0.4, 2.0}) {
    for (double y : {-1.0, 0.0, 1.5}) {
      const CScalar a = std::exp(CScalar(y, x)), b = 1.0 / a, c = 1.0;
      const CScalar e1 = a + b + c, e2 = a * b + a * c + b * c, e3 = a * b * c;
      const CScalar expected = -e1 + 2.0 * e2 - 3.0 * e3;
      CHECK(std::abs(bismut::supertrace_weighted(x, y) - expected) < 1e-12);
    }
  }
}

TEST_CASE("J_g for n = 1") {
  for (double x : {0.5, 2.0, pi}) {
    const CScalar j = bismut::j_g({{x}}, {{0.3}});
    CHECK(j.real() == doctest::Approx(-1.0 / (4.0 * std::pow(std::sin(x / 2), 2))).epsilon(1e-14));
  }
}

TEST_CASE("regular elements") {
  CHECK(bismut::EllipticElement{{pi}}.regular());
  CHECK_FALSE(bismut::EllipticElement{{0.0}}.regular());
  CHECK_FALSE(bismut::EllipticElement{{2.0 * pi}}.regular());
  CHECK_FALSE(bismut::EllipticElement{{1.0, 1.0}}.regular());
  CHECK(bismut::EllipticElement{{1.0, 2.0}}.regular());
}

TEST_CASE("Gauss-Hermite moments") {
  for (int k = 0; k < 3; ++k) {
    const bismut::HermiteRule& r = bismut::hermite_rule(k);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) {
      const double z2 = r.nodes[i] * r.nodes[i];
      m0 += r.weights[i];
      m2 += r.weights[i] * z2;
      m4 += r.weights[i] * z2 * z2;
    }
    CHECK(m0 == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3 * std::sqrt(pi) / 4).epsilon(1e-13));
  }
  CHECK_THROWS_AS(bismut::hermite_rule(99), Error);
}

TEST_CASE("calibration snaps to sign -1 and unit measure") {
  const bismut::Calibration& c = bismut::calibration();
  CHECK(c.sign == -1.0);
  CHECK(c.measure_factor == 1.0);
  CHECK(c.residual < 1e-10);
}

TEST_CASE("orbital integral matches the closed-form trace") {
  for (double t : {0.1, 1.0, 10.0}) {
    for (double x : {pi / 3, pi / 2, pi}) {
      const double closed = oracles::h3_trace(x, t);
      const CScalar q = bismut::bismut_trace(x, t);
      CHECK(std::abs(q - closed) <= 1e-8 * std::abs(closed));
    }
  }
}

TEST_CASE("un-weighted alternating trace vanishes") {
  for (double t : {0.1, 1.0, 10.0}) CHECK(std::abs(bismut::alternating_trace(2.0, t)) < 1e-14);
}
