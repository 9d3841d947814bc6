#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torsionlab/checks.hpp"

using namespace torsionlab;
using std::numbers::pi;

namespace {

std::string evidence(const CheckReport& r, const std::string& key) {
  for (const auto& [k, v] : r.evidence) {
    if (k == key) return v;
  }
  return "";
}

}  // namespace

TEST_CASE("GBC constancy on the built-in models") {
  const std::vector<double> grid = {0.1, 1.0, 10.0};
  for (const HeatTraceModel& m :
       {HeatTraceModel::real_line(1.0, 0.0, 1.0), HeatTraceModel::real_line(1.0, 0.0, 0.0),
        HeatTraceModel::circle(2.0, 1.0, 0.0), HeatTraceModel::circle(1.0, 1.0, 0.3),
        HeatTraceModel::circle_untwisted(2.0), HeatTraceModel::hyperbolic3(2.0)}) {
    const CheckReport r = gbc_constancy(m, grid);
    CHECK(r.pass);
    CHECK(r.max_deviation <= 1e-10);
    CHECK(evidence(r, "odd_dimensional") == "true");
  }
  CHECK_THROWS_AS(gbc_constancy(HeatTraceModel::hyperbolic3(1.0), {}), Error);
}

TEST_CASE("products of odd models have trivial torsion") {
  const HeatTraceModel a = HeatTraceModel::circle(1.0, pi / 2, 0.0);
  const HeatTraceModel b = HeatTraceModel::hyperbolic3(pi);
  CHECK(even_dim_product_vanishing(a, b).pass);
  // with synthetic Euler characteristics the product is no longer trivial
  const CheckReport r = even_dim_product_vanishing(a, b, 1.0, 1.0);
  CHECK_FALSE(r.pass);
}

TEST_CASE("product formula with synthetic Euler characteristics") {
  const HeatTraceModel a = HeatTraceModel::circle(1.0, pi / 2, 0.0);
  const HeatTraceModel b = HeatTraceModel::hyperbolic3(2 * pi / 3);
  for (auto [cl, cr] : {std::pair{1.0, 1.0}, std::pair{2.0, -1.0}, std::pair{0.0, 3.0}}) {
    const CheckReport r = product_formula(a, b, cl, cr);
    CHECK(r.pass);
    // log T_L * chi_R + log T_R * chi_L with closed forms
    const double log_a = -0.5 * std::log(4.0 * std::pow(std::sin(pi / 4), 2));
    const double log_b = -1.0 / (8.0 * std::pow(std::sin(pi / 3), 2));
    CHECK(r.details.front().expected.real() == doctest::Approx(cr * log_a + cl * log_b).epsilon(1e-8));
  }
}

TEST_CASE("decomposition referee selects one variant consistently") {
  for (double R : {1.0, 2.0}) {
    for (double theta : {pi / 2, 0.9 * pi}) {
      for (double sigma : {0.25, 1.0, 4.0}) {
        const CheckReport r = decomposition_check(R, theta, sigma);
        CHECK(r.pass);
        CHECK(evidence(r, "matching_variant") == "GammaConsistent");
        CHECK(evidence(r, "pipeline_matches") == "GammaConsistent");
        CHECK(std::stod(evidence(r, "nonidentity_deviation")) <= 1e-10);
        CHECK_FALSE(evidence(r, "caveat").empty());
      }
    }
  }
  CHECK_THROWS_AS(decomposition_check(1.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(decomposition_check(1.0, 0.0, 1.0), Error);
}

TEST_CASE("rescale invariance and the untwisted negative control") {
  const std::vector<double> c = {0.5, 2.0};
  for (const HeatTraceModel& m :
       {HeatTraceModel::real_line(1.0, 0.0, 1.0), HeatTraceModel::circle(1.0, 1.0, 0.0),
        HeatTraceModel::hyperbolic3(pi)}) {
    const CheckReport r = rescale_invariance(m, c);
    CHECK(r.pass);
    CHECK(evidence(r, "mode") == "invariance");
  }
  const CheckReport u = rescale_invariance(HeatTraceModel::circle_untwisted(1.5), c);
  CHECK(u.pass);
  CHECK(evidence(u, "mode") == "negative_control");
  for (const CheckDetail& d : u.details) CHECK(std::abs(d.observed) > 0.5);
}

TEST_CASE("split check") {
  const CheckReport r = split_check(HeatTraceModel::circle_untwisted(0.5), {0.5, 1.0, 2.0});
  CHECK(r.pass);
  CHECK(r.details.size() == 3);
  CHECK_THROWS_AS(split_check(HeatTraceModel::hyperbolic3(1.0), {}), Error);
}
