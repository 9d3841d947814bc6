#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "torsionlab/growth.hpp"

using namespace torsionlab;

namespace {

std::vector<std::pair<double, double>> sample(double lo, double hi, int n, auto f) {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i < n; ++i) {
    const double t = lo * std::pow(hi / lo, double(i) / (n - 1));
    s.emplace_back(t, f(t));
  }
  return s;
}

}  // namespace

TEST_CASE("growth model values") {
  const GrowthModel p{GrowthModel::Kind::Polynomial, 2.0, 3.0};
  CHECK(p(4) == doctest::Approx(48.0));
  const GrowthModel e{GrowthModel::Kind::Exponential, 0.5, 1.0};
  CHECK(e(2) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("f3 against direct summation") {
  const double a = 1.0;
  for (double t : {0.5, 10.0, 300.0}) {
    long double direct = 0.0L;
    for (long j = 0; j < 20000; ++j) direct += double(j) * j * std::exp(-a * double(j) * j / t);
    GrowthHistogram h{{0.0, 1.0, 4.0}, GrowthModel{GrowthModel::Kind::Polynomial, 2.0, 1.0}};
    CHECK(f3(h, a, t) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-11));
  }
}

TEST_CASE("f3 exponential growth against direct summation") {
  const double a = 2.0, b = 1.0, t = 5.0;
  long double direct = 0.0L;
  for (long j = 0; j < 2000; ++j) direct += std::exp(b * j - a * double(j) * j / t);
  GrowthHistogram h{{}, GrowthModel{GrowthModel::Kind::Exponential, b, 1.0}};
  CHECK(f3(h, a, t) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-11));
}

TEST_CASE("f3 failure modes") {
  GrowthHistogram bare{{1.0, 2.0, 3.0}, std::nullopt};
  try {
    f3(bare, 1.0, 1e4);
    FAIL("expected TailUnbounded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TailUnbounded);
  }
  // tiny t: three bins are plenty
  CHECK(f3(bare, 1.0, 0.01) == doctest::Approx(1.0).epsilon(1e-12));
  GrowthHistogram big{{}, GrowthModel{GrowthModel::Kind::Polynomial, 1.0, 1.0}};
  try {
    f3(big, 1.0, 1e12, 1000);
    FAIL("expected TruncationFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationFailure);
  }
  CHECK_THROWS_AS(f3(big, -1.0, 1.0), Error);
}

TEST_CASE("bound checks") {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(10.0 * std::pow(1000.0, i / 30.0));
  const GrowthModel sq{GrowthModel::Kind::Polynomial, 2.0, 1.0};
  const BoundCheck ok = f3_bound_check(sq, 1.0, grid);
  CHECK(ok.pass);
  CHECK(std::abs(ok.tail_slope) < kBoundSlopeThreshold);
  // t^1 is too weak for quadratic shells: the ratio grows like t^{1/2}
  const BoundCheck weak = f3_bound_check(sq, 1.0, grid, GrowthBound{1.0, 0.0});
  CHECK_FALSE(weak.pass);
  CHECK(weak.tail_slope == doctest::Approx(0.5).epsilon(0.02));

  std::vector<double> g2;
  for (int i = 0; i <= 20; ++i) g2.push_back(std::pow(50.0, i / 20.0));
  CHECK(f3_bound_check(GrowthModel{GrowthModel::Kind::Exponential, 1.0, 1.0}, 1.0, g2).pass);
  const GrowthBound d = default_bound(GrowthModel{GrowthModel::Kind::Exponential, 2.0, 1.0}, 4.0);
  CHECK(d.power == 0.5);
  CHECK(d.rate == doctest::Approx(0.25));
}

TEST_CASE("ns_fit recovers clean laws") {
  const DecayFit p = ns_fit(sample(1.0, 1e3, 30, [](double t) { return 5.0 * std::pow(t, -2.0); }));
  REQUIRE(std::holds_alternative<PolynomialDecay>(p.kind));
  CHECK(std::get<PolynomialDecay>(p.kind).alpha == doctest::Approx(2.0).epsilon(0.01));
  const DecayFit e = ns_fit(sample(1.0, 100.0, 30, [](double t) { return 0.5 * std::exp(-0.3 * t); }));
  REQUIRE(std::holds_alternative<ExponentialDecay>(e.kind));
  CHECK(std::get<ExponentialDecay>(e.kind).rate == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("ns_fit under 1% multiplicative noise") {
  std::mt19937 rng(7);
  std::normal_distribution<double> noise(0.0, 0.01);
  auto s = sample(10.0, 1e4, 60, [&](double t) { return std::pow(t, -1.5) * (1.0 + noise(rng)); });
  const DecayFit f = ns_fit(s);
  REQUIRE(std::holds_alternative<PolynomialDecay>(f.kind));
  CHECK(std::get<PolynomialDecay>(f.kind).alpha == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("ns_fit refuses thin data") {
  CHECK_THROWS_AS(ns_fit(sample(1.0, 100.0, 5, [](double t) { return 1.0 / t; })), Error);
  CHECK_THROWS_AS(ns_fit(sample(1.0, 5.0, 20, [](double t) { return 1.0 / t; })), Error);
}

TEST_CASE("hyperbolic and circle decay classification") {
  const DecayFit h = ns_fit_model(HeatTraceModel::hyperbolic3(std::numbers::pi), 10.0, 1e4, 40);
  REQUIRE(std::holds_alternative<PolynomialDecay>(h.kind));
  CHECK(std::get<PolynomialDecay>(h.kind).alpha == doctest::Approx(0.5).epsilon(0.02));
  const DecayFit c = ns_fit_model(HeatTraceModel::circle(1.0, 1.0, 0.0), 1.0, 100.0, 40);
  CHECK(std::holds_alternative<ExponentialDecay>(c.kind));
}

TEST_CASE("metric condition") {
  DecayFit f1;
  f1.kind = PolynomialDecay{2.0};
  const MetricCondition m = metric_condition(f1, {GrowthModel::Kind::Polynomial, 1.0, 1.0}, 1.0);
  CHECK(m.alpha == doctest::Approx(1.0));
  CHECK(m.holds);
  f1.kind = PolynomialDecay{0.5};
  CHECK_FALSE(metric_condition(f1, {GrowthModel::Kind::Polynomial, 2.0, 1.0}, 1.0).holds);
  // exponential against exponential: b^2 / 4a < lambda
  f1.kind = ExponentialDecay{1.0};
  CHECK(metric_condition(f1, {GrowthModel::Kind::Exponential, 1.0, 1.0}, 1.0).holds);
  CHECK_FALSE(metric_condition(f1, {GrowthModel::Kind::Exponential, 3.0, 1.0}, 1.0).holds);
  f1.kind = ExponentialDecay{1.0};
  CHECK(metric_condition(f1, {GrowthModel::Kind::Polynomial, 5.0, 1.0}, 1.0).alpha == kInf);
}

TEST_CASE("histogram CSV") {
  const auto path = std::filesystem::temp_directory_path() / "tl_hist.csv";
  {
    std::ofstream f(path);
    f << "# shells\n1\n\n6\n12.5\n";
  }
  const std::vector<double> h = read_histogram_csv(path.string());
  CHECK(h == std::vector<double>{1.0, 6.0, 12.5});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_histogram_csv("/nonexistent.csv"), Error);
}
