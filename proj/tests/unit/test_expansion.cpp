#include <doctest.h>

#include <cmath>

#include "torsionlab/expansion.hpp"

using namespace torsionlab;

namespace {

// Taylor data of e^{-t}: 1 - t + t^2/2 - t^3/6 + O(t^4).
AsymptoticExpansion exp_series() {
  AsymptoticExpansion e;
  e.terms = {{0.0, 1.0}, {1.0, -1.0}, {2.0, 0.5}, {3.0, -1.0 / 6.0}};
  e.valid_beyond = 4.0;
  return e;
}

}  // namespace

TEST_CASE("evaluate, magnitude and constant term") {
  AsymptoticExpansion e;
  e.terms = {{-0.5, 2.0}, {0.0, CScalar(0.0, 1.0)}, {1.0, -3.0}};
  e.valid_beyond = 2.0;
  const double t = 0.25;
  CHECK(std::abs(e.evaluate(t) - CScalar(4.0 - 0.75, 1.0)) < 1e-15);
  CHECK(e.magnitude(t) == doctest::Approx(4.0 + 1.0 + 0.75));
  CHECK(e.constant_term() == CScalar(0.0, 1.0));
  AsymptoticExpansion none;
  CHECK(none.constant_term() == CScalar(0.0));
}

TEST_CASE("validate rejects disordered exponents") {
  AsymptoticExpansion e;
  e.terms = {{1.0, 1.0}, {0.0, 1.0}};
  e.valid_beyond = 2.0;
  CHECK_THROWS_AS(e.validate(), Error);
  e.terms = {{0.0, 1.0}, {0.0, 2.0}};
  CHECK_THROWS_AS(e.validate(), Error);
  e.terms = {{0.0, std::nan("")}};
  CHECK_THROWS_AS(e.validate(), Error);
}

TEST_CASE("combine merges equal exponents") {
  AsymptoticExpansion a, b;
  a.terms = {{-0.5, 1.0}, {0.0, 2.0}};
  a.valid_beyond = 1.0;
  b.terms = {{0.0, 3.0}, {0.5, 1.0}};
  b.valid_beyond = 2.0;
  const AsymptoticExpansion c = combine(a, 2.0, b, -1.0);
  REQUIRE(c.terms.size() == 3);
  CHECK(c.terms[1].exponent == 0.0);
  CHECK(c.terms[1].coeff == CScalar(1.0));
  CHECK(c.valid_beyond == 1.0);
}

TEST_CASE("damp agrees with multiplying by e^{-sigma t} to the remainder order") {
  const double sigma = 0.7;
  const AsymptoticExpansion d = damp(exp_series(), sigma);
  // e^{-sigma t} e^{-t} = e^{-(1+sigma) t}; remainder should scale like t^4
  auto err = [&](double t) { return std::abs(d.evaluate(t) - std::exp(-(1.0 + sigma) * t)); };
  const double slope = std::log(err(0.02) / err(0.01)) / std::log(2.0);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("rescale_time is exact on power terms") {
  AsymptoticExpansion e;
  e.terms = {{-0.5, 2.0}, {0.0, 1.0}, {1.5, -1.0}};
  e.valid_beyond = 2.0;
  const double c = 3.0;
  const AsymptoticExpansion r = rescale_time(e, c);
  for (double t : {0.01, 0.1, 0.7}) CHECK(std::abs(r.evaluate(t) - e.evaluate(c * t)) < 1e-13);
}

TEST_CASE("decay hints") {
  const DecayHint p = PolynomialDecay{1.5};
  const DecayHint x = ExponentialDecay{2.0};
  CHECK(std::holds_alternative<PolynomialDecay>(slower(p, x)));
  CHECK(std::get<ExponentialDecay>(slower(ExponentialDecay{3.0}, x)).rate == 2.0);
  CHECK(std::holds_alternative<UnknownDecay>(slower(p, UnknownDecay{})));
  CHECK(std::get<ExponentialDecay>(damp(x, 0.5)).rate == doctest::Approx(2.5));
  CHECK(std::get<ExponentialDecay>(damp(p, 0.5)).rate == doctest::Approx(0.5));
  CHECK(std::get<ExponentialDecay>(rescale_time(x, 2.0)).rate == doctest::Approx(4.0));
  CHECK(std::get<PolynomialDecay>(rescale_time(p, 2.0)).alpha == doctest::Approx(1.5));
  CHECK_THROWS_AS(validate(DecayHint{ExponentialDecay{-1.0}}), Error);
  CHECK_THROWS_AS(validate(DecayHint{PolynomialDecay{0.0}}), Error);
}
