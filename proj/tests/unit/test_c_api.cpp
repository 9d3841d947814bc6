#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "torsionlab/torsionlab.h"

using std::numbers::pi;

TEST_CASE("status names and classes") {
  CHECK(std::string(tl_version()) == "v1");
  CHECK(std::string(tl_status_name(TL_OK)) == "Ok");
  CHECK(std::string(tl_status_name(TL_DOMAIN_ERROR)) == "DomainError");
  CHECK(std::string(tl_status_name(TL_IO_ERROR)) == "IoError");
  CHECK(std::string(tl_status_name(TL_INTERNAL_ERROR)) == "InternalError");
  CHECK(tl_status_is_numerical(TL_NON_CONVERGENCE));
  CHECK(tl_status_is_numerical(TL_EXPANSION_INSUFFICIENT));
  CHECK_FALSE(tl_status_is_numerical(TL_DOMAIN_ERROR));
  CHECK_FALSE(tl_status_is_numerical(TL_INVALID_ARGUMENT));
  CHECK_FALSE(tl_status_is_numerical(TL_OK));
}

TEST_CASE("errors carry a status and a message") {
  tl_model* m = nullptr;
  CHECK(tl_model_circle_untwisted(-1.0, TL_REP_AUTO, &m) == TL_DOMAIN_ERROR);
  CHECK(m == nullptr);
  CHECK(std::string(tl_last_error()) == "R must be positive");
  CHECK(tl_model_circle_untwisted(1.0, 17, &m) == TL_INVALID_ARGUMENT);
  CHECK(tl_model_hyperbolic3(1.0, TL_H3_CLOSED_FORM, nullptr) == TL_INVALID_ARGUMENT);
  double re, im;
  CHECK(tl_curly_T(nullptr, 1.0, &re, &im) == TL_INVALID_ARGUMENT);
  REQUIRE(tl_model_hyperbolic3(1.0, TL_H3_CLOSED_FORM, &m) == TL_OK);
  CHECK(std::string(tl_last_error()).empty());
  CHECK(tl_curly_T(m, -1.0, &re, &im) == TL_DOMAIN_ERROR);
  tl_model_free(m);
  tl_model_free(nullptr);
}

TEST_CASE("torsion through the C interface") {
  tl_model* m = nullptr;
  REQUIRE(tl_model_circle(3.0, pi / 2, 0.0, TL_REP_AUTO, &m) == TL_OK);
  CHECK(std::string(tl_model_name(m)) == "circle");
  tl_result r;
  REQUIRE(tl_torsion(m, 1.0, nullptr, &r) == TL_OK);
  CHECK(r.T_re == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(r.split == 1.0);
  int found = 0;
  double ore, oim;
  const char* formula = nullptr;
  REQUIRE(tl_oracle(m, &found, &ore, &oim, &formula) == TL_OK);
  CHECK(found == 1);
  CHECK(std::strlen(formula) > 0);
  CHECK(std::abs(ore - r.T_re) < 1e-8);
  tl_model_free(m);

  REQUIRE(tl_model_hyperbolic3(pi, TL_H3_CLOSED_FORM, &m) == TL_OK);
  tl_quadrature q;
  tl_quadrature_default(&q);
  q.rel_tol = 1e-12;
  REQUIRE(tl_torsion(m, 2.0, &q, &r) == TL_OK);
  CHECK(r.minus_two_log_T_re == doctest::Approx(0.25).epsilon(1e-9));
  q.max_subdivisions = 0;
  CHECK(tl_torsion(m, 1.0, &q, &r) == TL_INVALID_ARGUMENT);
  double lre, lim;
  REQUIRE(tl_sigma_extrapolate(m, 0, nullptr, 0, 1.0, nullptr, &lre, &lim) == TL_OK);
  CHECK(-2.0 * lre == doctest::Approx(0.25).epsilon(1e-3));
  double dev = 1.0;
  const double splits[] = {0.5, 1.0, 2.0};
  REQUIRE(tl_split_invariance(m, 3, splits, nullptr, &dev) == TL_OK);
  CHECK(dev < 1e-6);
  int kind = -1;
  double param = 0.0;
  REQUIRE(tl_decay_hint(m, &kind, &param) == TL_OK);
  CHECK(kind == TL_DECAY_POLYNOMIAL);
  CHECK(param == 0.5);
  tl_model_free(m);
}

TEST_CASE("products and sampled models") {
  tl_model *a = nullptr, *b = nullptr, *p = nullptr;
  REQUIRE(tl_model_real_line(1.0, 0.0, 1.0, &a) == TL_OK);
  REQUIRE(tl_model_circle_untwisted(2.0, TL_REP_SPECTRAL, &b) == TL_OK);
  REQUIRE(tl_model_product(a, b, 0.0, 0.0, &p) == TL_OK);
  double chi = 1.0;
  REQUIRE(tl_chi_g(p, &chi) == TL_OK);
  CHECK(chi == 0.0);
  tl_result r;
  REQUIRE(tl_torsion(p, 1.0, nullptr, &r) == TL_OK);
  CHECK(std::abs(r.T_re - 1.0) < 1e-8);
  tl_model_free(p);
  tl_model_free(a);
  tl_model_free(b);

  std::vector<double> t, re;
  for (double x = 0.05; x < 40.0; x *= 1.03) {
    t.push_back(x);
    re.push_back(std::exp(-2.0 * x));
  }
  const double ex[] = {0, 1, 2, 3}, cre[] = {1, -2, 2, -4.0 / 3.0};
  tl_model* s = nullptr;
  REQUIRE(tl_model_sampled(t.size(), t.data(), re.data(), nullptr, 4, ex, cre, nullptr, 4.0,
                           TL_DECAY_EXPONENTIAL, 2.0, &s) == TL_OK);
  REQUIRE(tl_torsion(s, 1.0, nullptr, &r) == TL_OK);
  CHECK(r.minus_two_log_T_re == doctest::Approx(-std::log(2.0)).epsilon(1e-4));
  tl_model_free(s);
}

TEST_CASE("reports") {
  tl_report* r = nullptr;
  REQUIRE(tl_check_decomposition(1.0, pi / 2, 1.0, &r) == TL_OK);
  CHECK(std::string(tl_report_name(r)) == "decomposition");
  CHECK(tl_report_pass(r) == 1);
  CHECK(tl_report_max_deviation(r) <= tl_report_tolerance(r));
  REQUIRE(tl_report_detail_count(r) > 0);
  const char* input = nullptr;
  double a, b, c, d;
  REQUIRE(tl_report_detail(r, 0, &input, &a, &b, &c, &d) == TL_OK);
  CHECK(input != nullptr);
  CHECK(tl_report_detail(r, 999, &input, &a, &b, &c, &d) == TL_INVALID_ARGUMENT);
  bool seen = false;
  for (size_t i = 0; i < tl_report_evidence_count(r); ++i) {
    const char *k = nullptr, *v = nullptr;
    REQUIRE(tl_report_evidence(r, i, &k, &v) == TL_OK);
    if (std::string(k) == "matching_variant") {
      seen = true;
      CHECK(std::string(v) == "GammaConsistent");
    }
  }
  CHECK(seen);
  tl_report_free(r);
}

TEST_CASE("growth and decay entry points") {
  std::vector<double> t, v;
  for (int i = 0; i < 30; ++i) {
    t.push_back(std::pow(10.0, i / 10.0));
    v.push_back(std::pow(t.back(), -2.0));
  }
  tl_decay_fit fit;
  REQUIRE(tl_ns_fit(t.size(), t.data(), v.data(), &fit) == TL_OK);
  CHECK(fit.kind == TL_DECAY_POLYNOMIAL);
  CHECK(fit.param == doctest::Approx(2.0).epsilon(0.01));
  double alpha = 0.0;
  int holds = 0;
  REQUIRE(tl_metric_condition(&fit, TL_GROWTH_POLYNOMIAL, 1.0, 1.0, &alpha, &holds) == TL_OK);
  CHECK(alpha == doctest::Approx(1.0).epsilon(0.02));
  CHECK(holds == 1);
  CHECK(tl_ns_fit(3, t.data(), v.data(), &fit) != TL_OK);

  double f = 0.0;
  REQUIRE(tl_f3(0, nullptr, TL_GROWTH_POLYNOMIAL, 0.0, 1.0, 1.0, 1.0, &f) == TL_OK);
  long double direct = 0.0L;
  for (int j = 0; j < 50; ++j) direct += std::exp(-double(j) * j);
  CHECK(f == doctest::Approx(static_cast<double>(direct)).epsilon(1e-13));
  const double bins[] = {1.0, 2.0};
  CHECK(tl_f3(2, bins, TL_GROWTH_NONE, 0.0, 1.0, 1.0, 1e4, &f) == TL_TAIL_UNBOUNDED);

  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(10.0 * std::pow(1000.0, i / 30.0));
  double sup = 0.0, slope = 0.0;
  int pass = 0;
  REQUIRE(tl_f3_bound_check(TL_GROWTH_POLYNOMIAL, 2.0, 1.0, grid.size(), grid.data(), 0, 0, 0, &sup,
                            &slope, &pass) == TL_OK);
  CHECK(pass == 1);
}

TEST_CASE("CSV readers report IO errors") {
  tl_samples* s = nullptr;
  CHECK(tl_samples_read_csv("/nonexistent/x.csv", &s) == TL_IO_ERROR);
  CHECK(tl_histogram_read_csv("/nonexistent/x.csv", &s) == TL_IO_ERROR);
  CHECK(tl_samples_size(nullptr) == 0);
}

TEST_CASE("bismut calibration through the C interface") {
  double m = 0.0, sign = 0.0, res = 1.0;
  REQUIRE(tl_bismut_calibration(&m, &sign, &res) == TL_OK);
  CHECK(m == 1.0);
  CHECK(sign == -1.0);
  CHECK(res < 1e-10);
}
