#include "torsionlab/torsionlab.h"

#include <new>
#include <string>

#include "torsionlab/acceptance.hpp"
#include "torsionlab/bismut.hpp"
#include "torsionlab/checks.hpp"
#include "torsionlab/growth.hpp"
#include "torsionlab/mellin.hpp"
#include "torsionlab/oracles.hpp"

using namespace torsionlab;

struct tl_model {
  HeatTraceModel model;
  std::string name;
};

struct tl_report {
  CheckReport report;
};

struct tl_samples {
  TraceSamples samples;
};

struct tl_selftest {
  std::vector<CriterionResult> results;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
tl_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return TL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<tl_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TL_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TL_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown exception";
    return TL_INTERNAL_ERROR;
  }
}

template <typename T>
void need(const T* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

void emit(tl_model** out, HeatTraceModel m) {
  need(out, "out");
  auto* h = new tl_model{std::move(m), {}};
  h->name = h->model.name();
  *out = h;
}

void emit(tl_report** out, CheckReport r) {
  need(out, "out");
  *out = new tl_report{std::move(r)};
}

CircleRep rep_of(int rep) {
  switch (rep) {
    case TL_REP_SPECTRAL: return CircleRep::Spectral;
    case TL_REP_IMAGES: return CircleRep::Images;
    case TL_REP_AUTO: return CircleRep::Auto;
  }
  fail(ErrorCode::InvalidArgument, "unknown circle representation");
}

QuadratureSpec quad_of(const tl_quadrature* q) {
  QuadratureSpec s;
  if (q) {
    s.rel_tol = q->rel_tol;
    s.abs_tol = q->abs_tol;
    s.max_subdivisions = q->max_subdivisions;
  }
  s.validate();
  return s;
}

DecayHint decay_of(int kind, double param) {
  switch (kind) {
    case TL_DECAY_EXPONENTIAL: return ExponentialDecay{param};
    case TL_DECAY_POLYNOMIAL: return PolynomialDecay{param};
    case TL_DECAY_UNKNOWN: return UnknownDecay{};
  }
  fail(ErrorCode::InvalidArgument, "unknown decay kind");
}

void split_decay(const DecayHint& d, int* kind, double* param) {
  if (const auto* e = std::get_if<ExponentialDecay>(&d)) {
    *kind = TL_DECAY_EXPONENTIAL;
    *param = e->rate;
  } else if (const auto* p = std::get_if<PolynomialDecay>(&d)) {
    *kind = TL_DECAY_POLYNOMIAL;
    *param = p->alpha;
  } else {
    *kind = TL_DECAY_UNKNOWN;
    *param = 0.0;
  }
}

std::optional<GrowthModel> growth_of(int kind, double b, double scale) {
  switch (kind) {
    case TL_GROWTH_POLYNOMIAL: return GrowthModel{GrowthModel::Kind::Polynomial, b, scale};
    case TL_GROWTH_EXPONENTIAL: return GrowthModel{GrowthModel::Kind::Exponential, b, scale};
    case TL_GROWTH_NONE: return std::nullopt;
  }
  fail(ErrorCode::InvalidArgument, "unknown growth kind");
}

void put(CScalar z, double* re, double* im) {
  need(re, "re");
  need(im, "im");
  *re = z.real();
  *im = z.imag();
}

void fill(const DecayFit& f, tl_decay_fit* out) {
  need(out, "out");
  split_decay(f.kind, &out->kind, &out->param);
  out->residual = f.residual;
  out->residual_polynomial = f.residual_polynomial;
  out->residual_exponential = f.residual_exponential;
  out->t_lo = f.window.first;
  out->t_hi = f.window.second;
}

std::vector<double> span_of(size_t n, const double* p, const char* what) {
  if (n > 0) need(p, what);
  return std::vector<double>(p, p + n);
}

}  // namespace

extern "C" {

const char* tl_version(void) { return "v1"; }

const char* tl_status_name(tl_status status) {
  if (status == TL_OK) return "Ok";
  if (status == TL_INTERNAL_ERROR) return "InternalError";
  if (status >= TL_DOMAIN_ERROR && status <= TL_IO_ERROR) {
    return error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
  }
  return "Unknown";
}

const char* tl_last_error(void) { return g_last_error.c_str(); }

int tl_status_is_numerical(tl_status status) {
  if (status < TL_DOMAIN_ERROR || status > TL_IO_ERROR) return 0;
  return Error(static_cast<ErrorCode>(static_cast<int>(status)), "").is_numerical() ? 1 : 0;
}

void tl_quadrature_default(tl_quadrature* out) {
  if (!out) return;
  const QuadratureSpec s;
  out->rel_tol = s.rel_tol;
  out->abs_tol = s.abs_tol;
  out->max_subdivisions = s.max_subdivisions;
}

tl_status tl_model_real_line(double R, double theta, double g, tl_model** out) {
  return guard([&] { emit(out, HeatTraceModel::real_line(R, theta, g)); });
}

tl_status tl_model_circle(double R, double theta, double rot, int rep, tl_model** out) {
  return guard([&] { emit(out, HeatTraceModel::circle(R, theta, rot, rep_of(rep))); });
}

tl_status tl_model_circle_untwisted(double R, int rep, tl_model** out) {
  return guard([&] { emit(out, HeatTraceModel::circle_untwisted(R, rep_of(rep))); });
}

tl_status tl_model_hyperbolic3(double x, int mode, tl_model** out) {
  return guard([&] {
    if (mode != TL_H3_CLOSED_FORM && mode != TL_H3_BISMUT) fail(ErrorCode::InvalidArgument, "unknown mode");
    emit(out, HeatTraceModel::hyperbolic3(x, mode == TL_H3_BISMUT ? H3Mode::BismutQuadrature
                                                                  : H3Mode::ClosedForm));
  });
}

tl_status tl_model_product(const tl_model* left, const tl_model* right, double chi_left,
                           double chi_right, tl_model** out) {
  return guard([&] {
    need(left, "left");
    need(right, "right");
    emit(out, HeatTraceModel::product(left->model, right->model, chi_left, chi_right));
  });
}

tl_status tl_model_sampled(size_t n, const double* t, const double* re, const double* im,
                           size_t n_terms, const double* exponents, const double* coeff_re,
                           const double* coeff_im, double valid_beyond, int decay_kind,
                           double decay_param, tl_model** out) {
  return guard([&] {
    need(t, "t");
    need(re, "re");
    std::vector<double> grid(t, t + n);
    std::vector<CScalar> values(n);
    for (size_t i = 0; i < n; ++i) values[i] = {re[i], im ? im[i] : 0.0};
    AsymptoticExpansion e;
    e.valid_beyond = valid_beyond;
    if (n_terms > 0) {
      need(exponents, "exponents");
      need(coeff_re, "coeff_re");
    }
    for (size_t k = 0; k < n_terms; ++k) {
      e.terms.push_back({exponents[k], {coeff_re[k], coeff_im ? coeff_im[k] : 0.0}});
    }
    emit(out, HeatTraceModel::sampled(std::move(grid), std::move(values), std::move(e),
                                      decay_of(decay_kind, decay_param)));
  });
}

void tl_model_free(tl_model* model) { delete model; }

const char* tl_model_name(const tl_model* model) { return model ? model->name.c_str() : ""; }

tl_status tl_curly_T(const tl_model* model, double t, double* re, double* im) {
  return guard([&] {
    need(model, "model");
    put(curly_T(model->model, t), re, im);
  });
}

tl_status tl_heat_trace_p(const tl_model* model, int p, double t, double* re, double* im) {
  return guard([&] {
    need(model, "model");
    put(heat_trace_p(model->model, p, t), re, im);
  });
}

tl_status tl_decay_hint(const tl_model* model, int* kind, double* param) {
  return guard([&] {
    need(model, "model");
    need(kind, "kind");
    need(param, "param");
    split_decay(decay_hint(model->model), kind, param);
  });
}

tl_status tl_chi_g(const tl_model* model, double* out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    *out = chi_g(model->model);
  });
}

tl_status tl_torsion(const tl_model* model, double split, const tl_quadrature* quad,
                     tl_result* out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    const RegularizedResult r = torsion(model->model, split, quad_of(quad));
    *out = tl_result{r.small_part.real(),      r.small_part.imag(),      r.large_part.real(),
                     r.large_part.imag(),      r.minus_two_log_T.real(), r.minus_two_log_T.imag(),
                     r.log_T.real(),           r.log_T.imag(),           r.T.real(),
                     r.T.imag(),               r.err_small,              r.err_large,
                     r.split};
  });
}

tl_status tl_torsion_sigma(const tl_model* model, double sigma, double split,
                           const tl_quadrature* quad, double* log_T_re, double* log_T_im) {
  return guard([&] {
    need(model, "model");
    put(torsion_sigma(model->model, sigma, split, quad_of(quad)), log_T_re, log_T_im);
  });
}

tl_status tl_sigma_extrapolate(const tl_model* model, size_t n, const double* u_grid, int degree,
                               double split, const tl_quadrature* quad, double* log_T_re,
                               double* log_T_im) {
  return guard([&] {
    need(model, "model");
    SigmaOptions opts;
    if (n > 0) {
      opts.u_grid = span_of(n, u_grid, "u_grid");
      opts.fit_degree = degree;
    }
    put(sigma_extrapolate(model->model, opts, split, quad_of(quad)), log_T_re, log_T_im);
  });
}

tl_status tl_split_invariance(const tl_model* model, size_t n, const double* splits,
                              const tl_quadrature* quad, double* max_deviation) {
  return guard([&] {
    need(model, "model");
    need(max_deviation, "max_deviation");
    *max_deviation = split_invariance(model->model, span_of(n, splits, "splits"), quad_of(quad));
  });
}

tl_status tl_oracle(const tl_model* model, int* found, double* T_re, double* T_im,
                    const char** formula) {
  return guard([&] {
    need(model, "model");
    need(found, "found");
    const auto v = oracles::oracle_for_model(model->model);
    *found = v ? 1 : 0;
    if (v) {
      put(v->value, T_re, T_im);
      if (formula) *formula = oracles::formula_name(v->formula_id);
    }
  });
}

tl_status tl_bismut_calibration(double* measure_factor, double* sign, double* residual) {
  return guard([&] {
    const bismut::Calibration& c = bismut::calibration();
    if (measure_factor) *measure_factor = c.measure_factor;
    if (sign) *sign = c.sign;
    if (residual) *residual = c.residual;
  });
}

tl_status tl_ns_fit(size_t n, const double* t, const double* abs_values, tl_decay_fit* out) {
  return guard([&] {
    if (n > 0) {
      need(t, "t");
      need(abs_values, "abs_values");
    }
    std::vector<std::pair<double, double>> samples;
    for (size_t i = 0; i < n; ++i) samples.emplace_back(t[i], abs_values[i]);
    fill(ns_fit(samples), out);
  });
}

tl_status tl_ns_fit_model(const tl_model* model, double t_lo, double t_hi, int n,
                          tl_decay_fit* out) {
  return guard([&] {
    need(model, "model");
    fill(ns_fit_model(model->model, t_lo, t_hi, n), out);
  });
}

tl_status tl_f3(size_t n_bins, const double* bins, int model_kind, double b, double scale,
                double a, double t, double* out) {
  return guard([&] {
    need(out, "out");
    const GrowthHistogram hist{span_of(n_bins, bins, "bins"), growth_of(model_kind, b, scale)};
    *out = f3(hist, a, t);
  });
}

tl_status tl_f3_bound_check(int model_kind, double b, double a, size_t n, const double* t_grid,
                            int custom_bound, double bound_power, double bound_rate,
                            double* sup_ratio, double* tail_slope, int* pass) {
  return guard([&] {
    const auto model = growth_of(model_kind, b, 1.0);
    if (!model) fail(ErrorCode::InvalidArgument, "bound check needs a growth model");
    std::optional<GrowthBound> bound;
    if (custom_bound) bound = GrowthBound{bound_power, bound_rate};
    const BoundCheck c = f3_bound_check(*model, a, span_of(n, t_grid, "t_grid"), bound);
    if (sup_ratio) *sup_ratio = c.sup_ratio;
    if (tail_slope) *tail_slope = c.tail_slope;
    if (pass) *pass = c.pass ? 1 : 0;
  });
}

tl_status tl_metric_condition(const tl_decay_fit* f1, int model_kind, double b, double a,
                              double* alpha, int* holds) {
  return guard([&] {
    need(f1, "f1");
    const auto model = growth_of(model_kind, b, 1.0);
    if (!model) fail(ErrorCode::InvalidArgument, "metric condition needs a growth model");
    DecayFit fit;
    fit.kind = decay_of(f1->kind, f1->param);
    const MetricCondition m = metric_condition(fit, *model, a);
    if (alpha) *alpha = m.alpha;
    if (holds) *holds = m.holds ? 1 : 0;
  });
}

tl_status tl_samples_read_csv(const char* path, tl_samples** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new tl_samples{read_trace_csv(path)};
  });
}

tl_status tl_histogram_read_csv(const char* path, tl_samples** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    const std::vector<double> bins = read_histogram_csv(path);
    TraceSamples s;
    for (size_t i = 0; i < bins.size(); ++i) {
      s.t.push_back(static_cast<double>(i));
      s.values.emplace_back(bins[i], 0.0);
    }
    *out = new tl_samples{std::move(s)};
  });
}

size_t tl_samples_size(const tl_samples* samples) { return samples ? samples->samples.t.size() : 0; }

tl_status tl_samples_get(const tl_samples* samples, size_t i, double* t, double* re, double* im) {
  return guard([&] {
    need(samples, "samples");
    need(t, "t");
    if (i >= samples->samples.t.size()) fail(ErrorCode::InvalidArgument, "sample index out of range");
    *t = samples->samples.t[i];
    put(samples->samples.values[i], re, im);
  });
}

void tl_samples_free(tl_samples* samples) { delete samples; }

tl_status tl_check_gbc(const tl_model* model, size_t n, const double* t_grid, tl_report** out) {
  return guard([&] {
    need(model, "model");
    emit(out, gbc_constancy(model->model, span_of(n, t_grid, "t_grid")));
  });
}

tl_status tl_check_even_dim(const tl_model* left, const tl_model* right, double chi_left,
                            double chi_right, tl_report** out) {
  return guard([&] {
    need(left, "left");
    need(right, "right");
    emit(out, even_dim_product_vanishing(left->model, right->model, chi_left, chi_right));
  });
}

tl_status tl_check_product(const tl_model* left, const tl_model* right, double chi_left,
                           double chi_right, tl_report** out) {
  return guard([&] {
    need(left, "left");
    need(right, "right");
    emit(out, product_formula(left->model, right->model, chi_left, chi_right));
  });
}

tl_status tl_check_decomposition(double R, double theta, double sigma, tl_report** out) {
  return guard([&] { emit(out, decomposition_check(R, theta, sigma)); });
}

tl_status tl_check_rescale(const tl_model* model, size_t n, const double* c_values,
                           tl_report** out) {
  return guard([&] {
    need(model, "model");
    emit(out, rescale_invariance(model->model, span_of(n, c_values, "c_values")));
  });
}

tl_status tl_check_split(const tl_model* model, size_t n, const double* splits, tl_report** out) {
  return guard([&] {
    need(model, "model");
    emit(out, split_check(model->model, span_of(n, splits, "splits")));
  });
}

const char* tl_report_name(const tl_report* report) { return report ? report->report.name.c_str() : ""; }
double tl_report_max_deviation(const tl_report* report) { return report ? report->report.max_deviation : 0.0; }
double tl_report_tolerance(const tl_report* report) { return report ? report->report.tolerance : 0.0; }
int tl_report_pass(const tl_report* report) { return report && report->report.pass ? 1 : 0; }
size_t tl_report_detail_count(const tl_report* report) { return report ? report->report.details.size() : 0; }
size_t tl_report_evidence_count(const tl_report* report) { return report ? report->report.evidence.size() : 0; }

tl_status tl_report_detail(const tl_report* report, size_t i, const char** input,
                           double* observed_re, double* observed_im, double* expected_re,
                           double* expected_im) {
  return guard([&] {
    need(report, "report");
    if (i >= report->report.details.size()) fail(ErrorCode::InvalidArgument, "detail index out of range");
    const CheckDetail& d = report->report.details[i];
    if (input) *input = d.input.c_str();
    put(d.observed, observed_re, observed_im);
    put(d.expected, expected_re, expected_im);
  });
}

tl_status tl_report_evidence(const tl_report* report, size_t i, const char** key,
                             const char** value) {
  return guard([&] {
    need(report, "report");
    if (i >= report->report.evidence.size()) fail(ErrorCode::InvalidArgument, "evidence index out of range");
    if (key) *key = report->report.evidence[i].first.c_str();
    if (value) *value = report->report.evidence[i].second.c_str();
  });
}

void tl_report_free(tl_report* report) { delete report; }

tl_status tl_selftest_run(tl_selftest** out) {
  return guard([&] {
    need(out, "out");
    *out = new tl_selftest{run_acceptance()};
  });
}

size_t tl_selftest_count(const tl_selftest* st) { return st ? st->results.size() : 0; }

tl_status tl_selftest_item(const tl_selftest* st, size_t i, int* id, const char** name, int* pass,
                           const char** detail) {
  return guard([&] {
    need(st, "selftest");
    if (i >= st->results.size()) fail(ErrorCode::InvalidArgument, "criterion index out of range");
    const CriterionResult& r = st->results[i];
    if (id) *id = r.id;
    if (name) *name = r.name.c_str();
    if (pass) *pass = r.pass ? 1 : 0;
    if (detail) *detail = r.detail.c_str();
  });
}

void tl_selftest_free(tl_selftest* st) { delete st; }

}  // extern "C"
