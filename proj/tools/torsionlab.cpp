#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_out.hpp"
#include "torsionlab/torsionlab.h"

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kCheckFailed = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  tl_status status;
  ApiError(tl_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

int exit_for(tl_status s) { return tl_status_is_numerical(s) ? kNumerical : kConfig; }

void call(tl_status s) {
  if (s != TL_OK) throw ApiError(s, tl_last_error());
}

struct ModelDel {
  void operator()(tl_model* m) const { tl_model_free(m); }
};
struct ReportDel {
  void operator()(tl_report* r) const { tl_report_free(r); }
};
struct SamplesDel {
  void operator()(tl_samples* s) const { tl_samples_free(s); }
};
using Model = std::unique_ptr<tl_model, ModelDel>;
using Report = std::unique_ptr<tl_report, ReportDel>;
using Samples = std::unique_ptr<tl_samples, SamplesDel>;

std::string error_object(const std::string& code, const std::string& message) {
  return jout::Object()
      .str("version", tl_version())
      .obj("error", jout::Object().str("code", code).str("message", message))
      .dump();
}

// ---- config parsing --------------------------------------------------------

void allow(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw ConfigError("unknown key \"" + k + "\" in " + where);
    }
  }
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " needs \"" + key + "\"");
  if (!j[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::string string_or(const json& j, const char* key, const std::string& fallback,
                      const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError(where + "." + key + " must be a string");
  return j[key].get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// Either an explicit list or {lo, hi, n, spacing}.
std::vector<double> grid(const json& j, const std::string& where) {
  if (j.is_array()) return numbers(j, where);
  allow(j, {"lo", "hi", "n", "spacing"}, where);
  const double lo = number(j, "lo", where);
  const double hi = number(j, "hi", where);
  if (!j.contains("n") || !j["n"].is_number_integer()) throw ConfigError(where + ".n must be an integer");
  const long n = j["n"].get<long>();
  const std::string spacing = string_or(j, "spacing", "linear", where);
  if (n < 1) throw ConfigError(where + ".n must be at least 1");
  if (spacing != "linear" && spacing != "log") throw ConfigError(where + ".spacing must be linear or log");
  if (spacing == "log" && !(lo > 0.0 && hi > 0.0)) throw ConfigError(where + " log spacing needs positive bounds");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(spacing == "log" ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                                   : lo + f * (hi - lo));
  }
  return out;
}

int circle_rep(const json& j, const std::string& where) {
  const std::string rep = string_or(j, "rep", "auto", where);
  if (rep == "spectral") return TL_REP_SPECTRAL;
  if (rep == "images") return TL_REP_IMAGES;
  if (rep == "auto") return TL_REP_AUTO;
  throw ConfigError(where + ".rep must be spectral, images or auto");
}

std::pair<int, double> decay(const json& j, const std::string& where) {
  allow(j, {"kind", "rate", "alpha"}, where);
  const std::string kind = string_or(j, "kind", "", where);
  if (kind == "exponential") return {TL_DECAY_EXPONENTIAL, number(j, "rate", where)};
  if (kind == "polynomial") return {TL_DECAY_POLYNOMIAL, number(j, "alpha", where)};
  if (kind == "unknown") return {TL_DECAY_UNKNOWN, 0.0};
  throw ConfigError(where + ".kind must be exponential, polynomial or unknown");
}

Model sampled_model(const json& j, const std::string& where) {
  allow(j, {"type", "csv", "t", "re", "im", "expansion", "decay"}, where);
  std::vector<double> t, re, im;
  if (j.contains("csv")) {
    if (j.contains("t") || j.contains("re") || j.contains("im")) {
      throw ConfigError(where + " takes either csv or t/re/im arrays");
    }
    tl_samples* raw = nullptr;
    call(tl_samples_read_csv(string_or(j, "csv", "", where).c_str(), &raw));
    Samples s(raw);
    const size_t n = tl_samples_size(s.get());
    t.resize(n);
    re.resize(n);
    im.resize(n);
    for (size_t i = 0; i < n; ++i) call(tl_samples_get(s.get(), i, &t[i], &re[i], &im[i]));
  } else {
    if (!j.contains("t") || !j.contains("re")) throw ConfigError(where + " needs csv or t and re");
    t = numbers(j["t"], where + ".t");
    re = numbers(j["re"], where + ".re");
    im = j.contains("im") ? numbers(j["im"], where + ".im") : std::vector<double>(t.size(), 0.0);
    if (re.size() != t.size() || im.size() != t.size()) {
      throw ConfigError(where + " arrays t, re and im must have equal length");
    }
  }
  std::vector<double> ex, cre, cim;
  double valid_beyond = 0.0;
  if (j.contains("expansion")) {
    const json& e = j["expansion"];
    const std::string w = where + ".expansion";
    allow(e, {"terms", "valid_beyond"}, w);
    valid_beyond = number_or(e, "valid_beyond", 0.0, w);
    if (e.contains("terms")) {
      if (!e["terms"].is_array()) throw ConfigError(w + ".terms must be an array");
      for (const auto& term : e["terms"]) {
        const std::vector<double> v = numbers(term, w + ".terms[]");
        if (v.size() != 2 && v.size() != 3) throw ConfigError(w + ".terms entries are [exponent, re, im]");
        ex.push_back(v[0]);
        cre.push_back(v[1]);
        cim.push_back(v.size() == 3 ? v[2] : 0.0);
      }
    }
  }
  auto [kind, param] = j.contains("decay") ? decay(j["decay"], where + ".decay")
                                           : std::pair<int, double>{TL_DECAY_UNKNOWN, 0.0};
  tl_model* out = nullptr;
  call(tl_model_sampled(t.size(), t.data(), re.data(), im.data(), ex.size(), ex.data(), cre.data(),
                        cim.data(), valid_beyond, kind, param, &out));
  return Model(out);
}

Model model(const json& j, const std::string& where = "model") {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ConfigError(where + " needs a string \"type\"");
  }
  const std::string type = j["type"].get<std::string>();
  tl_model* out = nullptr;
  if (type == "real-line") {
    allow(j, {"type", "R", "theta", "g"}, where);
    call(tl_model_real_line(number_or(j, "R", 1.0, where), number_or(j, "theta", 0.0, where),
                            number_or(j, "g", 0.0, where), &out));
  } else if (type == "circle") {
    allow(j, {"type", "R", "theta", "rot", "rep"}, where);
    call(tl_model_circle(number_or(j, "R", 1.0, where), number(j, "theta", where),
                         number_or(j, "rot", 0.0, where), circle_rep(j, where), &out));
  } else if (type == "circle-untwisted") {
    allow(j, {"type", "R", "rep"}, where);
    call(tl_model_circle_untwisted(number_or(j, "R", 1.0, where), circle_rep(j, where), &out));
  } else if (type == "hyperbolic3") {
    allow(j, {"type", "x", "mode"}, where);
    const std::string mode = string_or(j, "mode", "closed-form", where);
    if (mode != "closed-form" && mode != "bismut") throw ConfigError(where + ".mode must be closed-form or bismut");
    call(tl_model_hyperbolic3(number(j, "x", where), mode == "bismut" ? TL_H3_BISMUT : TL_H3_CLOSED_FORM,
                              &out));
  } else if (type == "product") {
    allow(j, {"type", "left", "right", "chi_left", "chi_right"}, where);
    if (!j.contains("left") || !j.contains("right")) throw ConfigError(where + " needs left and right");
    const Model l = model(j["left"], where + ".left");
    const Model r = model(j["right"], where + ".right");
    call(tl_model_product(l.get(), r.get(), number_or(j, "chi_left", 0.0, where),
                          number_or(j, "chi_right", 0.0, where), &out));
  } else if (type == "sampled") {
    return sampled_model(j, where);
  } else {
    throw ConfigError(where + ".type \"" + type + "\" is not a known model");
  }
  return Model(out);
}

const json& require(const json& cfg, const char* key) {
  if (!cfg.contains(key)) throw ConfigError(std::string("config needs \"") + key + "\"");
  return cfg[key];
}

tl_quadrature quadrature(const json& cfg) {
  tl_quadrature q;
  tl_quadrature_default(&q);
  if (!cfg.contains("quadrature")) return q;
  const json& j = cfg["quadrature"];
  allow(j, {"rel_tol", "abs_tol", "max_subdivisions"}, "quadrature");
  q.rel_tol = number_or(j, "rel_tol", q.rel_tol, "quadrature");
  q.abs_tol = number_or(j, "abs_tol", q.abs_tol, "quadrature");
  if (j.contains("max_subdivisions")) {
    if (!j["max_subdivisions"].is_number_integer()) throw ConfigError("quadrature.max_subdivisions must be an integer");
    q.max_subdivisions = j["max_subdivisions"].get<int>();
  }
  return q;
}

// ---- commands --------------------------------------------------------------

struct Output {
  std::string text;
  int code = kOk;
};

std::string decay_json(int kind, double param) {
  jout::Object o;
  if (kind == TL_DECAY_EXPONENTIAL) return o.str("kind", "exponential").num("rate", param).dump();
  if (kind == TL_DECAY_POLYNOMIAL) return o.str("kind", "polynomial").num("alpha", param).dump();
  return o.str("kind", "unknown").dump();
}

Output cmd_compute(const json& cfg) {
  allow(cfg, {"version", "model", "split", "quadrature", "sigma", "u_grid", "fit_degree"}, "config");
  const Model m = model(require(cfg, "model"));
  const double split = number_or(cfg, "split", 1.0, "config");
  const tl_quadrature q = quadrature(cfg);
  tl_result r;
  call(tl_torsion(m.get(), split, &q, &r));

  jout::Object o;
  o.str("version", tl_version())
      .str("command", "compute")
      .str("model", tl_model_name(m.get()))
      .num("split", r.split)
      .complex("small_part", r.small_re, r.small_im)
      .complex("large_part", r.large_re, r.large_im)
      .complex("minus_two_log_T", r.minus_two_log_T_re, r.minus_two_log_T_im)
      .complex("log_T", r.log_T_re, r.log_T_im)
      .complex("T", r.T_re, r.T_im)
      .num("err_small", r.err_small)
      .num("err_large", r.err_large);

  int found = 0;
  double ore = 0.0, oim = 0.0;
  const char* formula = "";
  call(tl_oracle(m.get(), &found, &ore, &oim, &formula));
  if (found) {
    o.obj("oracle", jout::Object()
                        .str("formula", formula)
                        .complex("value", ore, oim)
                        .num("abs_diff", std::hypot(r.T_re - ore, r.T_im - oim)));
  }
  if (cfg.contains("sigma")) {
    const double sigma = number(cfg, "sigma", "config");
    double re = 0.0, im = 0.0;
    call(tl_torsion_sigma(m.get(), sigma, split, &q, &re, &im));
    o.obj("sigma", jout::Object().num("sigma", sigma).complex("log_T", re, im));
  }
  if (cfg.contains("u_grid") || cfg.contains("fit_degree")) {
    std::vector<double> u = cfg.contains("u_grid") ? numbers(cfg["u_grid"], "u_grid")
                                                   : std::vector<double>{0.4, 0.2, 0.1, 0.05};
    int degree = 3;
    if (cfg.contains("fit_degree")) {
      if (!cfg["fit_degree"].is_number_integer()) throw ConfigError("fit_degree must be an integer");
      degree = cfg["fit_degree"].get<int>();
    }
    double re = 0.0, im = 0.0;
    call(tl_sigma_extrapolate(m.get(), u.size(), u.data(), degree, split, &q, &re, &im));
    o.obj("sigma_extrapolated", jout::Object().integer("fit_degree", degree).complex("log_T", re, im));
  }
  return {o.dump() + "\n", kOk};
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v == 0.0 ? 0.0 : v);
  return buf;
}

Output cmd_trace_dump(const json& cfg) {
  allow(cfg, {"version", "model", "t_grid", "p"}, "config");
  const Model m = model(require(cfg, "model"));
  std::vector<double> t = grid(require(cfg, "t_grid"), "t_grid");
  if (t.empty()) throw ConfigError("t_grid is empty");
  std::sort(t.begin(), t.end());
  std::optional<int> p;
  if (cfg.contains("p")) {
    if (!cfg["p"].is_number_integer()) throw ConfigError("p must be an integer");
    p = cfg["p"].get<int>();
  }
  std::string out = "# schema v1\nt,re,im\n";
  for (double ti : t) {
    double re = 0.0, im = 0.0;
    call(p ? tl_heat_trace_p(m.get(), *p, ti, &re, &im) : tl_curly_T(m.get(), ti, &re, &im));
    out += csv_number(ti) + "," + csv_number(re) + "," + csv_number(im) + "\n";
  }
  return {out, kOk};
}

int growth_kind(const std::string& s) {
  if (s == "polynomial") return TL_GROWTH_POLYNOMIAL;
  if (s == "exponential") return TL_GROWTH_EXPONENTIAL;
  throw ConfigError("growth.kind must be polynomial or exponential");
}

Output cmd_ns(const json& cfg) {
  allow(cfg, {"version", "model", "csv", "t", "abs", "t_window", "n", "growth"}, "config");
  const int sources = int(cfg.contains("model")) + int(cfg.contains("csv")) + int(cfg.contains("t"));
  if (sources != 1) throw ConfigError("ns needs exactly one of model, csv or t/abs");
  std::optional<std::pair<double, double>> window;
  if (cfg.contains("t_window")) {
    const std::vector<double> w = numbers(cfg["t_window"], "t_window");
    if (w.size() != 2) throw ConfigError("t_window must be [lo, hi]");
    window = {w[0], w[1]};
  }
  tl_decay_fit fit{};
  std::string source;
  if (cfg.contains("model")) {
    source = "model";
    const Model m = model(cfg["model"]);
    int n = 40;
    if (cfg.contains("n")) {
      if (!cfg["n"].is_number_integer()) throw ConfigError("n must be an integer");
      n = cfg["n"].get<int>();
    }
    const auto [lo, hi] = window.value_or(std::pair<double, double>{10.0, 1e4});
    call(tl_ns_fit_model(m.get(), lo, hi, n, &fit));
  } else {
    if (cfg.contains("n")) throw ConfigError("n applies only to model sources");
    std::vector<double> t, a;
    if (cfg.contains("csv")) {
      source = "csv";
      if (cfg.contains("abs")) throw ConfigError("abs applies only to t/abs sources");
      tl_samples* raw = nullptr;
      call(tl_samples_read_csv(string_or(cfg, "csv", "", "config").c_str(), &raw));
      Samples s(raw);
      for (size_t i = 0; i < tl_samples_size(s.get()); ++i) {
        double ti = 0.0, re = 0.0, im = 0.0;
        call(tl_samples_get(s.get(), i, &ti, &re, &im));
        t.push_back(ti);
        a.push_back(std::hypot(re, im));
      }
    } else {
      source = "samples";
      t = numbers(cfg["t"], "t");
      a = numbers(require(cfg, "abs"), "abs");
      if (a.size() != t.size()) throw ConfigError("t and abs must have equal length");
    }
    if (window) {
      std::vector<double> tw, aw;
      for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= window->first && t[i] <= window->second) {
          tw.push_back(t[i]);
          aw.push_back(a[i]);
        }
      }
      t.swap(tw);
      a.swap(aw);
    }
    call(tl_ns_fit(t.size(), t.data(), a.data(), &fit));
  }

  jout::Object o;
  o.str("version", tl_version())
      .str("command", "ns")
      .str("source", source)
      .raw("decay", decay_json(fit.kind, fit.param))
      .num("residual", fit.residual)
      .num("residual_polynomial", fit.residual_polynomial)
      .num("residual_exponential", fit.residual_exponential)
      .raw("window", jout::array({jout::number(fit.t_lo), jout::number(fit.t_hi)}));
  if (cfg.contains("growth")) {
    const json& g = cfg["growth"];
    allow(g, {"kind", "b", "a"}, "growth");
    const int kind = growth_kind(string_or(g, "kind", "", "growth"));
    const double b = number(g, "b", "growth");
    const double a = number(g, "a", "growth");
    double alpha = 0.0;
    int holds = 0;
    call(tl_metric_condition(&fit, kind, b, a, &alpha, &holds));
    o.obj("metric_condition", jout::Object().num("alpha", alpha).boolean("holds", holds != 0));
  }
  return {o.dump() + "\n", kOk};
}

std::string report_json(const tl_report* r) {
  std::vector<std::string> details;
  for (size_t i = 0; i < tl_report_detail_count(r); ++i) {
    const char* input = "";
    double ore, oim, ere, eim;
    call(tl_report_detail(r, i, &input, &ore, &oim, &ere, &eim));
    details.push_back(jout::Object()
                          .str("input", input)
                          .complex("observed", ore, oim)
                          .complex("expected", ere, eim)
                          .dump());
  }
  jout::Object evidence;
  for (size_t i = 0; i < tl_report_evidence_count(r); ++i) {
    const char* key = "";
    const char* value = "";
    call(tl_report_evidence(r, i, &key, &value));
    evidence.str(key, value);
  }
  return jout::Object()
      .str("version", tl_version())
      .str("check", tl_report_name(r))
      .boolean("pass", tl_report_pass(r) != 0)
      .num("max_deviation", tl_report_max_deviation(r))
      .num("tolerance", tl_report_tolerance(r))
      .raw("details", jout::array(details))
      .obj("evidence", evidence)
      .dump();
}

Report run_check(const json& c, const json& cfg, size_t index) {
  const std::string where = "checks[" + std::to_string(index) + "]";
  if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) {
    throw ConfigError(where + " needs a string \"name\"");
  }
  const std::string name = c["name"].get<std::string>();
  auto own_model = [&]() {
    if (c.contains("model")) return model(c["model"], where + ".model");
    if (cfg.contains("model")) return model(cfg["model"]);
    throw ConfigError(where + " needs a model");
  };
  auto list = [&](const char* key, std::vector<double> fallback) {
    return c.contains(key) ? grid(c[key], where + "." + key) : fallback;
  };
  tl_report* out = nullptr;
  if (name == "decomposition") {
    allow(c, {"name", "R", "theta", "sigma"}, where);
    call(tl_check_decomposition(number(c, "R", where), number(c, "theta", where),
                                number(c, "sigma", where), &out));
  } else if (name == "gbc") {
    allow(c, {"name", "model", "t_grid"}, where);
    const Model m = own_model();
    const std::vector<double> t = list("t_grid", {0.1, 1.0, 10.0});
    call(tl_check_gbc(m.get(), t.size(), t.data(), &out));
  } else if (name == "even_dim" || name == "product") {
    allow(c, {"name", "left", "right", "chi_left", "chi_right"}, where);
    if (!c.contains("left") || !c.contains("right")) throw ConfigError(where + " needs left and right");
    const Model l = model(c["left"], where + ".left");
    const Model r = model(c["right"], where + ".right");
    const double cl = number_or(c, "chi_left", 0.0, where);
    const double cr = number_or(c, "chi_right", 0.0, where);
    call(name == "product" ? tl_check_product(l.get(), r.get(), cl, cr, &out)
                           : tl_check_even_dim(l.get(), r.get(), cl, cr, &out));
  } else if (name == "rescale") {
    allow(c, {"name", "model", "c"}, where);
    const Model m = own_model();
    const std::vector<double> cs = list("c", {0.5, 2.0});
    call(tl_check_rescale(m.get(), cs.size(), cs.data(), &out));
  } else if (name == "split") {
    allow(c, {"name", "model", "splits"}, where);
    const Model m = own_model();
    const std::vector<double> s = list("splits", {0.5, 1.0, 2.0});
    call(tl_check_split(m.get(), s.size(), s.data(), &out));
  } else {
    throw ConfigError(where + ".name \"" + name + "\" is not a known check");
  }
  return Report(out);
}

// Failures inside one check do not stop the others; the exit code is the
// most serious outcome seen (config, then numerical, then a failed check).
Output cmd_check(const json& cfg) {
  allow(cfg, {"version", "model", "checks"}, "config");
  const json& checks = require(cfg, "checks");
  if (!checks.is_array() || checks.empty()) throw ConfigError("checks must be a non-empty array");
  Output out;
  bool config_err = false, numerical_err = false, failed = false;
  for (size_t i = 0; i < checks.size(); ++i) {
    const std::string label =
        checks[i].is_object() && checks[i].contains("name") && checks[i]["name"].is_string()
            ? checks[i]["name"].get<std::string>()
            : "?";
    try {
      const Report r = run_check(checks[i], cfg, i);
      failed = failed || !tl_report_pass(r.get());
      out.text += report_json(r.get()) + "\n";
    } catch (const ApiError& e) {
      (exit_for(e.status) == kConfig ? config_err : numerical_err) = true;
      out.text += jout::Object()
                      .str("version", tl_version())
                      .str("check", label)
                      .obj("error", jout::Object().str("code", tl_status_name(e.status)).str("message", e.what()))
                      .dump() +
                  "\n";
    }
  }
  out.code = config_err ? kConfig : numerical_err ? kNumerical : failed ? kCheckFailed : kOk;
  return out;
}

json* path_in(json& j, const std::string& path) {
  json* cur = &j;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!cur->is_object() || !cur->contains(part)) return nullptr;
    cur = &(*cur)[part];
  }
  return cur;
}

Output cmd_sweep(const json& cfg) {
  allow(cfg, {"version", "model", "param", "values", "split", "quadrature", "threads"}, "config");
  const json& base = require(cfg, "model");
  const std::string param = string_or(cfg, "param", "", "config");
  if (param.empty()) throw ConfigError("sweep needs a \"param\" naming a model field");
  const std::vector<double> values = grid(require(cfg, "values"), "values");
  if (values.empty()) throw ConfigError("values is empty");
  const double split = number_or(cfg, "split", 1.0, "config");
  const tl_quadrature q = quadrature(cfg);

  // Build every model up front so config errors surface before any work.
  std::vector<Model> models;
  for (double v : values) {
    json m = base;
    json* slot = path_in(m, param);
    if (!slot || !slot->is_number()) throw ConfigError("param \"" + param + "\" is not a numeric model field");
    *slot = v;
    models.push_back(model(m));
  }

  struct Row {
    tl_result r{};
    tl_status status = TL_OK;
  };
  std::vector<Row> rows(values.size());
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (cfg.contains("threads")) {
    if (!cfg["threads"].is_number_integer() || cfg["threads"].get<int>() < 1) {
      throw ConfigError("threads must be a positive integer");
    }
    threads = cfg["threads"].get<unsigned>();
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < rows.size(); i = next++) {
      rows[i].status = tl_torsion(models[i].get(), split, &q, &rows[i].r);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Output out;
  out.text = "# schema v1\n" + param + ",minus_two_log_T,log_T_re,log_T_im,T_re,T_im,status\n";
  bool config_err = false, numerical_err = false;
  for (size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    const bool ok = row.status == TL_OK;
    out.text += csv_number(values[i]);
    for (double v : {row.r.minus_two_log_T_re, row.r.log_T_re, row.r.log_T_im, row.r.T_re, row.r.T_im}) {
      out.text += "," + csv_number(ok ? v : std::nan(""));
    }
    out.text += std::string(",") + (ok ? "ok" : tl_status_name(row.status)) + "\n";
    if (!ok) (exit_for(row.status) == kConfig ? config_err : numerical_err) = true;
  }
  out.code = config_err ? kConfig : numerical_err ? kNumerical : kOk;
  return out;
}

Output cmd_selftest(const json& cfg) {
  if (!cfg.is_null()) allow(cfg, {"version"}, "config");
  tl_selftest* raw = nullptr;
  call(tl_selftest_run(&raw));
  std::unique_ptr<tl_selftest, void (*)(tl_selftest*)> st(raw, tl_selftest_free);
  Output out;
  for (size_t i = 0; i < tl_selftest_count(st.get()); ++i) {
    int id = 0, pass = 0;
    const char* name = "";
    const char* detail = "";
    call(tl_selftest_item(st.get(), i, &id, &name, &pass, &detail));
    if (!pass) out.code = kCheckFailed;
    std::fprintf(stderr, "%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail);
    out.text += jout::Object()
                    .str("version", tl_version())
                    .integer("criterion", id)
                    .str("name", name)
                    .boolean("pass", pass != 0)
                    .str("detail", detail)
                    .dump() +
                "\n";
  }
  return out;
}

json load_config(const std::string& path, bool from_stdin, bool optional) {
  std::string text;
  if (from_stdin) {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  } else if (optional) {
    return nullptr;
  } else {
    throw ConfigError("a config is required (--config PATH or --stdin)");
  }
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (cfg.contains("version") && cfg["version"] != "v1") throw ConfigError("unsupported config version");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torsionlab: zeta-regularized equivariant torsion from heat traces"};
  app.require_subcommand(1, 1);
  std::string config_path, out_path;
  bool from_stdin = false;
  const char* names[] = {"compute", "trace-dump", "ns", "check", "sweep", "selftest"};
  const char* help[] = {"regularized torsion of one model",
                        "sample the model heat trace as CSV",
                        "Novikov-Shubin type decay fit",
                        "run named consistency checks (JSON lines)",
                        "torsion over a parameter grid as CSV",
                        "run the acceptance suite"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    auto* cfg_opt = sub->add_option("--config", config_path, "JSON config file");
    auto* stdin_opt = sub->add_flag("--stdin", from_stdin, "read the JSON config from standard input");
    cfg_opt->excludes(stdin_opt);
    sub->add_option("--out", out_path, "write output here instead of stdout");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  Output out;
  try {
    const json cfg = load_config(config_path, from_stdin, cmd == "selftest");
    if (cmd == "compute") out = cmd_compute(cfg);
    else if (cmd == "trace-dump") out = cmd_trace_dump(cfg);
    else if (cmd == "ns") out = cmd_ns(cfg);
    else if (cmd == "check") out = cmd_check(cfg);
    else if (cmd == "sweep") out = cmd_sweep(cfg);
    else out = cmd_selftest(cfg);
  } catch (const ConfigError& e) {
    std::cerr << error_object("ConfigError", e.what()) << "\n";
    return kConfig;
  } catch (const ApiError& e) {
    std::cerr << error_object(tl_status_name(e.status), e.what()) << "\n";
    return exit_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << error_object("InternalError", e.what()) << "\n";
    return kNumerical;
  }

  if (out_path.empty()) {
    std::cout << out.text;
    std::cout.flush();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << out.text;
    if (!f) {
      std::cerr << error_object("IoError", "cannot write " + out_path) << "\n";
      return kConfig;
    }
  }
  return out.code;
}
