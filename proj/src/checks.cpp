#include "torsionlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace torsionlab {

namespace {

std::string fmt(const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.17g", key, v);
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void finish(CheckReport& r) { r.pass = r.max_deviation <= r.tolerance; }

bool odd_dimensional(const HeatTraceModel& model) {
  if (const auto* p = std::get_if<Product>(&model.kind())) return p->chi_left * p->chi_right == 0.0;
  return !std::holds_alternative<Sampled>(model.kind());
}

}  // namespace

CheckReport gbc_constancy(const HeatTraceModel& model, const std::vector<double>& t_grid) {
  if (t_grid.empty()) fail(ErrorCode::InvalidArgument, "gbc check needs a t grid");
  CheckReport r;
  r.name = "gbc_constancy";
  r.tolerance = 1e-10;
  const bool odd = odd_dimensional(model);
  std::vector<CScalar> v;
  for (double t : t_grid) v.push_back(alternating_trace(model, t));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const CScalar expected = odd ? CScalar(0.0) : v.front();
    r.details.push_back({fmt("t", t_grid[i]), v[i], expected});
    r.max_deviation = std::max(r.max_deviation, std::abs(v[i] - v.front()));
    if (odd) r.max_deviation = std::max(r.max_deviation, std::abs(v[i]));
  }
  r.evidence.emplace_back("model", model.name());
  r.evidence.emplace_back("chi_g", num(v.front().real()));
  r.evidence.emplace_back("odd_dimensional", odd ? "true" : "false");
  finish(r);
  return r;
}

CheckReport even_dim_product_vanishing(const HeatTraceModel& left, const HeatTraceModel& right,
                                       double chi_left, double chi_right) {
  CheckReport r;
  r.name = "even_dim_product_vanishing";
  r.tolerance = 1e-8;
  const HeatTraceModel prod = HeatTraceModel::product(left, right, chi_left, chi_right);
  for (double t : {0.1, 1.0, 10.0}) {
    const CScalar v = curly_T(prod, t);
    r.details.push_back({fmt("t", t), v, 0.0});
    r.max_deviation = std::max(r.max_deviation, std::abs(v));
  }
  const RegularizedResult res = torsion(prod);
  r.details.push_back({"T", res.T, 1.0});
  r.max_deviation = std::max(r.max_deviation, std::abs(res.T - 1.0));
  r.evidence.emplace_back("left", left.name());
  r.evidence.emplace_back("right", right.name());
  r.evidence.emplace_back("chi_left", num(chi_left));
  r.evidence.emplace_back("chi_right", num(chi_right));
  finish(r);
  return r;
}

CheckReport product_formula(const HeatTraceModel& left, const HeatTraceModel& right,
                            double chi_left, double chi_right) {
  CheckReport r;
  r.name = "product_formula";
  r.tolerance = 1e-8;
  const HeatTraceModel prod = HeatTraceModel::product(left, right, chi_left, chi_right);
  const CScalar log_prod = torsion(prod).log_T;
  const CScalar log_left = torsion(left).log_T;
  const CScalar log_right = torsion(right).log_T;
  const CScalar expected = chi_right * log_left + chi_left * log_right;
  r.details.push_back({"log_T(product)", log_prod, expected});
  r.max_deviation = std::abs(log_prod - expected);
  r.evidence.emplace_back("chi_left", num(chi_left));
  r.evidence.emplace_back("chi_right", num(chi_right));
  finish(r);
  return r;
}

CheckReport decomposition_check(double R, double theta, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::DomainError, "sigma must be positive");
  const HeatTraceModel circle = HeatTraceModel::circle(R, theta, 0.0);  // validates R, theta
  CheckReport r;
  r.name = "decomposition";
  r.tolerance = 1e-8;
  const double match_tol = 1e-10;

  // Identity class plus the classes n and -n, each contributing 2 log T_n(sigma)
  // of the translation by n on the line.
  const CScalar identity = 2.0 * oracles::line_torsion_sigma(R, theta, 0.0, sigma);
  CScalar nonidentity = 0.0;
  for (long n = 1;; ++n) {
    const double g = static_cast<double>(n);
    const CScalar term = 2.0 * (oracles::line_torsion_sigma(R, theta, g, sigma) +
                                oracles::line_torsion_sigma(R, theta, -g, sigma));
    nonidentity += term;
    // Stop on the magnitude bound; the +-n terms can cancel exactly.
    const double bound = 2.0 * std::exp(-R * g * std::sqrt(sigma)) / g;
    if (bound < 1e-18 * std::max(1.0, std::abs(nonidentity))) break;
    if (n > 100'000'000) fail(ErrorCode::TruncationFailure, "conjugacy sum did not converge");
  }
  // sum_{n>=1} z^n / n = -log(1 - z)
  const double a = R * std::sqrt(sigma);
  const CScalar logs = -std::log(1.0 - std::exp(CScalar(-a, -theta))) -
                       std::log(1.0 - std::exp(CScalar(-a, theta)));
  const double nonid_dev = std::abs(nonidentity - logs);
  r.details.push_back({"nonidentity classes", nonidentity, logs});

  const CScalar total = identity + nonidentity;
  int matches = 0;
  double matched_dev = kInf;
  std::string matched = "none";
  for (auto v : {oracles::SignVariant::Literal, oracles::SignVariant::GammaConsistent}) {
    const CScalar value = oracles::circle_sigma_e(R, theta, sigma, v);
    const double dev = std::abs(total - value);
    r.details.push_back({std::string("variant ") + oracles::variant_name(v), total, value});
    r.evidence.emplace_back(std::string("deviation_") + oracles::variant_name(v), num(dev));
    if (dev <= match_tol) {
      ++matches;
      matched_dev = dev;
      matched = oracles::variant_name(v);
    }
  }

  const CScalar pipeline = 2.0 * torsion_sigma(circle, sigma);
  std::string pipeline_match = "none";
  for (auto v : {oracles::SignVariant::Literal, oracles::SignVariant::GammaConsistent}) {
    if (std::abs(pipeline - oracles::circle_sigma_e(R, theta, sigma, v)) <= r.tolerance) {
      pipeline_match = oracles::variant_name(v);
    }
  }
  r.details.push_back({"pipeline 2 log T(sigma)", pipeline, total});
  const double pipeline_dev = std::abs(pipeline - total);

  r.evidence.emplace_back("identity_term", num(identity.real()));
  r.evidence.emplace_back("nonidentity_deviation", num(nonid_dev));
  r.evidence.emplace_back("matching_variant", matched);
  r.evidence.emplace_back("pipeline_matches", pipeline_match);
  r.evidence.emplace_back("caveat", *oracles::circle_sigma_e_value(R, theta, sigma,
                                                                   oracles::SignVariant::Literal)
                                         .caveat);
  if (matches != 1 || nonid_dev > match_tol) {
    r.max_deviation = kInf;
  } else {
    r.max_deviation = std::max({nonid_dev, matched_dev, pipeline_dev});
  }
  finish(r);
  return r;
}

CheckReport rescale_invariance(const HeatTraceModel& model, const std::vector<double>& c_values) {
  if (c_values.empty()) fail(ErrorCode::InvalidArgument, "rescale check needs c values");
  CheckReport r;
  r.name = "rescale_invariance";
  r.tolerance = 1e-6;
  if (const auto* m = std::get_if<CircleUntwisted>(&model.kind())) {
    // Nonzero kernel: the metric dependence is the negative control.
    r.evidence.emplace_back("mode", "negative_control");
    const CScalar base = torsion(model).log_T;
    for (double c : c_values) {
      const CScalar scaled = torsion(HeatTraceModel::circle_untwisted(c * m->R, m->rep)).log_T;
      const CScalar drift = scaled - base;
      const CScalar expected = -std::log(c);
      r.details.push_back({fmt("c", c), drift, expected});
      r.max_deviation = std::max(r.max_deviation, std::abs(drift - expected));
    }
  } else {
    r.evidence.emplace_back("mode", "invariance");
    const TraceProblem p = problem_for_model(model);
    const CScalar base = torsion(p).minus_two_log_T;
    for (double c : c_values) {
      const CScalar scaled = torsion(rescale_time(p, c)).minus_two_log_T;
      r.details.push_back({fmt("c", c), scaled, base});
      r.max_deviation = std::max(r.max_deviation, std::abs(scaled - base));
    }
  }
  r.evidence.emplace_back("model", model.name());
  finish(r);
  return r;
}

CheckReport split_check(const HeatTraceModel& model, const std::vector<double>& splits) {
  if (splits.empty()) fail(ErrorCode::InvalidArgument, "split check needs split points");
  CheckReport r;
  r.name = "split_invariance";
  r.tolerance = 1e-6;
  const TraceProblem p = problem_for_model(model);
  std::vector<CScalar> v;
  for (double s : splits) v.push_back(torsion(p, s).minus_two_log_T);
  for (std::size_t i = 0; i < v.size(); ++i) {
    r.details.push_back({fmt("split", splits[i]), v[i], v.front()});
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      r.max_deviation = std::max(r.max_deviation, std::abs(v[i] - v[j]));
    }
  }
  r.evidence.emplace_back("model", model.name());
  finish(r);
  return r;
}

}  // namespace torsionlab
