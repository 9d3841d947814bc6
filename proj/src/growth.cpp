#include "torsionlab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace torsionlab {

namespace {

constexpr double kF3RelTol = 1e-12;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::DomainError, std::string(what) + " must be positive");
}

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::FitIllConditioned, "fit abscissae are all equal");
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    ss += r * r;
  }
  l.rms = std::sqrt(ss / n);
  return l;
}

}  // namespace

double GrowthModel::operator()(long j) const {
  const double x = static_cast<double>(j);
  return kind == Kind::Polynomial ? scale * std::pow(x, b) : scale * std::exp(b * x);
}

void GrowthHistogram::validate() const {
  for (double v : bins) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidArgument, "histogram bins must be nonnegative");
  }
  if (analytic_model) {
    if (!std::isfinite(analytic_model->b) || !(analytic_model->scale >= 0.0)) {
      fail(ErrorCode::InvalidArgument, "growth model needs finite b and nonnegative scale");
    }
    if (analytic_model->kind == GrowthModel::Kind::Polynomial && analytic_model->b < 0.0) {
      fail(ErrorCode::InvalidArgument, "polynomial growth exponent must be nonnegative");
    }
  }
}

double f3(const GrowthHistogram& hist, double a, double t, long max_terms) {
  require_positive(a, "a");
  require_positive(t, "t");
  hist.validate();
  const long n_bins = static_cast<long>(hist.bins.size());
  const auto term = [&](long j) -> std::optional<double> {
    const double x = static_cast<double>(j);
    const double gauss = -a * x * x / t;
    if (j < n_bins) return hist.bins[j] * std::exp(gauss);
    if (!hist.analytic_model) return std::nullopt;
    const GrowthModel& m = *hist.analytic_model;
    if (m.scale == 0.0) return 0.0;
    // Combine in logs: e^{b j} alone overflows long before the Gaussian wins.
    double log_f2;
    if (m.kind == GrowthModel::Kind::Exponential) {
      log_f2 = m.b * x;
    } else if (j == 0) {
      return (m.b == 0.0 ? m.scale : 0.0) * std::exp(gauss);
    } else {
      log_f2 = m.b * std::log(x);
    }
    return m.scale * std::exp(log_f2 + gauss);
  };
  // Terms are log-concave in j, so once the ratio of successive terms drops
  // below 1 the rest of the sum is bounded by a geometric series.
  double sum = 0.0;
  for (long j = 0; j < max_terms; ++j) {
    const auto w = term(j);
    if (!w) fail(ErrorCode::TailUnbounded, "histogram exhausted before the F3 sum converged");
    sum += *w;
    const auto w1 = term(j + 1);
    const auto w2 = term(j + 2);
    if (!w1 || !w2) continue;
    if (*w1 == 0.0) {
      // Past the bins a zero model term stays zero (zero scale or underflow past the peak).
      if (*w2 == 0.0 && hist.analytic_model && j + 1 >= n_bins) return sum;
      continue;
    }
    const double r = *w2 / *w1;
    if (r < 1.0 && *w1 / (1.0 - r) <= kF3RelTol * sum) return sum;
  }
  fail(ErrorCode::TruncationFailure, "F3 sum exceeded its term budget");
}

GrowthBound default_bound(const GrowthModel& model, double a) {
  require_positive(a, "a");
  if (model.kind == GrowthModel::Kind::Polynomial) return {(model.b + 1.0) / 2.0, 0.0};
  return {0.5, model.b * model.b / (4.0 * a)};
}

BoundCheck f3_bound_check(const GrowthModel& model, double a, const std::vector<double>& t_grid,
                          std::optional<GrowthBound> bound) {
  if (t_grid.size() < 3) fail(ErrorCode::InvalidArgument, "bound check needs at least three t values");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    require_positive(t_grid[i], "t");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) fail(ErrorCode::InvalidArgument, "t grid must be increasing");
  }
  const GrowthBound c = bound ? *bound : default_bound(model, a);
  const GrowthHistogram hist{{}, model};
  std::vector<double> log_t, log_ratio;
  BoundCheck out;
  for (double t : t_grid) {
    // Work in logs so e^{rate t} cannot overflow.
    const double value = f3(hist, a, t);
    const double lr = std::log(value) - c.power * std::log(t) - c.rate * t;
    log_t.push_back(std::log(t));
    log_ratio.push_back(lr);
    out.sup_ratio = std::max(out.sup_ratio, std::exp(lr));
  }
  const std::size_t half = t_grid.size() / 2;
  const std::vector<double> xs(log_t.begin() + static_cast<long>(half), log_t.end());
  const std::vector<double> ys(log_ratio.begin() + static_cast<long>(half), log_ratio.end());
  out.tail_slope = xs.size() >= 2 ? least_squares(xs, ys).slope : 0.0;
  out.pass = std::isfinite(out.sup_ratio) && out.sup_ratio > 0.0 && out.tail_slope <= kBoundSlopeThreshold;
  return out;
}

DecayFit ns_fit(const std::vector<std::pair<double, double>>& samples) {
  if (std::all_of(samples.begin(), samples.end(), [](const auto& s) { return !(s.second >= 1e-300); })) {
    fail(ErrorCode::Degenerate, "all trace samples are below 1e-300");
  }
  if (samples.size() < 8) fail(ErrorCode::InvalidArgument, "decay fit needs at least 8 samples");
  double lo = kInf, hi = 0.0;
  std::vector<double> t, log_t, log_v;
  for (const auto& [ti, vi] : samples) {
    require_positive(ti, "t");
    if (!(vi > 0.0) || !std::isfinite(vi)) fail(ErrorCode::InvalidArgument, "trace magnitudes must be positive");
    lo = std::min(lo, ti);
    hi = std::max(hi, ti);
    t.push_back(ti);
    log_t.push_back(std::log(ti));
    log_v.push_back(std::log(vi));
  }
  if (hi < 100.0 * lo) fail(ErrorCode::InvalidArgument, "decay fit samples must span two decades");
  const Line poly = least_squares(log_t, log_v);
  const Line expo = least_squares(t, log_v);
  DecayFit fit;
  fit.window = {lo, hi};
  fit.residual_polynomial = poly.rms;
  fit.residual_exponential = expo.rms;
  if (expo.rms < 0.95 * poly.rms) {
    fit.kind = ExponentialDecay{-expo.slope};
    fit.residual = expo.rms;
  } else {
    fit.kind = PolynomialDecay{-poly.slope};
    fit.residual = poly.rms;
  }
  return fit;
}

DecayFit ns_fit_model(const HeatTraceModel& model, double t_lo, double t_hi, int n) {
  require_positive(t_lo, "t_lo");
  if (!(t_hi > t_lo)) fail(ErrorCode::InvalidArgument, "t_hi must exceed t_lo");
  if (n < 2) fail(ErrorCode::InvalidArgument, "need at least two sample points");
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < n; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n - 1));
    samples.emplace_back(t, std::abs(curly_T(model, t)));
  }
  return ns_fit(samples);
}

MetricCondition metric_condition(const DecayFit& f1, const GrowthModel& f3_model, double a) {
  require_positive(a, "a");
  const GrowthBound bound = default_bound(f3_model, a);
  MetricCondition out;
  if (const auto* p = std::get_if<PolynomialDecay>(&f1.kind)) {
    if (bound.rate > 0.0) {
      out.alpha = -kInf;
    } else {
      out.alpha = p->alpha - bound.power;
    }
  } else if (const auto* e = std::get_if<ExponentialDecay>(&f1.kind)) {
    const double net_rate = e->rate - bound.rate;
    if (net_rate > 0.0) {
      out.alpha = kInf;
    } else if (net_rate < 0.0) {
      out.alpha = -kInf;
    } else {
      out.alpha = -bound.power;
    }
  } else {
    fail(ErrorCode::InvalidArgument, "F1 decay has not been fitted");
  }
  out.holds = out.alpha > 0.0;
  return out;
}

std::vector<double> read_histogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::vector<double> bins;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line, &used);
      if (line.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("trailing");
      bins.push_back(v);
      header_allowed = false;
    } catch (const std::exception&) {
      if (!header_allowed) fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": not a number");
      header_allowed = false;
    }
  }
  return bins;
}

}  // namespace torsionlab
