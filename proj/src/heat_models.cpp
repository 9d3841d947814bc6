#include "torsionlab/heat_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "torsionlab/bismut.hpp"

namespace torsionlab {

namespace {

using std::numbers::pi;

constexpr double kSeriesTol = 1e-16;
constexpr long kMaxSeriesTerms = 1'000'000;

bool in_2pi_z(double v) { return std::abs(std::remainder(v, 2.0 * pi)) < 1e-12; }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::DomainError, std::string(what) + " must be positive");
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::DomainError, std::string(what) + " must be finite");
}

void require_t(double t) {
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "t must be positive");
}

// Sum of term(n) over n in Z where |term(n)| <= scale * exp(-width (n - center)^2),
// walking outward from the center until the Gaussian bound is negligible.
template <typename Term>
CScalar gaussian_lattice_sum(double center, double scale, double width, Term term) {
  const long n0 = std::lround(center);
  CScalar sum = term(n0);
  long count = 1;
  for (int dir : {1, -1}) {
    for (long k = 1;; ++k) {
      const long n = n0 + dir * k;
      const double d = static_cast<double>(n) - center;
      sum += term(n);
      ++count;
      const double bound = scale * std::exp(-width * d * d);
      if (dir * d > 0.0 && bound < kSeriesTol * std::max(1.0, std::abs(sum))) break;
      if (count > kMaxSeriesTerms) {
        fail(ErrorCode::TruncationFailure, "lattice sum exceeded the term budget");
      }
    }
  }
  return sum;
}

double principal_angle(double theta) { return std::remainder(theta, 2.0 * pi); }

void fritsch_carlson(const std::vector<double>& t, const std::vector<double>& y, std::vector<double>& m) {
  const std::size_t n = t.size();
  m.assign(n, 0.0);
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / d[i];
    const double b = m[i + 1] / d[i];
    if (a < 0.0) m[i] = 0.0;
    if (b < 0.0) m[i + 1] = 0.0;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m[i] = tau * a * d[i];
      m[i + 1] = tau * b * d[i];
    }
  }
}

CScalar interpolate(const SampledData& s, double t) {
  const auto& grid = s.t_grid;
  if (t < grid.front() || t > grid.back()) {
    fail(ErrorCode::DomainError, "sampled trace queried outside its t grid");
  }
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (it != grid.end() && *it == t) return s.values[i];
  i -= 1;
  const double h = grid[i + 1] - grid[i];
  const double u = (t - grid[i]) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  const double re = h00 * s.values[i].real() + h10 * h * s.slope_re[i] +
                    h01 * s.values[i + 1].real() + h11 * h * s.slope_re[i + 1];
  const double im = h00 * s.values[i].imag() + h10 * h * s.slope_im[i] +
                    h01 * s.values[i + 1].imag() + h11 * h * s.slope_im[i + 1];
  return {re, im};
}

// Shared by both degrees of the one-dimensional models.
CScalar one_dim_trace(const HeatTraceModel& model, double t) {
  require_t(t);
  if (const auto* m = std::get_if<RealLine>(&model.kind())) {
    return m->R / std::sqrt(4.0 * pi * t) *
           std::exp(CScalar(-m->R * m->R * m->g * m->g / (4.0 * t), -m->theta * m->g));
  }
  if (const auto* m = std::get_if<Circle>(&model.kind())) {
    const bool images = m->rep == CircleRep::Images ||
                        (m->rep == CircleRep::Auto && t < circle_crossover(m->R));
    return images ? circle_trace_images(m->R, m->theta, m->rot, t)
                    : circle_trace_spectral(m->R, m->theta, m->rot, t);
  }
  if (const auto* m = std::get_if<CircleUntwisted>(&model.kind())) {
    const bool images = m->rep == CircleRep::Images ||
                        (m->rep == CircleRep::Auto && t < circle_crossover(m->R));
    return images ? circle_untwisted_trace_images(m->R, t)
                    : circle_untwisted_trace_spectral(m->R, t);
  }
  fail(ErrorCode::Unsupported, "per-degree traces exist only for one-dimensional models");
}

}  // namespace

HeatTraceModel HeatTraceModel::real_line(double R, double theta, double g) {
  require_positive(R, "R");
  require_finite(theta, "theta");
  require_finite(g, "g");
  return HeatTraceModel(RealLine{R, theta, g});
}

HeatTraceModel HeatTraceModel::circle(double R, double theta, double rot, CircleRep rep) {
  require_positive(R, "R");
  require_finite(theta, "theta");
  if (in_2pi_z(theta)) {
    fail(ErrorCode::DomainError, "theta in 2 pi Z has a nonzero kernel; use circle_untwisted");
  }
  if (!(rot >= 0.0 && rot < 1.0)) fail(ErrorCode::DomainError, "rot must lie in [0, 1)");
  return HeatTraceModel(Circle{R, theta, rot, rep});
}

HeatTraceModel HeatTraceModel::circle_untwisted(double R, CircleRep rep) {
  require_positive(R, "R");
  return HeatTraceModel(CircleUntwisted{R, rep});
}

HeatTraceModel HeatTraceModel::hyperbolic3(double x, H3Mode mode) {
  require_finite(x, "x");
  if (in_2pi_z(x)) fail(ErrorCode::DomainError, "x must not be a multiple of 2 pi (g must be regular)");
  return HeatTraceModel(Hyperbolic3{x, mode});
}

HeatTraceModel HeatTraceModel::product(const HeatTraceModel& left, const HeatTraceModel& right,
                                       double chi_left, double chi_right) {
  require_finite(chi_left, "chi_left");
  require_finite(chi_right, "chi_right");
  return HeatTraceModel(Product{std::make_shared<const HeatTraceModel>(left),
                                std::make_shared<const HeatTraceModel>(right), chi_left, chi_right});
}

HeatTraceModel HeatTraceModel::sampled(std::vector<double> t_grid, std::vector<CScalar> values,
                                       AsymptoticExpansion expansion, DecayHint decay) {
  if (t_grid.size() != values.size()) fail(ErrorCode::InvalidArgument, "t grid and values differ in length");
  if (t_grid.size() < 2) fail(ErrorCode::InvalidArgument, "a sampled trace needs at least two points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i])) fail(ErrorCode::InvalidArgument, "t grid must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      fail(ErrorCode::InvalidArgument, "t grid must be strictly increasing");
    }
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      fail(ErrorCode::InvalidArgument, "sampled values must be finite");
    }
  }
  expansion.validate();
  validate(decay);
  auto data = std::make_shared<SampledData>();
  data->t_grid = std::move(t_grid);
  data->values = std::move(values);
  data->expansion = std::move(expansion);
  data->decay = decay;
  std::vector<double> re(data->values.size()), im(data->values.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] = data->values[i].real();
    im[i] = data->values[i].imag();
  }
  fritsch_carlson(data->t_grid, re, data->slope_re);
  fritsch_carlson(data->t_grid, im, data->slope_im);
  return HeatTraceModel(Sampled{std::move(data)});
}

bool HeatTraceModel::is_one_dimensional() const noexcept {
  return std::holds_alternative<RealLine>(kind_) || std::holds_alternative<Circle>(kind_) ||
         std::holds_alternative<CircleUntwisted>(kind_);
}

std::string HeatTraceModel::name() const {
  struct Visitor {
    std::string operator()(const RealLine&) const { return "real-line"; }
    std::string operator()(const Circle&) const { return "circle"; }
    std::string operator()(const CircleUntwisted&) const { return "circle-untwisted"; }
    std::string operator()(const Hyperbolic3&) const { return "hyperbolic3"; }
    std::string operator()(const Product&) const { return "product"; }
    std::string operator()(const Sampled&) const { return "sampled"; }
  };
  return std::visit(Visitor{}, kind_);
}

CScalar circle_trace_images(double R, double theta, double rot, double t) {
  require_t(t);
  const double pref = R / std::sqrt(4.0 * pi * t);
  const double width = R * R / (4.0 * t);
  const CScalar sum = gaussian_lattice_sum(rot, pref, width, [&](long n) {
    const double d = static_cast<double>(n) - rot;
    return std::exp(CScalar(-width * d * d, -theta * d));
  });
  return pref * sum;
}

CScalar circle_trace_spectral(double R, double theta, double rot, double t) {
  require_t(t);
  // exp(-t (2 pi n + theta)^2 / R^2) = exp(-(4 pi^2 t / R^2) (n + theta / 2 pi)^2)
  const double width = 4.0 * pi * pi * t / (R * R);
  const double center = -theta / (2.0 * pi);
  return gaussian_lattice_sum(center, 1.0, width, [&](long n) {
    const double d = static_cast<double>(n) - center;
    return std::exp(CScalar(-width * d * d, -2.0 * pi * static_cast<double>(n) * rot));
  });
}

CScalar circle_untwisted_trace_images(double R, double t) {
  // sum_{n != 0} e^{-t (2 pi n / R)^2} = (R / sqrt(4 pi t)) sum_m e^{-R^2 m^2 / 4t} - 1
  return circle_trace_images(R, 0.0, 0.0, t) - 1.0;
}

CScalar circle_untwisted_trace_spectral(double R, double t) {
  require_t(t);
  const double width = 4.0 * pi * pi * t / (R * R);
  return gaussian_lattice_sum(0.0, 1.0, width, [&](long n) -> CScalar {
    if (n == 0) return 0.0;
    const double d = static_cast<double>(n);
    return std::exp(-width * d * d);
  });
}

CScalar curly_T(const HeatTraceModel& model, double t) {
  require_t(t);
  struct Visitor {
    const HeatTraceModel& model;
    double t;
    CScalar operator()(const RealLine&) const { return -one_dim_trace(model, t); }
    CScalar operator()(const Circle&) const { return -one_dim_trace(model, t); }
    CScalar operator()(const CircleUntwisted&) const { return -one_dim_trace(model, t); }
    CScalar operator()(const Hyperbolic3& m) const {
      if (m.mode == H3Mode::BismutQuadrature) return bismut::bismut_trace(m.x, t);
      const double s = std::sin(0.5 * m.x);
      return (std::cos(m.x) - std::exp(-t / 2.0)) / (4.0 * std::sqrt(2.0 * pi * t) * s * s);
    }
    CScalar operator()(const Product& m) const {
      CScalar out = 0.0;
      if (m.chi_right != 0.0) out += curly_T(*m.left, t) * m.chi_right;
      if (m.chi_left != 0.0) out += curly_T(*m.right, t) * m.chi_left;
      return out;
    }
    CScalar operator()(const Sampled& m) const { return interpolate(*m.data, t); }
  };
  return std::visit(Visitor{model, t}, model.kind());
}

CScalar heat_trace_p(const HeatTraceModel& model, int p, double t) {
  if (p != 0 && p != 1) fail(ErrorCode::DomainError, "degree must be 0 or 1");
  if (!model.is_one_dimensional()) {
    fail(ErrorCode::Unsupported, "per-degree traces exist only for one-dimensional models");
  }
  return one_dim_trace(model, t);
}

AsymptoticExpansion small_t_expansion(const HeatTraceModel& model) {
  struct Visitor {
    AsymptoticExpansion operator()(const RealLine& m) const {
      AsymptoticExpansion e{{}, kExponentiallySmallOrder};
      if (m.g == 0.0) e.terms.push_back({-0.5, -m.R / std::sqrt(4.0 * pi)});
      return e;
    }
    AsymptoticExpansion operator()(const Circle& m) const {
      AsymptoticExpansion e{{}, kExponentiallySmallOrder};
      if (m.rot == 0.0) e.terms.push_back({-0.5, -m.R / std::sqrt(4.0 * pi)});
      return e;
    }
    AsymptoticExpansion operator()(const CircleUntwisted& m) const {
      return {{{-0.5, -m.R / std::sqrt(4.0 * pi)}, {0.0, 1.0}}, kExponentiallySmallOrder};
    }
    AsymptoticExpansion operator()(const Hyperbolic3& m) const {
      // (cos x - e^{-t/2}) / (c sqrt t) with c = 4 sqrt(2 pi) sin^2(x/2)
      const double s = std::sin(0.5 * m.x);
      const double c = 4.0 * std::sqrt(2.0 * pi) * s * s;
      AsymptoticExpansion e{{}, 5.0};
      e.terms.push_back({-0.5, (std::cos(m.x) - 1.0) / c});
      double taylor = 1.0;  // (-1/2)^k / k!
      for (int k = 1; k <= 5; ++k) {
        taylor *= -0.5 / k;
        e.terms.push_back({k - 0.5, -taylor / c});
      }
      return e;
    }
    AsymptoticExpansion operator()(const Product& m) const {
      return combine(small_t_expansion(*m.left), m.chi_right, small_t_expansion(*m.right), m.chi_left);
    }
    AsymptoticExpansion operator()(const Sampled& m) const { return m.data->expansion; }
  };
  return std::visit(Visitor{}, model.kind());
}

DecayHint decay_hint(const HeatTraceModel& model) {
  struct Visitor {
    DecayHint operator()(const RealLine&) const { return PolynomialDecay{0.5}; }
    DecayHint operator()(const Circle& m) const {
      const double th = principal_angle(m.theta);
      return ExponentialDecay{th * th / (m.R * m.R)};
    }
    DecayHint operator()(const CircleUntwisted& m) const {
      return ExponentialDecay{4.0 * pi * pi / (m.R * m.R)};
    }
    DecayHint operator()(const Hyperbolic3&) const { return PolynomialDecay{0.5}; }
    DecayHint operator()(const Product& m) const {
      if (m.chi_right == 0.0 && m.chi_left == 0.0) return ExponentialDecay{1.0};  // trace is 0
      if (m.chi_right == 0.0) return decay_hint(*m.right);
      if (m.chi_left == 0.0) return decay_hint(*m.left);
      return slower(decay_hint(*m.left), decay_hint(*m.right));
    }
    DecayHint operator()(const Sampled& m) const { return m.data->decay; }
  };
  return std::visit(Visitor{}, model.kind());
}

CScalar alternating_trace(const HeatTraceModel& model, double t) {
  require_t(t);
  struct Visitor {
    const HeatTraceModel& model;
    double t;
    CScalar operator()(const RealLine&) const { return one_dim(); }
    CScalar operator()(const Circle&) const { return one_dim(); }
    CScalar operator()(const CircleUntwisted&) const { return one_dim(); }
    CScalar operator()(const Hyperbolic3& m) const { return bismut::alternating_trace(m.x, t); }
    // The product's chi values are declared by the caller, not derived.
    CScalar operator()(const Product& m) const { return m.chi_left * m.chi_right; }
    CScalar operator()(const Sampled&) const {
      fail(ErrorCode::Unsupported, "sampled models carry only the weighted trace");
    }
    CScalar one_dim() const { return heat_trace_p(model, 0, t) - heat_trace_p(model, 1, t); }
  };
  return std::visit(Visitor{model, t}, model.kind());
}

double chi_g(const HeatTraceModel& model) {
  if (const auto* m = std::get_if<Product>(&model.kind())) return m->chi_left * m->chi_right;
  return alternating_trace(model, 1.0).real();
}

TraceSamples read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  TraceSamples out;
  std::string line;
  bool first_data_line = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    std::vector<double> nums;
    bool numeric = true;
    for (const std::string& c : cols) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(c, &used));
        if (c.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first_data_line) {
        first_data_line = false;
        continue;  // header
      }
      fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    first_data_line = false;
    if (nums.size() < 2 || nums.size() > 3) {
      fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": expected 2 or 3 columns");
    }
    out.t.push_back(nums[0]);
    out.values.emplace_back(nums[1], nums.size() == 3 ? nums[2] : 0.0);
  }
  return out;
}

}  // namespace torsionlab
