#include "torsionlab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace torsionlab {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TruncationFailure: return "TruncationFailure";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ExpansionInsufficient: return "ExpansionInsufficient";
    case ErrorCode::DivergenceSuspected: return "DivergenceSuspected";
    case ErrorCode::FitIllConditioned: return "FitIllConditioned";
    case ErrorCode::TailUnbounded: return "TailUnbounded";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) fail(ErrorCode::InvalidArgument, "rel_tol must be positive");
  if (!(abs_tol >= 0.0)) fail(ErrorCode::InvalidArgument, "abs_tol must be nonnegative");
  if (max_subdivisions < 1) fail(ErrorCode::InvalidArgument, "max_subdivisions must be at least 1");
}

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208067491063, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights belong to the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a = 0.0;
  double b = 0.0;
  CScalar value;
  double error = 0.0;
  bool splittable = true;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const ComplexFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<CScalar, 21> fv;
  fv[10] = f(center);
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kKronrodNodes[i];
    fv[i] = f(center - dx);
    fv[20 - i] = f(center + dx);
  }

  CScalar kronrod = kKronrodWeights[10] * fv[10];
  CScalar gauss = 0.0;
  double abs_sum = kKronrodWeights[10] * std::abs(fv[10]);
  for (int i = 0; i < 10; ++i) {
    const CScalar pair = fv[i] + fv[20 - i];
    kronrod += kKronrodWeights[i] * pair;
    abs_sum += kKronrodWeights[i] * (std::abs(fv[i]) + std::abs(fv[20 - i]));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  const CScalar mean = kronrod * 0.5;
  double asc = kKronrodWeights[10] * std::abs(fv[10] - mean);
  for (int i = 0; i < 10; ++i) {
    asc += kKronrodWeights[i] * (std::abs(fv[i] - mean) + std::abs(fv[20 - i] - mean));
  }

  Segment seg;
  seg.a = a;
  seg.b = b;
  seg.value = kronrod * half;
  const double width = std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  const double resasc = asc * width;
  const double resabs = abs_sum * width;
  if (resasc > 0.0 && err > 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  seg.error = std::max(err, roundoff);

  for (const CScalar& v : fv) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      fail(ErrorCode::NonConvergence,
           "integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
  }
  const double min_width = 64.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(a), std::abs(b));
  seg.splittable = (b - a) > std::max(min_width, std::numeric_limits<double>::min());
  return seg;
}

}  // namespace

Integral adaptive_integrate(const ComplexFn& f, double lo, double hi,
                            const QuadratureSpec& spec) {
  spec.validate();
  if (!(lo < hi) || std::isnan(lo) || std::isnan(hi) || std::isinf(lo)) {
    fail(ErrorCode::DomainError, "adaptive_integrate requires finite lo < hi");
  }

  ComplexFn mapped;
  double a = lo;
  double b = hi;
  if (std::isinf(hi)) {
    mapped = [&f, lo](double u) -> CScalar {
      const double one_minus = 1.0 - u;
      const double t = lo + u / one_minus;
      if (!std::isfinite(t)) return 0.0;
      return f(t) / (one_minus * one_minus);
    };
    a = 0.0;
    b = 1.0;
  }
  const ComplexFn& g = std::isinf(hi) ? mapped : f;

  std::priority_queue<Segment> heap;
  heap.push(gauss_kronrod(g, a, b));
  CScalar total = heap.top().value;
  double total_err = heap.top().error;
  int subdivisions = 0;
  std::vector<Segment> frozen;

  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (total_err > target()) {
    if (heap.empty()) {
      fail(ErrorCode::NonConvergence,
           "quadrature stalled at roundoff level; error estimate " + std::to_string(total_err));
    }
    if (subdivisions >= spec.max_subdivisions) {
      fail(ErrorCode::NonConvergence,
           "subdivision budget exhausted; error estimate " + std::to_string(total_err));
    }
    Segment worst = heap.top();
    heap.pop();
    if (!worst.splittable) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gauss_kronrod(g, worst.a, mid);
    Segment right = gauss_kronrod(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum in a fixed order so results do not depend on heap round-off drift.
  std::vector<Segment> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
  Integral out;
  for (const Segment& s : all) {
    out.value += s.value;
    out.error += s.error;
  }
  return out;
}

double int_exp_closed(double a, double b) {
  if (!(a > 0.0)) fail(ErrorCode::DomainError, "int_exp_closed requires a > 0");
  if (!(b >= 0.0)) fail(ErrorCode::DomainError, "int_exp_closed requires b >= 0");
  return std::sqrt(std::numbers::pi / a) * std::exp(-2.0 * std::sqrt(a * b));
}

double gamma_minus_half() {
  // Gamma(1/2) from lgamma, then one step of Gamma(s) = Gamma(s + 1) / s.
  const double gamma_half = std::exp(std::lgamma(0.5));
  return gamma_half / -0.5;
}

double gamma_quotient_derivative() { return gamma_minus_half(); }

double exp_integral_e1(double x) {
  if (!(x > 0.0)) fail(ErrorCode::DomainError, "E1 requires x > 0");
  return -std::expint(-x);
}

}  // namespace torsionlab

namespace torsionlab {

CScalar extrapolate_to_zero(std::span<const double> u, std::span<const CScalar> values,
                            int degree) {
  const std::size_t rows = u.size();
  const std::size_t cols = static_cast<std::size_t>(degree) + 1;
  if (degree < 0 || values.size() != rows || rows < cols) {
    fail(ErrorCode::InvalidArgument, "polynomial fit needs more samples than the degree");
  }
  // Householder QR of the Vandermonde matrix, applied to both right-hand sides.
  std::vector<double> a(rows * cols);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * cols + c]; };
  for (std::size_t r = 0; r < rows; ++r) {
    double p = 1.0;
    for (std::size_t c = 0; c < cols; ++c) {
      at(r, c) = p;
      p *= u[r];
    }
  }
  std::vector<double> re(rows), im(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    re[r] = values[r].real();
    im[r] = values[r].imag();
  }
  double max_diag = 0.0;
  std::vector<double> diag(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    double norm = 0.0;
    for (std::size_t r = k; r < rows; ++r) norm += at(r, k) * at(r, k);
    norm = std::sqrt(norm);
    const double alpha = at(k, k) > 0 ? -norm : norm;
    std::vector<double> v(rows, 0.0);
    for (std::size_t r = k; r < rows; ++r) v[r] = at(r, k);
    v[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t r = k; r < rows; ++r) vnorm2 += v[r] * v[r];
    if (vnorm2 > 0.0) {
      auto reflect = [&](auto&& column_get) {
        double dot = 0.0;
        for (std::size_t r = k; r < rows; ++r) dot += v[r] * column_get(r);
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t r = k; r < rows; ++r) column_get(r) -= f * v[r];
      };
      for (std::size_t c = k; c < cols; ++c) reflect([&](std::size_t r) -> double& { return at(r, c); });
      reflect([&](std::size_t r) -> double& { return re[r]; });
      reflect([&](std::size_t r) -> double& { return im[r]; });
    }
    diag[k] = std::abs(at(k, k));
    max_diag = std::max(max_diag, diag[k]);
  }
  for (std::size_t k = 0; k < cols; ++k) {
    if (!(diag[k] > 1e-13 * max_diag)) {
      fail(ErrorCode::FitIllConditioned, "Vandermonde system is singular at working precision");
    }
  }
  std::vector<double> cre(cols), cim(cols);
  for (std::size_t k = cols; k-- > 0;) {
    double sr = re[k], si = im[k];
    for (std::size_t c = k + 1; c < cols; ++c) {
      sr -= at(k, c) * cre[c];
      si -= at(k, c) * cim[c];
    }
    cre[k] = sr / at(k, k);
    cim[k] = si / at(k, k);
  }
  return {cre[0], cim[0]};
}

}  // namespace torsionlab
