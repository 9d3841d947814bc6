#include "torsionlab/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace torsionlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Far enough that e^{-rate (T - split)} is below double precision.
constexpr double kExpTruncation = 40.0;

void require_split(double split) {
  if (!(split > 0.0) || !std::isfinite(split)) fail(ErrorCode::DomainError, "split must be positive");
}

CScalar extend_by_decay(const DecayHint& decay, CScalar edge_value, double edge, double t) {
  if (const auto* e = std::get_if<ExponentialDecay>(&decay)) {
    return edge_value * std::exp(-e->rate * (t - edge));
  }
  if (const auto* p = std::get_if<PolynomialDecay>(&decay)) {
    return edge_value * std::pow(edge / t, p->alpha);
  }
  fail(ErrorCode::DivergenceSuspected, "sampled trace has no decay law beyond its grid");
}

}  // namespace

TraceProblem problem_for_model(const HeatTraceModel& model) {
  TraceProblem p;
  p.expansion = small_t_expansion(model);
  p.decay = decay_hint(model);
  if (const auto* s = std::get_if<Sampled>(&model.kind())) {
    auto data = s->data;
    p.trace = [model, data](double t) -> CScalar {
      const double lo = data->t_grid.front();
      const double hi = data->t_grid.back();
      if (t < lo) return data->expansion.evaluate(t);
      if (t > hi) return extend_by_decay(data->decay, data->values.back(), hi, t);
      return curly_T(model, t);
    };
  } else {
    p.trace = [model](double t) { return curly_T(model, t); };
  }
  return p;
}

TraceProblem damp(const TraceProblem& p, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorCode::DomainError, "sigma must be positive");
  TraceProblem out;
  out.trace = [f = p.trace, sigma](double t) { return std::exp(-sigma * t) * f(t); };
  out.expansion = damp(p.expansion, sigma);
  out.decay = damp(p.decay, sigma);
  return out;
}

TraceProblem rescale_time(const TraceProblem& p, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::DomainError, "rescale factor must be positive");
  TraceProblem out;
  out.trace = [f = p.trace, c](double t) { return f(c * t); };
  out.expansion = rescale_time(p.expansion, c);
  out.decay = rescale_time(p.decay, c);
  return out;
}

Integral small_t_regularized(const ComplexFn& trace, const AsymptoticExpansion& expansion,
                             double split, const QuadratureSpec& quad) {
  require_split(split);
  expansion.validate();
  Integral out;
  for (const ExpansionTerm& term : expansion.terms) {
    if (term.exponent == 0.0) {
      out.value += term.coeff * (constants::euler_gamma + std::log(split));
    } else {
      out.value += term.coeff * std::pow(split, term.exponent) / term.exponent;
    }
  }
  const auto remainder = [&](double t) -> CScalar {
    const CScalar f = trace(t);
    const CScalar r = f - expansion.evaluate(t);
    // Below this the subtraction is pure cancellation noise.
    if (std::abs(r) <= 64.0 * kEps * (std::abs(f) + expansion.magnitude(t))) return 0.0;
    return r / t;
  };
  try {
    const Integral rem = adaptive_integrate(remainder, 0.0, split, quad);
    out.value += rem.value;
    out.error = rem.error;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonConvergence) throw;
    fail(ErrorCode::ExpansionInsufficient,
         std::string("small-t remainder is not integrable; the expansion is likely missing a term (") +
             e.what() + ")");
  }
  return out;
}

Integral large_t_integral(const ComplexFn& trace, double split, const DecayHint& decay,
                          const QuadratureSpec& quad) {
  require_split(split);
  if (std::holds_alternative<UnknownDecay>(decay)) {
    fail(ErrorCode::DivergenceSuspected, "no decay law, the large-t integral cannot be certified");
  }
  if (const auto* p = std::get_if<PolynomialDecay>(&decay)) {
    if (!(p->alpha > 0.0)) fail(ErrorCode::DivergenceSuspected, "polynomial decay exponent must be positive");
    const double near = std::abs(trace(split * 1e2));
    const double far = std::abs(trace(split * 1e6));
    if (far > 0.0 && far >= near) {
      fail(ErrorCode::DivergenceSuspected, "trace does not decay between 1e2 and 1e6 times the split");
    }
    // t = split u^{-k}, k = 1/alpha: a t^{-alpha} tail becomes a constant in u.
    const double k = 1.0 / p->alpha;
    const auto integrand = [&](double u) -> CScalar {
      const double t = split * std::pow(u, -k);
      if (!std::isfinite(t)) return 0.0;
      return k * trace(t) / u;
    };
    return adaptive_integrate(integrand, 0.0, 1.0, quad);
  }
  const double rate = std::get<ExponentialDecay>(decay).rate;
  if (!(rate > 0.0)) fail(ErrorCode::DivergenceSuspected, "exponential decay rate must be positive");
  const double t_end = split + kExpTruncation / rate;
  const auto integrand = [&](double t) { return trace(t) / t; };
  Integral out;
  for (double a = split; a < t_end;) {
    const double b = std::min(2.0 * a, t_end);
    const Integral piece = adaptive_integrate(integrand, a, b, quad);
    out.value += piece.value;
    out.error += piece.error;
    a = b;
  }
  out.error += std::abs(trace(t_end)) / (rate * t_end);
  return out;
}

RegularizedResult torsion(const TraceProblem& problem, double split, const QuadratureSpec& quad) {
  const Integral small = small_t_regularized(problem.trace, problem.expansion, split, quad);
  const Integral large = large_t_integral(problem.trace, split, problem.decay, quad);
  RegularizedResult r;
  r.split = split;
  r.small_part = small.value;
  r.large_part = large.value;
  r.err_small = small.error;
  r.err_large = large.error;
  r.minus_two_log_T = small.value + large.value;
  r.log_T = -0.5 * r.minus_two_log_T;
  r.T = std::exp(r.log_T);
  return r;
}

RegularizedResult torsion(const HeatTraceModel& model, double split, const QuadratureSpec& quad) {
  return torsion(problem_for_model(model), split, quad);
}

CScalar torsion_sigma(const HeatTraceModel& model, double sigma, double split,
                      const QuadratureSpec& quad) {
  return torsion(damp(problem_for_model(model), sigma), split, quad).log_T;
}

void SigmaOptions::validate() const {
  if (fit_degree < 1) fail(ErrorCode::InvalidArgument, "fit_degree must be at least 1");
  if (u_grid.size() <= static_cast<std::size_t>(fit_degree)) {
    fail(ErrorCode::InvalidArgument, "u_grid must be longer than fit_degree");
  }
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    if (!(u_grid[i] > 0.0) || !std::isfinite(u_grid[i])) fail(ErrorCode::InvalidArgument, "u_grid must be positive");
    if (i > 0 && !(u_grid[i] < u_grid[i - 1])) fail(ErrorCode::InvalidArgument, "u_grid must be decreasing");
  }
}

CScalar sigma_extrapolate(const HeatTraceModel& model, const SigmaOptions& opts, double split,
                          const QuadratureSpec& quad) {
  opts.validate();
  const TraceProblem base = problem_for_model(model);
  std::vector<CScalar> values;
  for (double u : opts.u_grid) values.push_back(torsion(damp(base, u * u), split, quad).log_T);
  return extrapolate_to_zero(opts.u_grid, values, opts.fit_degree);
}

double split_invariance(const HeatTraceModel& model, const std::vector<double>& splits,
                        const QuadratureSpec& quad) {
  if (splits.empty()) fail(ErrorCode::InvalidArgument, "no split points given");
  const TraceProblem p = problem_for_model(model);
  std::vector<CScalar> v;
  for (double s : splits) v.push_back(torsion(p, s, quad).minus_two_log_T);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) worst = std::max(worst, std::abs(v[i] - v[j]));
  return worst;
}

}  // namespace torsionlab
