#pragma once

#include <vector>

#include "torsionlab/heat_models.hpp"

namespace torsionlab {

/// A trace function together with the data the regularization needs.
struct TraceProblem {
  ComplexFn trace;
  AsymptoticExpansion expansion;
  DecayHint decay = UnknownDecay{};
};

/// The problem for a model. Sampled traces are extended below their grid by
/// their expansion and above it by their decay law.
TraceProblem problem_for_model(const HeatTraceModel& model);

/// t -> e^{-sigma t} trace(t).
TraceProblem damp(const TraceProblem& p, double sigma);
/// t -> trace(c t).
TraceProblem rescale_time(const TraceProblem& p, double c);

struct RegularizedResult {
  CScalar small_part;
  CScalar large_part;
  CScalar minus_two_log_T;
  CScalar log_T;
  CScalar T;
  double err_small = 0.0;
  double err_large = 0.0;
  double split = 1.0;
};

/// d/ds at s = 0 of (1/Gamma(s)) int_0^split t^{s-1} trace(t) dt.
Integral small_t_regularized(const ComplexFn& trace, const AsymptoticExpansion& expansion,
                             double split, const QuadratureSpec& quad = {});

/// int_split^inf t^{-1} trace(t) dt.
Integral large_t_integral(const ComplexFn& trace, double split, const DecayHint& decay,
                          const QuadratureSpec& quad = {});

RegularizedResult torsion(const TraceProblem& problem, double split = 1.0,
                          const QuadratureSpec& quad = {});
RegularizedResult torsion(const HeatTraceModel& model, double split = 1.0,
                          const QuadratureSpec& quad = {});

/// log T(sigma).
CScalar torsion_sigma(const HeatTraceModel& model, double sigma, double split = 1.0,
                      const QuadratureSpec& quad = {});

struct SigmaOptions {
  std::vector<double> u_grid = {0.4, 0.2, 0.1, 0.05};
  int fit_degree = 3;

  void validate() const;
};

/// log T from a polynomial fit in u = sqrt(sigma), evaluated at u = 0.
CScalar sigma_extrapolate(const HeatTraceModel& model, const SigmaOptions& opts = {},
                          double split = 1.0, const QuadratureSpec& quad = {});

/// Largest pairwise difference of -2 log T over the given split points.
double split_invariance(const HeatTraceModel& model, const std::vector<double>& splits,
                        const QuadratureSpec& quad = {});

}  // namespace torsionlab
