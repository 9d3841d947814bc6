#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "torsionlab/heat_models.hpp"

namespace torsionlab {

/// Analytic shell-volume law: scale * j^b (Polynomial) or scale * e^{b j} (Exponential).
struct GrowthModel {
  enum class Kind { Polynomial, Exponential };
  Kind kind = Kind::Polynomial;
  double b = 0.0;
  double scale = 1.0;

  double operator()(long j) const;
};

/// F2(0), F2(1), ... with an optional law for the shells beyond the last bin.
struct GrowthHistogram {
  std::vector<double> bins;
  std::optional<GrowthModel> analytic_model;

  void validate() const;
};

inline constexpr long kDefaultF3TermBudget = 10'000'000;

/// F3(t) = sum_j F2(j) e^{-a j^2 / t}.
double f3(const GrowthHistogram& hist, double a, double t, long max_terms = kDefaultF3TermBudget);

/// Comparison function c(t) = t^power e^{rate t}.
struct GrowthBound {
  double power = 0.0;
  double rate = 0.0;
};

/// t^{(b+1)/2} for Polynomial{b}, t^{1/2} e^{b^2 t / 4a} for Exponential{b}.
GrowthBound default_bound(const GrowthModel& model, double a);

struct BoundCheck {
  double sup_ratio = 0.0;
  /// d log(ratio) / d log t over the upper half of the grid.
  double tail_slope = 0.0;
  bool pass = false;
};

/// Upward-trend threshold on the tail log-log slope of f3 / bound.
inline constexpr double kBoundSlopeThreshold = 0.05;

BoundCheck f3_bound_check(const GrowthModel& model, double a, const std::vector<double>& t_grid,
                          std::optional<GrowthBound> bound = std::nullopt);

struct DecayFit {
  DecayHint kind = UnknownDecay{};
  double residual = 0.0;
  double residual_polynomial = 0.0;
  double residual_exponential = 0.0;
  std::pair<double, double> window{0.0, 0.0};
};

/// Least-squares fit of log|T| against log t and against t. The exponential law
/// has to beat the polynomial one by 5% to be chosen.
DecayFit ns_fit(const std::vector<std::pair<double, double>>& samples);

/// |curly_T| sampled at n log-spaced points of [t_lo, t_hi], then ns_fit.
DecayFit ns_fit_model(const HeatTraceModel& model, double t_lo, double t_hi, int n);

struct MetricCondition {
  /// Net power: F1 F3 = O(t^{-alpha}). +-infinity when an exponential wins.
  double alpha = 0.0;
  bool holds = false;
};

MetricCondition metric_condition(const DecayFit& f1, const GrowthModel& f3_model, double a);

/// Single-column CSV of F2 values; blank lines and '#' comments skipped.
std::vector<double> read_histogram_csv(const std::string& path);

}  // namespace torsionlab
