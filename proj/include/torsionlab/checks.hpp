#pragma once

#include <string>
#include <utility>
#include <vector>

#include "torsionlab/mellin.hpp"
#include "torsionlab/oracles.hpp"

namespace torsionlab {

struct CheckDetail {
  std::string input;
  CScalar observed;
  CScalar expected;
};

struct CheckReport {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<CheckDetail> details;
  /// Named findings, e.g. which sign variant matched.
  std::vector<std::pair<std::string, std::string>> evidence;
};

/// Un-weighted alternating trace over t_grid: constant, and 0 for the built-in
/// odd-dimensional models.
CheckReport gbc_constancy(const HeatTraceModel& model, const std::vector<double>& t_grid);

/// Product with the given chi values (0 for honest odd factors): the weighted
/// trace vanishes and T = 1.
CheckReport even_dim_product_vanishing(const HeatTraceModel& left, const HeatTraceModel& right,
                                       double chi_left = 0.0, double chi_right = 0.0);

/// log T(product) = chi_right log T(left) + chi_left log T(right).
CheckReport product_formula(const HeatTraceModel& left, const HeatTraceModel& right,
                            double chi_left, double chi_right);

/// Sum over the Z-conjugacy classes of 2 log T_n(sigma) on the line against
/// both sign variants of the circle identity formula, with the numerical
/// pipeline on the circle as referee.
CheckReport decomposition_check(double R, double theta, double sigma);

/// Invariance of -2 log T under t -> c t; for the untwisted circle, the drift
/// log T(cR) - log T(R) = -log c.
CheckReport rescale_invariance(const HeatTraceModel& model, const std::vector<double>& c_values);

/// split_invariance packaged as a report.
CheckReport split_check(const HeatTraceModel& model, const std::vector<double>& splits);

}  // namespace torsionlab
