#pragma once

#include <optional>
#include <string>

#include "torsionlab/heat_models.hpp"

namespace torsionlab::oracles {

enum class FormulaId {
  LineTorsion,
  LineTorsionSigma,
  CircleTorsionE,
  CircleTorsionRotation,
  CircleSigmaE,
  CircleUntwistedTorsion,
  H3Torsion,
  H3Sigma,
  H3Trace,
  ProductTorsion,
};

const char* formula_name(FormulaId id);

struct OracleValue {
  CScalar value;
  FormulaId formula_id = FormulaId::LineTorsion;
  /// Only set for the circle identity-element sigma formula, whose printed
  /// sign of the R sqrt(sigma) term is ambiguous.
  std::optional<std::string> caveat;
};

/// Sign convention of the R sqrt(sigma) term in the circle identity sigma formula.
enum class SignVariant { Literal, GammaConsistent };

const char* variant_name(SignVariant v);

/// T_g on the real line: exp(e^{-i theta g} / 2|g|) for g != 0, and 1 at g = 0.
CScalar line_torsion(double R, double theta, double g);
/// log T_g(sigma) on the real line.
CScalar line_torsion_sigma(double R, double theta, double g, double sigma);

/// T_e on the twisted circle, (4 sin^2(theta/2))^{-1/2}.
CScalar circle_torsion_e(double R, double theta);
/// 2 log T_e(sigma) on the twisted circle in the requested sign convention.
CScalar circle_sigma_e(double R, double theta, double sigma, SignVariant variant);
OracleValue circle_sigma_e_value(double R, double theta, double sigma, SignVariant variant);

/// 2 log T_g(sigma) on the circle for rot not in Z, summed over images.
CScalar circle_sigma_rotation(double R, double theta, double rot, double sigma);
/// T_g for rot not in Z as the Abel limit sigma -> 0 of the series above.
CScalar circle_torsion_rotation(double R, double theta, double rot);

double circle_untwisted_torsion(double R);

double h3_torsion(double x);
/// -2 log T_g(sigma) on hyperbolic 3-space.
double h3_sigma(double x, double sigma);
double h3_trace(double x, double t);

/// Closed-form torsion T for a built-in model, when one exists.
std::optional<OracleValue> oracle_for_model(const HeatTraceModel& model);

}  // namespace torsionlab::oracles
