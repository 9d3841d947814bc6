#pragma once

#include <vector>

#include "torsionlab/numerics.hpp"

// Components of Bismut's orbital-integral formula for g-traces of heat
// operators on SO_0(2n+1,1)/SO(2n+1), evaluated fully for n = 1.
namespace torsionlab::bismut {

/// Element exp(x_1 H_1 + ... + x_n H_n) of the maximal torus SO(2)^n.
struct EllipticElement {
  std::vector<double> angles;

  /// Every x_j and every x_j +- x_k (j < k) avoids 2 pi Z.
  bool regular() const;
};

/// Y = y_1 H_1 + ... + y_n H_n in the torus Lie algebra.
struct TorusVector {
  std::vector<double> y;
};

/// J_g(Y) from its product formula. For n = 1 this is -1 / (4 sin^2(x/2)),
/// independent of Y. The n >= 2 branch has no independent check and should be
/// treated as experimental.
CScalar j_g(const EllipticElement& g, const TorusVector& Y);

/// tr((-1)^F F e^{-i ad(Y)} Ad(g)) on the exterior algebra of p*, n = 1.
CScalar supertrace_weighted(double x, double y);

/// tr((-1)^F e^{-i ad(Y)} Ad(g)) on the exterior algebra of p*, n = 1, computed
/// as det(1 - A) over the eigenvalues {e^{ix+y}, e^{-(ix+y)}, 1}. Identically 0.
CScalar supertrace_plain(double x, double y);

struct CasimirTraces {
  double on_k = 0.0;  // tr(C^k |_k)
  double on_p = 0.0;  // tr(C^k |_p)
};

/// Traces of the so(3) Casimir acting on k = so(3) and on p = R^3 inside
/// so(3,1), built from explicit matrices.
CasimirTraces casimir_traces();

/// beta = -tr(C^k|_k)/48 - tr(C^k|_p)/16.
double beta_constant();

/// Normalisation constants that make the quadrature agree with the closed-form
/// n = 1 trace: the dY -> dy Jacobian and the overall sign.
struct Calibration {
  double measure_factor = 1.0;
  double sign = 1.0;
  /// |observed ratio / snapped constant - 1| at the reference point.
  double residual = 0.0;
};

/// Determined once, at x = pi, t = 1, by snapping the observed ratio to the
/// nearest candidate +-{1, sqrt 2, 1/sqrt 2, 2, 1/2}.
const Calibration& calibration();

/// The formula with measure_factor = sign = 1, i.e. dY read as dy.
CScalar uncalibrated_trace(double x, double t, const QuadratureSpec& quad = {});

/// The alternating heat trace of H^3 at rotation angle x, from the orbital
/// integral. The formula computes the trace at t/2; the factor 2 is handled
/// here so callers always pass the actual t.
CScalar bismut_trace(double x, double t, const QuadratureSpec& quad = {});

/// Un-weighted alternating trace tr((-1)^F e^{-t Delta}) from the same formula,
/// with the plain supertrace in the integrand.
CScalar alternating_trace(double x, double t, const QuadratureSpec& quad = {});

/// Gauss-Hermite rule for weight e^{-z^2} with n nodes.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const HermiteRule& hermite_rule(int order_index);
inline constexpr int kHermiteOrders[] = {16, 32, 64, 128, 256};

}  // namespace torsionlab::bismut
