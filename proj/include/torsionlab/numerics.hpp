#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <span>

#include "torsionlab/error.hpp"

namespace torsionlab {

using CScalar = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;

  void validate() const;
};

namespace constants {

inline constexpr double euler_gamma = std::numbers::egamma;

// Riemann zeta at the origin: zeta(0) = -1/2, zeta'(0) = -log(2 pi)/2.
// These are the two values that turn the untwisted-circle spectral zeta
// function into T = 1/R.
inline constexpr double zeta_at_0 = -0.5;
inline const double zeta_prime_at_0 = -0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace constants

struct Integral {
  CScalar value;
  double error = 0.0;
};

using ComplexFn = std::function<CScalar(double)>;

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of a complex-valued
/// integrand over [lo, hi]. `hi` may be +infinity, in which case the domain is
/// mapped onto [0, 1) through t = lo + u / (1 - u).
///
/// Throws DomainError when lo >= hi and NonConvergence when the subdivision
/// budget runs out before max(abs_tol, rel_tol |I|) is met.
Integral adaptive_integrate(const ComplexFn& f, double lo, double hi,
                            const QuadratureSpec& spec = {});

/// Closed form of the integral of exp(-a/t - b t) t^{-3/2} over (0, inf):
/// sqrt(pi/a) exp(-2 sqrt(ab)).
double int_exp_closed(double a, double b);

/// Gamma(-1/2), taken from the log-Gamma backend.
double gamma_minus_half();

/// d/ds Gamma(s - 1/2) / Gamma(s) at s = 0, which equals Gamma(-1/2) since
/// 1/Gamma(s) = s + O(s^2).
double gamma_quotient_derivative();

/// Exponential integral E1(x) for x > 0.
double exp_integral_e1(double x);

/// Least-squares polynomial of the given degree through (u_i, v_i), evaluated
/// at u = 0. Throws FitIllConditioned when the Vandermonde system is
/// numerically singular.
CScalar extrapolate_to_zero(std::span<const double> u, std::span<const CScalar> values,
                            int degree);

}  // namespace torsionlab
