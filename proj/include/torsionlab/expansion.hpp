#pragma once

#include <variant>
#include <vector>

#include "torsionlab/numerics.hpp"

namespace torsionlab {

struct ExpansionTerm {
  double exponent = 0.0;
  CScalar coeff;
};

/// Small-t expansion  sum_k coeff_k t^{exponent_k} + o(t^{valid_beyond}).
struct AsymptoticExpansion {
  std::vector<ExpansionTerm> terms;
  double valid_beyond = 0.0;

  /// Exponents strictly increasing, finite coefficients.
  void validate() const;

  CScalar evaluate(double t) const;
  /// sum_k |coeff_k| t^{exponent_k}; the natural scale of the subtraction.
  double magnitude(double t) const;
  /// Coefficient of t^0, or 0 when absent.
  CScalar constant_term() const;
};

/// Order used for `valid_beyond` when the remainder is exponentially small (or
/// identically zero). Any finite order works for the regularization; this one
/// keeps the sigma-damped Taylor products short.
inline constexpr double kExponentiallySmallOrder = 4.0;

/// wa * A + wb * B with equal exponents merged.
AsymptoticExpansion combine(const AsymptoticExpansion& a, CScalar wa,
                            const AsymptoticExpansion& b, CScalar wb);

/// Expansion of exp(-sigma t) f(t), truncated at the remainder order of f.
AsymptoticExpansion damp(const AsymptoticExpansion& e, double sigma);

/// Expansion of f(c t).
AsymptoticExpansion rescale_time(const AsymptoticExpansion& e, double c);

struct ExponentialDecay {
  double rate = 0.0;
};
struct PolynomialDecay {
  double alpha = 0.0;
};
struct UnknownDecay {};

/// Large-t decay of a heat trace.
using DecayHint = std::variant<ExponentialDecay, PolynomialDecay, UnknownDecay>;

void validate(const DecayHint& hint);
/// The slower of two decay laws; used for sums of traces.
DecayHint slower(const DecayHint& a, const DecayHint& b);
DecayHint damp(const DecayHint& hint, double sigma);
DecayHint rescale_time(const DecayHint& hint, double c);

}  // namespace torsionlab
