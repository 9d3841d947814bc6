#include "torsionlab/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace torsionlab {

namespace {

bool finite(CScalar z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Exponents built by adding halves and integers are exact in binary, but
// merge within a small tolerance anyway so user-supplied decimals behave.
constexpr double kExponentMergeTol = 1e-12;

AsymptoticExpansion normalized(std::vector<ExpansionTerm> terms, double valid_beyond) {
  std::sort(terms.begin(), terms.end(),
            [](const ExpansionTerm& l, const ExpansionTerm& r) { return l.exponent < r.exponent; });
  AsymptoticExpansion out;
  out.valid_beyond = valid_beyond;
  for (const ExpansionTerm& term : terms) {
    if (term.exponent > valid_beyond) continue;
    if (!out.terms.empty() &&
        std::abs(out.terms.back().exponent - term.exponent) <= kExponentMergeTol) {
      out.terms.back().coeff += term.coeff;
    } else {
      out.terms.push_back(term);
    }
  }
  std::erase_if(out.terms, [](const ExpansionTerm& t) { return t.coeff == CScalar(0.0); });
  return out;
}

}  // namespace

void AsymptoticExpansion::validate() const {
  if (std::isnan(valid_beyond)) fail(ErrorCode::InvalidArgument, "valid_beyond is NaN");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!std::isfinite(terms[i].exponent) || !finite(terms[i].coeff)) {
      fail(ErrorCode::InvalidArgument, "expansion term is not finite");
    }
    if (i > 0 && !(terms[i].exponent > terms[i - 1].exponent)) {
      fail(ErrorCode::InvalidArgument, "expansion exponents must be strictly increasing");
    }
  }
}

CScalar AsymptoticExpansion::evaluate(double t) const {
  CScalar sum = 0.0;
  for (const ExpansionTerm& term : terms) sum += term.coeff * std::pow(t, term.exponent);
  return sum;
}

double AsymptoticExpansion::magnitude(double t) const {
  double sum = 0.0;
  for (const ExpansionTerm& term : terms) sum += std::abs(term.coeff) * std::pow(t, term.exponent);
  return sum;
}

CScalar AsymptoticExpansion::constant_term() const {
  for (const ExpansionTerm& term : terms) {
    if (std::abs(term.exponent) <= kExponentMergeTol) return term.coeff;
  }
  return 0.0;
}

AsymptoticExpansion combine(const AsymptoticExpansion& a, CScalar wa,
                            const AsymptoticExpansion& b, CScalar wb) {
  std::vector<ExpansionTerm> terms;
  if (wa != CScalar(0.0)) {
    for (const ExpansionTerm& t : a.terms) terms.push_back({t.exponent, wa * t.coeff});
  }
  if (wb != CScalar(0.0)) {
    for (const ExpansionTerm& t : b.terms) terms.push_back({t.exponent, wb * t.coeff});
  }
  double vb = kExponentiallySmallOrder;
  if (wa != CScalar(0.0)) vb = std::min(vb, a.valid_beyond);
  if (wb != CScalar(0.0)) vb = std::min(vb, b.valid_beyond);
  if (wa == CScalar(0.0) && wb == CScalar(0.0)) vb = kExponentiallySmallOrder;
  return normalized(std::move(terms), vb);
}

AsymptoticExpansion damp(const AsymptoticExpansion& e, double sigma) {
  std::vector<ExpansionTerm> terms;
  for (const ExpansionTerm& term : e.terms) {
    // exp(-sigma t) = sum_k (-sigma)^k t^k / k!
    double factor = 1.0;
    for (int k = 0; term.exponent + k <= e.valid_beyond; ++k) {
      terms.push_back({term.exponent + k, term.coeff * factor});
      factor *= -sigma / static_cast<double>(k + 1);
    }
  }
  return normalized(std::move(terms), e.valid_beyond);
}

AsymptoticExpansion rescale_time(const AsymptoticExpansion& e, double c) {
  std::vector<ExpansionTerm> terms;
  for (const ExpansionTerm& term : e.terms) {
    terms.push_back({term.exponent, term.coeff * std::pow(c, term.exponent)});
  }
  return normalized(std::move(terms), e.valid_beyond);
}

void validate(const DecayHint& hint) {
  if (const auto* e = std::get_if<ExponentialDecay>(&hint); e && !(e->rate > 0.0 && std::isfinite(e->rate))) {
    fail(ErrorCode::InvalidArgument, "exponential decay rate must be positive");
  }
  if (const auto* p = std::get_if<PolynomialDecay>(&hint); p && !(p->alpha > 0.0 && std::isfinite(p->alpha))) {
    fail(ErrorCode::InvalidArgument, "polynomial decay exponent must be positive");
  }
}

DecayHint slower(const DecayHint& a, const DecayHint& b) {
  if (std::holds_alternative<UnknownDecay>(a) || std::holds_alternative<UnknownDecay>(b)) {
    return UnknownDecay{};
  }
  const auto* pa = std::get_if<PolynomialDecay>(&a);
  const auto* pb = std::get_if<PolynomialDecay>(&b);
  if (pa && pb) return PolynomialDecay{std::min(pa->alpha, pb->alpha)};
  if (pa) return *pa;
  if (pb) return *pb;
  return ExponentialDecay{std::min(std::get<ExponentialDecay>(a).rate,
                                   std::get<ExponentialDecay>(b).rate)};
}

DecayHint damp(const DecayHint& hint, double sigma) {
  if (const auto* e = std::get_if<ExponentialDecay>(&hint)) return ExponentialDecay{e->rate + sigma};
  return ExponentialDecay{sigma};
}

DecayHint rescale_time(const DecayHint& hint, double c) {
  if (const auto* e = std::get_if<ExponentialDecay>(&hint)) return ExponentialDecay{e->rate * c};
  return hint;
}

}  // namespace torsionlab
