#include "torsionlab/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace torsionlab::oracles {

namespace {

using std::numbers::pi;

bool in_2pi_z(double v) { return std::abs(std::remainder(v, 2.0 * pi)) < 1e-12; }

double sin_half_sq(double x) {
  const double s = std::sin(0.5 * x);
  return s * s;
}

void require_regular_angle(double x) {
  if (in_2pi_z(x)) fail(ErrorCode::DomainError, "rotation angle must avoid 2 pi Z");
}

}  // namespace

const char* formula_name(FormulaId id) {
  switch (id) {
    case FormulaId::LineTorsion: return "line_torsion";
    case FormulaId::LineTorsionSigma: return "line_torsion_sigma";
    case FormulaId::CircleTorsionE: return "circle_torsion_e";
    case FormulaId::CircleTorsionRotation: return "circle_torsion_rotation";
    case FormulaId::CircleSigmaE: return "circle_sigma_e";
    case FormulaId::CircleUntwistedTorsion: return "circle_untwisted_torsion";
    case FormulaId::H3Torsion: return "h3_torsion";
    case FormulaId::H3Sigma: return "h3_sigma";
    case FormulaId::H3Trace: return "h3_trace";
    case FormulaId::ProductTorsion: return "product_torsion";
  }
  return "unknown";
}

const char* variant_name(SignVariant v) {
  return v == SignVariant::Literal ? "Literal" : "GammaConsistent";
}

CScalar line_torsion(double R, double theta, double g) {
  if (!(R > 0.0)) fail(ErrorCode::DomainError, "R must be positive");
  if (g == 0.0) return 1.0;
  return std::exp(std::exp(CScalar(0.0, -theta * g)) / (2.0 * std::abs(g)));
}

CScalar line_torsion_sigma(double R, double theta, double g, double sigma) {
  if (!(R > 0.0)) fail(ErrorCode::DomainError, "R must be positive");
  if (!(sigma >= 0.0)) fail(ErrorCode::DomainError, "sigma must be nonnegative");
  const double root = std::sqrt(sigma);
  if (g == 0.0) return -R * root / 2.0;
  return std::exp(CScalar(-R * std::abs(g) * root, -theta * g)) / (2.0 * std::abs(g));
}

CScalar circle_torsion_e(double R, double theta) {
  if (!(R > 0.0)) fail(ErrorCode::DomainError, "R must be positive");
  if (in_2pi_z(theta)) fail(ErrorCode::DomainError, "theta must avoid 2 pi Z");
  // -(2 sinh(i theta / 2))^2 = 4 sin^2(theta / 2) > 0, principal root.
  return 1.0 / std::sqrt(4.0 * sin_half_sq(theta));
}

CScalar circle_sigma_e(double R, double theta, double sigma, SignVariant variant) {
  if (!(R > 0.0)) fail(ErrorCode::DomainError, "R must be positive");
  if (!(sigma > 0.0)) fail(ErrorCode::DomainError, "sigma must be positive");
  const double a = R * std::sqrt(sigma);
  const CScalar logs = -std::log(1.0 - std::exp(CScalar(-a, -theta))) -
                       std::log(1.0 - std::exp(CScalar(-a, theta)));
  // n = 0 image: (R / sqrt(4 pi)) sqrt(sigma) Gamma(-1/2) = -R sqrt(sigma).
  const double identity = variant == SignVariant::Literal ? a : -a;
  return identity + logs;
}

OracleValue circle_sigma_e_value(double R, double theta, double sigma, SignVariant variant) {
  OracleValue v;
  v.value = circle_sigma_e(R, theta, sigma, variant);
  v.formula_id = FormulaId::CircleSigmaE;
  v.caveat = std::string(variant_name(variant)) +
             ": the identity-class R sqrt(sigma) term is printed with + but Gamma(-1/2) = "
             "-2 sqrt(pi) gives -; the decomposition check arbitrates";
  return v;
}

CScalar circle_sigma_rotation(double R, double theta, double rot, double sigma) {
  if (!(R > 0.0)) fail(ErrorCode::DomainError, "R must be positive");
  if (!(sigma > 0.0)) fail(ErrorCode::DomainError, "sigma must be positive");
  const double r = rot - std::floor(rot);
  if (r == 0.0) fail(ErrorCode::DomainError, "rotation must not be an integer");
  const double root = std::sqrt(sigma);
  // Sum outward from the two images nearest to r; both tails are geometric.
  CScalar sum = 0.0;
  for (int dir : {1, -1}) {
    for (long k = 0;; ++k) {
      const double d = dir > 0 ? (1.0 - r) + static_cast<double>(k)   // n = k + 1
                               : r + static_cast<double>(k);          // n = -k
      const double n_minus_r = dir > 0 ? d : -d;
      const double mag = std::exp(-R * d * root) / d;
      sum += mag * std::exp(CScalar(0.0, -theta * n_minus_r));
      if (mag < 1e-18 * std::max(1.0, std::abs(sum))) break;
      if (k > 100'000'000) fail(ErrorCode::TruncationFailure, "rotation series did not converge");
    }
  }
  return sum;
}

CScalar circle_torsion_rotation(double R, double theta, double rot) {
  if (in_2pi_z(theta)) fail(ErrorCode::DomainError, "theta must avoid 2 pi Z");
  // The sigma -> 0 series is only conditionally convergent; extrapolate the
  // damped sums in u = sqrt(sigma) instead.
  const std::array<double, 7> u = {0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625};
  std::array<CScalar, 7> v;
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = circle_sigma_rotation(R, theta, rot, u[i] * u[i]);
  const CScalar two_log_t = extrapolate_to_zero(u, v, 6);
  return std::exp(two_log_t / 2.0);
}

double circle_untwisted_torsion(double R) {
  if (!(R > 0.0)) fail(ErrorCode::DomainError, "R must be positive");
  return 1.0 / R;
}

double h3_torsion(double x) {
  require_regular_angle(x);
  return std::exp(-1.0 / (8.0 * sin_half_sq(x)));
}

double h3_sigma(double x, double sigma) {
  require_regular_angle(x);
  if (!(sigma >= 0.0)) fail(ErrorCode::DomainError, "sigma must be nonnegative");
  return (std::sqrt(sigma + 0.5) - std::cos(x) * std::sqrt(sigma)) /
         (2.0 * std::sqrt(2.0) * sin_half_sq(x));
}

double h3_trace(double x, double t) {
  require_regular_angle(x);
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "t must be positive");
  return (std::cos(x) - std::exp(-t / 2.0)) / (4.0 * std::sqrt(2.0 * pi * t) * sin_half_sq(x));
}

std::optional<OracleValue> oracle_for_model(const HeatTraceModel& model) {
  struct Visitor {
    std::optional<OracleValue> operator()(const RealLine& m) const {
      return OracleValue{line_torsion(m.R, m.theta, m.g), FormulaId::LineTorsion, {}};
    }
    std::optional<OracleValue> operator()(const Circle& m) const {
      if (m.rot == 0.0) return OracleValue{circle_torsion_e(m.R, m.theta), FormulaId::CircleTorsionE, {}};
      return OracleValue{circle_torsion_rotation(m.R, m.theta, m.rot),
                         FormulaId::CircleTorsionRotation, {}};
    }
    std::optional<OracleValue> operator()(const CircleUntwisted& m) const {
      return OracleValue{circle_untwisted_torsion(m.R), FormulaId::CircleUntwistedTorsion, {}};
    }
    std::optional<OracleValue> operator()(const Hyperbolic3& m) const {
      return OracleValue{h3_torsion(m.x), FormulaId::H3Torsion, {}};
    }
    std::optional<OracleValue> operator()(const Product& m) const {
      const auto left = oracle_for_model(*m.left);
      const auto right = oracle_for_model(*m.right);
      if (!left || !right) return std::nullopt;
      // log T = chi_R log T_L + chi_L log T_R
      const CScalar log_t = m.chi_right * std::log(left->value) + m.chi_left * std::log(right->value);
      return OracleValue{std::exp(log_t), FormulaId::ProductTorsion, {}};
    }
    std::optional<OracleValue> operator()(const Sampled&) const { return std::nullopt; }
  };
  return std::visit(Visitor{}, model.kind());
}

}  // namespace torsionlab::oracles
