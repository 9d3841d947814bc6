#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "torsionlab/expansion.hpp"

namespace torsionlab {

/// Which side of the Poisson-dual pair a periodic trace is summed on.
enum class CircleRep { Spectral, Images, Auto };

enum class H3Mode { ClosedForm, BismutQuadrature };

/// R acting on itself by translation; metric R^2 dx^2, connection d + i theta dx,
/// group element g.
struct RealLine {
  double R = 1.0;
  double theta = 0.0;
  double g = 0.0;
};

/// The circle R/Z of circumference R acting on itself, twist theta not in 2 pi Z,
/// rotation element rot + Z.
struct Circle {
  double R = 1.0;
  double theta = 0.0;
  double rot = 0.0;
  CircleRep rep = CircleRep::Auto;
};

/// The untwisted circle at the identity element; ker Delta is nonzero and the
/// harmonic projection is subtracted.
struct CircleUntwisted {
  double R = 1.0;
  CircleRep rep = CircleRep::Auto;
};

/// Hyperbolic 3-space with a regular elliptic rotation by angle x.
struct Hyperbolic3 {
  double x = 0.0;
  H3Mode mode = H3Mode::ClosedForm;
};

class HeatTraceModel;

/// Product of two models; traces combine as T_L * chi_R + T_R * chi_L.
struct Product {
  std::shared_ptr<const HeatTraceModel> left;
  std::shared_ptr<const HeatTraceModel> right;
  double chi_left = 0.0;
  double chi_right = 0.0;
};

/// Tabulated trace with a caller-declared small-t expansion and decay law.
struct SampledData {
  std::vector<double> t_grid;
  std::vector<CScalar> values;
  AsymptoticExpansion expansion;
  DecayHint decay = UnknownDecay{};
  // Hermite slopes for the real and imaginary parts.
  std::vector<double> slope_re;
  std::vector<double> slope_im;
};

struct Sampled {
  std::shared_ptr<const SampledData> data;
};

class HeatTraceModel {
 public:
  using Variant = std::variant<RealLine, Circle, CircleUntwisted, Hyperbolic3, Product, Sampled>;

  static HeatTraceModel real_line(double R, double theta, double g);
  static HeatTraceModel circle(double R, double theta, double rot, CircleRep rep = CircleRep::Auto);
  static HeatTraceModel circle_untwisted(double R, CircleRep rep = CircleRep::Auto);
  static HeatTraceModel hyperbolic3(double x, H3Mode mode = H3Mode::ClosedForm);
  static HeatTraceModel product(const HeatTraceModel& left, const HeatTraceModel& right,
                                double chi_left, double chi_right);
  static HeatTraceModel sampled(std::vector<double> t_grid, std::vector<CScalar> values,
                                AsymptoticExpansion expansion, DecayHint decay);

  const Variant& kind() const noexcept { return kind_; }
  bool is_one_dimensional() const noexcept;
  /// Short tag used in machine-readable output.
  std::string name() const;

 private:
  explicit HeatTraceModel(Variant v) : kind_(std::move(v)) {}
  Variant kind_;
};

/// Alternating degree-weighted trace sum_p (-1)^p p Tr_g(e^{-t Delta^p} - P_p).
CScalar curly_T(const HeatTraceModel& model, double t);

/// Tr_g(e^{-t Delta^p} - P_p) for the one-dimensional models, p in {0, 1}.
CScalar heat_trace_p(const HeatTraceModel& model, int p, double t);

AsymptoticExpansion small_t_expansion(const HeatTraceModel& model);
DecayHint decay_hint(const HeatTraceModel& model);

/// Un-weighted alternating trace, i.e. the g-Euler characteristic.
double chi_g(const HeatTraceModel& model);

/// Un-weighted alternating trace at a given t (constant in t by Gauss-Bonnet).
CScalar alternating_trace(const HeatTraceModel& model, double t);

// Raw series, exposed for duality tests.
CScalar circle_trace_images(double R, double theta, double rot, double t);
CScalar circle_trace_spectral(double R, double theta, double rot, double t);
CScalar circle_untwisted_trace_images(double R, double t);
CScalar circle_untwisted_trace_spectral(double R, double t);

/// Crossover where the Auto representation switches from images to spectral.
inline double circle_crossover(double R) { return R * R / (4.0 * std::numbers::pi); }

/// Reads "t,re[,im]" rows; blank lines and '#' comments are skipped and a
/// non-numeric first row is taken as a header.
struct TraceSamples {
  std::vector<double> t;
  std::vector<CScalar> values;
};
TraceSamples read_trace_csv(const std::string& path);

}  // namespace torsionlab
