#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anicon/surface.hpp"

namespace anicon {

/// The factor is not 0-homogeneous in y, or otherwise unusable.
class FactorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conformal factor phi(x, y): a user expression or the main scalar of
/// the base metric.
struct Factor {
  enum class Kind { kExpr, kMainScalar };

  Kind kind = Kind::kExpr;
  Expr expr;

  static Factor expression(Expr e) { return {Kind::kExpr, std::move(e)}; }
  static Factor main_scalar() { return {Kind::kMainScalar, {}}; }

  bool is_main_scalar() const noexcept { return kind == Kind::kMainScalar; }
};

/// Barred quantities of F-bar = exp(phi) F at one point.
struct BarredQuantities {
  Vec2 l_lo{};
  Vec2 l_hi{};
  Vec2 m_lo{};
  Vec2 m_hi{};
  int eps_bar = 1;
  double I_bar = 0.0;
  Vec2 G_bar{};
  double Q = 0.0;
  double P = 0.0;
  double rho = 0.0;
  // Unbarred-frame derivatives of I-bar, then the barred-frame ones.
  double I_v2 = 0.0;  // I-bar_{;2}
  double I_h1 = 0.0;  // I-bar_{,1}
  double I_h2 = 0.0;  // I-bar_{,2}
  double I_vb = 0.0;  // I-bar_{;b}
  double I_ha = 0.0;  // I-bar_{,a}
  double I_hb = 0.0;  // I-bar_{,b}
  double T_coeff = 0.0;  // T-bar_ijhk = T_coeff m_i m_j m_h m_k
  Tensor4 T13{};         // F-bar T-bar^i_jkr
};

struct Deviation {
  std::string name;
  double formula = 0.0;
  double direct = 0.0;
  double rel = 0.0;  // |a - b| / max(1, |a|, |b|)
};

/// Everything the formula path produces at one point, plus the direct
/// recomputation on F-bar for comparison.
struct ConformalPoint {
  SamplePoint point;
  int eps = 1;
  double F = 0.0;
  double I = 0.0;

  double phi = 0.0;
  double phi_v2 = 0.0;
  double phi_v2v2 = 0.0;
  double phi_h1 = 0.0;
  double phi_h2 = 0.0;
  double phi_h1v2 = 0.0;
  double phi_v2h1 = 0.0;
  double phi_v2h2 = 0.0;

  double sigma = 0.0;
  double rho = 0.0;
  double admissibility = 0.0;  // eps + sigma - phi_{;2}^2
  double rho_v2 = 0.0;
  double rho_v2v2 = 0.0;
  double rho_h1 = 0.0;
  double rho_h2 = 0.0;
  double rho_v2h1 = 0.0;
  double rho_v2h2 = 0.0;
  double Q_v2 = 0.0;

  double I_v2 = 0.0;
  double I_h1 = 0.0;
  double I_h2 = 0.0;

  /// Real square roots of eps*rho exist; otherwise the frame, I-bar and
  /// everything downstream of them are left at zero.
  bool frame_applicable = false;

  BarredQuantities formula;
  BarredQuantities direct;  // re-signed to the formula's m-bar
  int sign = 1;             // relative sign of the two m-bar conventions

  double rho_identity = 0.0;  // rho (sigma + eps - phi_{;2}^2) - 1
  double qp_identity = 0.0;   // 2 eps phi_{;2} Q + 2P - F^2 phi_{,1}
  double qp_scale = 0.0;      // max(1, |terms|) for the relation above
  double t13_consistency = 0.0;  // (1,3) display vs I-bar_{;b} m-bar^4
  double vb_identity = 0.0;      // I-bar_{;b} - sqrt(eps rho) I-bar_{;2}

  std::vector<Deviation> deviations;  // formula vs direct, sign-normalized
};

/// Per-point geometry of both metrics, for callers needing tensors.
struct ConformalAnalysis {
  Geometry base;
  Geometry target;
  Jet phi;
  ConformalPoint values;
};

class ConformalChange {
 public:
  /// Raises the metric order when the factor needs more derivatives
  /// than requested; each adjustment is recorded in warnings().
  ConformalChange(const Surface& base, Factor factor);

  const Surface& base() const noexcept { return base_; }
  const Factor& factor() const noexcept { return factor_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Order of the jets of the factor phi (and of F-bar).
  int factor_order() const noexcept;

  Jet phi_jet(const Geometry& base_geo, const SamplePoint& p) const;

  ConformalAnalysis analyze(const SamplePoint& p) const;
  ConformalPoint evaluate(const SamplePoint& p) const { return analyze(p).values; }

 private:
  Surface base_;
  Factor factor_;
  std::vector<std::string> warnings_;
};

/// Minimum metric order for the conformal pipeline with an expression factor.
inline constexpr int kMinConformalOrder = 5;

/// Spray difference predicted for a Landsberg base when phi is the main
/// scalar: Q = -eps rho F^2 I_{,2}, P = rho F^2 I_{;2} I_{,2}.
struct LandsbergPrediction {
  double Q = 0.0;
  double P = 0.0;
};

LandsbergPrediction landsberg_prediction(const ConformalPoint& c);

double relative_deviation(double a, double b);

}  // namespace anicon
