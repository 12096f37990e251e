#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "anicon/expr.hpp"
#include "anicon/jet.hpp"

namespace anicon {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;
using JetVec2 = std::array<Jet, 2>;
using JetMat2 = std::array<JetVec2, 2>;

/// Fully covariant rank-3 and rank-4 tensors on a surface, index order
/// preserved: t[i][j][k] and t[h][i][j][k].
using Tensor3 = std::array<Mat2, 2>;
using Tensor4 = std::array<Tensor3, 2>;

/// The point is outside the conic domain: degenerate or inconsistent
/// metric data. Domain errors from elementary functions are reported
/// separately as DomainError.
class InadmissiblePoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplePoint {
  Vec2 x{};
  Vec2 y{};

  Point4 coords() const { return {x[0], x[1], y[0], y[1]}; }
  static SamplePoint from(const Point4& p) { return {{p[0], p[1]}, {p[2], p[3]}}; }
};

struct FundamentalData {
  double F = 0.0;
  Mat2 g{};
  Mat2 g_inv{};
  double det_g = 0.0;
  Mat2 h{};
};

struct BerwaldFrame {
  Vec2 l_lo{};
  Vec2 l_hi{};
  Vec2 m_lo{};
  Vec2 m_hi{};
  int eps = 1;
};

struct SprayData {
  Vec2 G{};
  Mat2 Gconn{};  // Gconn[i][j] = G^j_i
  double R = 0.0;
};

/// Jets of every unbarred quantity of a metric at one point. Index 0/1
/// of a vector refers to the x1/x2 (resp. y1/y2) components.
///
/// With F known to order K the stored orders are: g, g_inv, h, m: K-2;
/// l_lo: K-1; l_hi: K; C, I, Gconn: K-3; G: K-2; R: K-4.
struct Geometry {
  Point4 point{};
  int eps = 1;

  Jet F;
  Jet F2;
  JetVec2 y;
  JetMat2 g;
  JetMat2 g_inv;
  JetMat2 h;
  Jet det_g;
  JetVec2 l_lo;
  JetVec2 l_hi;
  JetVec2 m_lo;
  JetVec2 m_hi;
  std::array<JetMat2, 2> C;  // C[i][j][k] = 1/4 d^3 F^2 / dy^i dy^j dy^k
  Jet I;
  JetVec2 G;
  JetMat2 Gconn;  // Gconn[i][j] = dG^j/dy^i
  Jet R;

  /// Builds the geometry from the jet of F; requires order >= 4.
  static Geometry from_jet(const Jet& F);

  int order() const noexcept { return F.order(); }

  FundamentalData fundamental() const;
  BerwaldFrame frame() const;
  SprayData spray() const;

  /// Constant jet at this geometry's base point and order.
  Jet constant(double v) const;
};

// Scalar derivatives in the modified Berwald frame. The result order
// drops by one relative to the input (further capped by the geometry).
Jet vertical(const Geometry& geo, const Jet& f, int i);  // dot-partial_i f
Jet vert_l(const Geometry& geo, const Jet& f);           // f_{;1}
Jet vert_m(const Geometry& geo, const Jet& f);           // f_{;2}
Jet delta(const Geometry& geo, const Jet& f, int i);     // delta_i f
Jet horiz_l(const Geometry& geo, const Jet& f);          // f_{,1}
Jet horiz_m(const Geometry& geo, const Jet& f);          // f_{,2}

/// S f = y^i partial_i f - 2 G^i dot-partial_i f.
Jet spray_apply(const Geometry& geo, const Jet& f);

/// Contraction of a covector with the upper frame vectors: v_i l^i, v_i m^i.
double contract_l(const Geometry& geo, const Vec2& covector);
double contract_m(const Geometry& geo, const Vec2& covector);

Tensor3 cartan_values(const Geometry& geo);

/// Covariant T-tensor at the base point from the coordinate formula
/// T_hijk = F C_hij|k + C_hij l_k + C_hik l_j + C_hjk l_i + C_ijk l_h.
/// Requires order >= 4.
Tensor4 t_tensor(const Geometry& geo);

/// (1,3) form: T^i_jkr = g^{ih} T_hjkr, stored as out[i][j][k][r].
Tensor4 raise_first(const Geometry& geo, const Tensor4& t);

/// Raises the first index of a rank-3 tensor.
Tensor3 raise_first(const Geometry& geo, const Tensor3& t);

struct HamelResidual {
  double hamel = 0.0;  // dot-partial_1 partial_2 F - dot-partial_2 partial_1 F
  double Gm = 0.0;     // G^k m_k
};

HamelResidual hamel_residual(const Geometry& geo);

/// G^i_k m^k m_i.
double weakly_berwald_quantity(const Geometry& geo);

struct CommutationResidual {
  double first_lhs = 0.0;  // f_{,1,2} - f_{,2,1}
  double first_rhs = 0.0;  // -R f_{;2}
  double second_lhs = 0.0;  // f_{,1;2} - f_{;2,1}
  double second_rhs = 0.0;  // f_{,2}
  double third_lhs = 0.0;   // f_{,2;2} - f_{;2,2}
  double third_rhs = 0.0;   // -eps (f_{,1} + I f_{,2} + I_{,1} f_{;2})
  double f_v2 = 0.0;        // f_{;2}
};

/// Both sides of the three commutation formulas for a 0-homogeneous f.
CommutationResidual commutation(const Geometry& geo, const Jet& f);

/// Metric F(x, y) given as an expression with bound parameters.
class Surface {
 public:
  Surface(Expr metric, ParamList params, int order = kDefaultJetOrder);

  const Expr& metric() const noexcept { return metric_; }
  const ParamList& params() const noexcept { return params_; }
  int order() const noexcept { return order_; }

  Jet metric_jet(const SamplePoint& p) const;
  Geometry geometry(const SamplePoint& p) const;

  /// Jet of an auxiliary field at the same order as the metric.
  Jet field(const Expr& f, const SamplePoint& p) const;

 private:
  Expr metric_;
  ParamList params_;
  int order_;
};

}  // namespace anicon
