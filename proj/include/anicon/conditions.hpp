#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "anicon/conformal.hpp"

namespace anicon {

enum class Verdict { kHolds, kFails, kInconclusive, kNotApplicable };

const char* verdict_name(Verdict v);

struct Tolerances {
  double zero = 1e-7;
  double fail = 1e-3;
};

/// holds: every residual < zero; fails: some residual > fail; otherwise
/// inconclusive. No residuals at all gives NotApplicable.
Verdict verdict_of(const std::vector<double>& residuals, const Tolerances& tol);

/// Two verdicts contradict when one holds and the other fails.
bool verdicts_agree(Verdict a, Verdict b);

/// Audit refused: the factor is constant on the sample set.
class ImproperFactor : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One side of a condition over the sample set.
struct Side {
  std::string label;
  Verdict verdict = Verdict::kNotApplicable;
  double max_residual = 0.0;
  std::size_t points = 0;  // points where the side was evaluated
  std::optional<std::size_t> worst;  // sample index of the max
  /// Winning branch of a disjunction and how many points it fired on.
  std::vector<std::pair<std::string, std::size_t>> branches;
};

struct Witness {
  std::size_t index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ConditionReport {
  std::string name;
  Side lhs;                  // defining contraction or primary quantity
  std::optional<Side> rhs;   // characterization, when the condition has one
  Verdict verdict = Verdict::kNotApplicable;  // of lhs
  bool paired = false;       // lhs and rhs claimed equivalent
  bool agree = true;
  std::vector<Witness> witnesses;  // points where the two sides contradict
  std::string note;
};

/// Unbarred scalars of one metric at a point, used for classification.
struct GeometryFlags {
  double F = 0.0;
  double I = 0.0;
  double I_v2 = 0.0;
  double I_h1 = 0.0;
  double I_h2 = 0.0;
  double weakly_berwald = 0.0;  // G^i_k m^k m_i / F
  double hamel = 0.0;
  double Gm = 0.0;              // G^k m_k / F^2
  double dxF = 0.0;             // max |d_x F| / F
  double R = 0.0;
};

GeometryFlags geometry_flags(const Geometry& geo);

/// Classification flags of a metric over samples.
struct Classification {
  ConditionReport riemannian;
  ConditionReport berwald;
  ConditionReport landsberg;
  ConditionReport vanishing_T;
  ConditionReport weakly_berwald_quantity;  // G^i_k m^k m_i, with I_{,2} alongside
  ConditionReport projectively_flat;        // Hamel residual, with G^k m_k alongside
  ConditionReport locally_minkowski;

  std::vector<const ConditionReport*> all() const {
    return {&riemannian, &berwald, &landsberg, &vanishing_T, &weakly_berwald_quantity, &projectively_flat,
            &locally_minkowski};
  }
};

Classification classify(const std::vector<GeometryFlags>& points, const Tolerances& tol);

enum class Condition {
  kC,
  kCbar,
  kHC,
  kHCbar,
  kVC,
  kVCbar,
  kPhiT,
  kPhiTbar,
  kHPhiT,
  kHPhiTbar,
  kVPhiT,
  kVPhiTbar,
};
inline constexpr std::size_t kConditionCount = 12;

const char* condition_name(Condition c);
bool is_vertical(Condition c);
bool is_barred(Condition c);

/// The ten rows of the equivalence table, in order.
inline constexpr std::array<Condition, 10> kTableRows{
    Condition::kC,     Condition::kCbar,     Condition::kHC,    Condition::kHCbar,    Condition::kVC,
    Condition::kPhiT, Condition::kPhiTbar, Condition::kHPhiT, Condition::kHPhiTbar, Condition::kVPhiT,
};

/// Both sides of one condition at one point.
struct ConditionValue {
  bool applicable = true;  // false when the barred frame is unavailable
  double contraction = 0.0;
  double characterization = 0.0;
  std::string branch;      // winning branch of the characterization
  double literal = -1.0;   // table-literal characterization where it differs
};

/// Everything the audit needs at one accepted point.
struct PointEvaluation {
  ConformalPoint conf;
  GeometryFlags base;
  GeometryFlags target;
  std::array<ConditionValue, kConditionCount> conditions;

  Vec2 dphi{};          // coordinate gradient d_i phi in x
  double m_dphi = 0.0;  // m^i d_i phi
  double l_dphi = 0.0;  // l^i d_i phi

  double identity_a = 0.0;  // F^2 l.dphi = F^2 phi_{,1} + 2 G^k phi_{;2} m_k, normalized
  double identity_b = 0.0;  // F m.dphi = eps F phi_{,2} + G^i_k phi_{;2} m^k m_i, normalized
  double prop_m = 0.0;      // phi_{,2} + phi_{;2} G^k m_k / F^2, normalized
  double prop_l = 0.0;      // phi_{,2} + phi_{;2} G^k l_k / F^2, normalized
  double first_integral_phi = 0.0;     // |S phi| / scale
  double first_integral_phi_v2 = 0.0;  // |S phi_{;2}| / scale
};

PointEvaluation evaluate_point(const ConformalChange& cc, const SamplePoint& p);

struct TheoremCheck {
  bool premise = false;  // landsberg and phiT hold, with m.dphi > tol_fail somewhere
  Verdict berwald = Verdict::kNotApplicable;
  std::string status;    // "vacuous", "confirmed" or "violated"
};

struct Audit {
  std::vector<ConditionReport> conditions;  // all twelve, in Condition order
  std::vector<ConditionReport> table;       // the ten table rows
  ConditionReport phiTbar_table_literal;    // min(|I-bar_{;2}|, |m.dphi|)
  ConditionReport vphiT_table_literal;      // F Riemannian
  ConditionReport identity_a;
  ConditionReport identity_b;
  ConditionReport prop_branch_m;  // reported only
  ConditionReport prop_branch_l;  // reported only
  ConditionReport first_integral_phi;
  ConditionReport first_integral_phi_v2;
  TheoremCheck theorem;
  bool table_agrees = true;

  const ConditionReport& condition(Condition c) const { return conditions[static_cast<std::size_t>(c)]; }
};

/// Throws ImproperFactor when phi is constant at every point.
void require_proper(const std::vector<PointEvaluation>& points, const Tolerances& tol);

Audit audit(const std::vector<PointEvaluation>& points, const Tolerances& tol);

/// Position-only vector field X^i(x) tested for X^i C_ijk = 0.
struct VectorField {
  Expr x1;
  Expr x2;
};

VectorField parse_vector_field(const std::string& text, const std::vector<std::string>& params = {});

/// Rejects X identically zero on the samples (std::invalid_argument).
ConditionReport semi_concurrent(const Surface& surface, const VectorField& X, const std::vector<SamplePoint>& points,
                                const Tolerances& tol);

}  // namespace anicon
