#include <gtest/gtest.h>

#include <cmath>

#include "anicon/conditions.hpp"
#include "anicon/sampling.hpp"

using namespace anicon;

namespace {

constexpr const char* kEuclid = "sqrt(y1^2+y2^2)";
constexpr const char* kSphere = "sqrt(y1^2+sin(x1)^2*y2^2)";
constexpr const char* kMinkowskiRanders = "sqrt(y1^2+y2^2)+0.3*y1";
constexpr const char* kRanders =
    "sqrt((1-a^2*sin(x1)^2)*y1^2+sin(x1)^2*y2^2)/(1-a^2*sin(x1)^2) - a*sin(x1)^2*y2/(1-a^2*sin(x1)^2)";
constexpr const char* kSphereFactor =
    "ln((sqrt((1-a^2*sin(x1)^2)*y1^2+sin(x1)^2*y2^2) - a*sin(x1)^2*y2)/"
    "((1-a^2*sin(x1)^2)*sqrt(y1^2+sin(x1)^2*y2^2)))";

const SampleBox kSphereBox{0.3, 2.8, 0.0, 6.283185307179586};
const SampleBox kUnitBox{0.0, 1.0, 0.0, 1.0};

ConformalChange change(const char* metric, const char* factor, double a = 0.0) {
  return ConformalChange(Surface(parse(metric, {"a"}), {{"a", a}}), Factor::expression(parse(factor, {"a"})));
}

std::vector<PointEvaluation> run(const ConformalChange& cc, const SampleBox& box, std::size_t count = 64) {
  const auto s = sample_box<PointEvaluation>(box, count, [&](const SamplePoint& p) { return evaluate_point(cc, p); });
  EXPECT_FALSE(s.exhausted);
  return s.values;
}

std::vector<GeometryFlags> flags(const Surface& s, const SampleBox& box, std::size_t count = 32) {
  return sample_box<GeometryFlags>(box, count, [&](const SamplePoint& p) { return geometry_flags(s.geometry(p)); })
      .values;
}

Verdict lhs(const Audit& a, Condition c) { return a.condition(c).lhs.verdict; }
Verdict rhs(const Audit& a, Condition c) { return a.condition(c).rhs->verdict; }

}  // namespace

TEST(Verdicts, Bands) {
  const Tolerances tol;
  EXPECT_EQ(verdict_of({1e-9, 5e-8}, tol), Verdict::kHolds);
  EXPECT_EQ(verdict_of({1e-9, 2e-3}, tol), Verdict::kFails);
  EXPECT_EQ(verdict_of({1e-9, 1e-5}, tol), Verdict::kInconclusive);
  EXPECT_EQ(verdict_of({}, tol), Verdict::kNotApplicable);
  EXPECT_EQ(verdict_of({std::nan("")}, tol), Verdict::kFails);
  EXPECT_TRUE(verdicts_agree(Verdict::kHolds, Verdict::kInconclusive));
  EXPECT_FALSE(verdicts_agree(Verdict::kFails, Verdict::kHolds));
}

TEST(Verdicts, RefinementNeverTurnsFailsIntoHolds) {
  const Tolerances tol;
  const auto cc = change(kSphere, kSphereFactor, 0.5);
  const auto all = run(cc, kSphereBox, 48);
  for (std::size_t n : {8u, 16u, 32u}) {
    const std::vector<PointEvaluation> head(all.begin(), all.begin() + n);
    const Audit small = audit(head, tol);
    const Audit big = audit(all, tol);
    for (std::size_t c = 0; c < kConditionCount; ++c) {
      if (small.conditions[c].lhs.verdict == Verdict::kFails) {
        EXPECT_EQ(big.conditions[c].lhs.verdict, Verdict::kFails) << small.conditions[c].name;
      }
    }
  }
}

TEST(Classify, Euclidean) {
  const auto c = classify(flags(Surface(parse(kEuclid), {}), kUnitBox), {});
  EXPECT_EQ(c.riemannian.verdict, Verdict::kHolds);
  EXPECT_EQ(c.berwald.verdict, Verdict::kHolds);
  EXPECT_EQ(c.landsberg.verdict, Verdict::kHolds);
  EXPECT_EQ(c.vanishing_T.verdict, Verdict::kHolds);
  EXPECT_EQ(c.projectively_flat.verdict, Verdict::kHolds);
  EXPECT_EQ(c.locally_minkowski.verdict, Verdict::kHolds);
}

TEST(Classify, RandersSphere) {
  const auto c = classify(flags(Surface(parse(kRanders, {"a"}), {{"a", 0.5}}), kSphereBox), {});
  EXPECT_EQ(c.riemannian.verdict, Verdict::kFails);
  EXPECT_EQ(c.berwald.verdict, Verdict::kFails);
  EXPECT_EQ(c.landsberg.verdict, Verdict::kFails);
  EXPECT_EQ(c.projectively_flat.verdict, Verdict::kFails);
}

TEST(Classify, RiemannianSphere) {
  const auto c = classify(flags(Surface(parse(kSphere), {}), kSphereBox), {});
  EXPECT_EQ(c.riemannian.verdict, Verdict::kHolds);
  EXPECT_EQ(c.projectively_flat.verdict, Verdict::kFails);
  EXPECT_EQ(c.projectively_flat.rhs->verdict, Verdict::kFails);
  EXPECT_EQ(c.locally_minkowski.verdict, Verdict::kFails);
}

TEST(Classify, NonQuadraticMinkowskiIsBerwald) {
  const auto c = classify(flags(Surface(parse(kMinkowskiRanders), {}), kUnitBox), {});
  EXPECT_EQ(c.riemannian.verdict, Verdict::kFails);
  EXPECT_EQ(c.berwald.verdict, Verdict::kHolds);
  EXPECT_EQ(c.vanishing_T.verdict, Verdict::kFails);
  EXPECT_EQ(c.weakly_berwald_quantity.verdict, Verdict::kHolds);
}

TEST(CFamily, SphereChange) {
  const Audit a = audit(run(change(kSphere, kSphereFactor, 0.5), kSphereBox), {});
  for (Condition c : {Condition::kC, Condition::kHC, Condition::kVC, Condition::kPhiT}) {
    EXPECT_EQ(lhs(a, c), Verdict::kHolds) << condition_name(c);
    EXPECT_EQ(rhs(a, c), Verdict::kHolds) << condition_name(c);
  }
  for (Condition c : {Condition::kCbar, Condition::kHCbar, Condition::kVCbar}) {
    EXPECT_EQ(lhs(a, c), Verdict::kFails) << condition_name(c);
    EXPECT_EQ(rhs(a, c), Verdict::kFails) << condition_name(c);
  }
  // The Riemannian horn fires for the unbarred rows.
  ASSERT_EQ(a.condition(Condition::kC).rhs->branches.size(), 1u);
  EXPECT_EQ(a.condition(Condition::kC).rhs->branches[0].first, "I=0");
  EXPECT_TRUE(a.table_agrees);
  EXPECT_EQ(a.identity_a.verdict, Verdict::kHolds);
  EXPECT_EQ(a.identity_b.verdict, Verdict::kHolds);
}

TEST(CFamily, PositionOnlyFactorOverRiemannianHoldsViaI) {
  const Audit a = audit(run(change(kSphere, "0.3*cos(x1) + x2"), kSphereBox, 24), {});
  EXPECT_EQ(a.condition(Condition::kC).verdict, Verdict::kHolds);
  EXPECT_EQ(a.condition(Condition::kC).rhs->branches[0].first, "I=0");
  EXPECT_EQ(a.condition(Condition::kVC).lhs.verdict, Verdict::kNotApplicable);
}

TEST(CFamily, PositionOnlyFactorRowsCoincide) {
  // Position-only factor: C, C-bar, hC and hC-bar reduce to the same statement.
  const Audit a = audit(run(change(kMinkowskiRanders, "0.1*x1"), kUnitBox, 32), {});
  for (Condition c : {Condition::kC, Condition::kCbar, Condition::kHC, Condition::kHCbar}) {
    EXPECT_EQ(lhs(a, c), Verdict::kFails) << condition_name(c);
    EXPECT_TRUE(a.condition(c).agree) << condition_name(c);
  }
}

TEST(PhiTFamily, VerticalRowMatchesVanishingT) {
  const Audit a = audit(run(change(kMinkowskiRanders, "0.5*y1*y2/(y1^2+y2^2)+0.1*x1"), kUnitBox, 32), {});
  EXPECT_EQ(lhs(a, Condition::kVPhiT), Verdict::kFails);
  EXPECT_EQ(rhs(a, Condition::kVPhiT), Verdict::kFails);
  EXPECT_TRUE(a.table_agrees);
}

TEST(PhiTFamily, HorizontallyConstantFactorKeepsHorizontalRows) {
  const Audit a = audit(run(change(kMinkowskiRanders, "0.5*y1*y2/(y1^2+y2^2)"), kUnitBox, 24), {});
  EXPECT_EQ(lhs(a, Condition::kHC), Verdict::kHolds);
  EXPECT_EQ(lhs(a, Condition::kHPhiT), Verdict::kHolds);
  EXPECT_EQ(lhs(a, Condition::kHCbar), Verdict::kHolds);
  EXPECT_EQ(rhs(a, Condition::kHCbar), Verdict::kHolds);
  EXPECT_EQ(a.first_integral_phi.verdict, Verdict::kHolds);
  EXPECT_EQ(a.first_integral_phi_v2.verdict, Verdict::kHolds);
}

TEST(Properties, BranchSoundness) {
  const Tolerances tol;
  for (const auto& cc : {change(kSphere, kSphereFactor, 0.3), change(kMinkowskiRanders, "0.1*x1"),
                         change(kMinkowskiRanders, "0.5*y1*y2/(y1^2+y2^2)+0.1*x1")}) {
    for (const auto& p : run(cc, kSphereBox, 32)) {
      for (std::size_t c = 0; c < kConditionCount; ++c) {
        const auto& v = p.conditions[c];
        if (!v.applicable) continue;
        // A vanishing characterization forces a vanishing contraction (scaled by the surviving factor).
        if (v.characterization < 1e-12) {
          EXPECT_LT(v.contraction, tol.zero) << condition_name(Condition(c));
        }
      }
    }
  }
}

TEST(Properties, EquivalenceAcrossFixtures) {
  for (const auto& cc : {change(kSphere, kSphereFactor, 0.7), change(kMinkowskiRanders, "0.1*x1"),
                         change(kMinkowskiRanders, "0.5*y1*y2/(y1^2+y2^2)+0.1*x1")}) {
    const Audit a = audit(run(cc, kSphereBox, 48), {});
    for (const auto& row : a.table) EXPECT_TRUE(row.agree) << row.name;
  }
}

TEST(Audit, ConstantFactorRefused) {
  const auto pts = run(change(kSphere, "ln(1+0*y1)"), kSphereBox, 8);
  EXPECT_THROW(require_proper(pts, {}), ImproperFactor);
  EXPECT_NO_THROW(require_proper(run(change(kSphere, "0.1*x1"), kSphereBox, 8), {}));
}

TEST(Audit, TheoremCheckOnBerwaldBase) {
  // Minkowski Randers is Berwald; with a phiT factor the premise may be vacuous,
  // but a violation must never be reported.
  const Audit a = audit(run(change(kMinkowskiRanders, "0.1*x1"), kUnitBox, 16), {});
  EXPECT_NE(a.theorem.status, "violated");
}

TEST(Audit, PropBranchesBothReported) {
  const Audit a = audit(run(change(kSphere, kSphereFactor, 0.5), kSphereBox, 16), {});
  EXPECT_FALSE(a.prop_branch_m.paired);
  EXPECT_EQ(a.prop_branch_m.lhs.points, 16u);
  EXPECT_EQ(a.prop_branch_l.lhs.points, 16u);
}

TEST(SemiConcurrent, RiemannianHoldsRandersFails) {
  const VectorField X = parse_vector_field("1, 0");
  std::vector<SamplePoint> pts;
  for (std::size_t i = 1; i <= 16; ++i) pts.push_back(candidate(kSphereBox, i));
  const auto r1 = semi_concurrent(Surface(parse(kSphere), {}), X, pts, {});
  EXPECT_EQ(r1.verdict, Verdict::kHolds);
  const auto r2 = semi_concurrent(Surface(parse(kRanders, {"a"}), {{"a", 0.5}}), X, pts, {});
  EXPECT_EQ(r2.verdict, Verdict::kFails);
  EXPECT_TRUE(r2.agree);
  EXPECT_THROW(semi_concurrent(Surface(parse(kSphere), {}), parse_vector_field("0,x1-x1"), pts, {}),
               std::invalid_argument);
  EXPECT_THROW(parse_vector_field("y1,0"), std::invalid_argument);
}

TEST(FirstIntegral, ConstantAndRegression) {
  const auto cc = change(kSphere, kSphereFactor, 0.5);
  const Audit a = audit(run(cc, kSphereBox, 16), {});
  EXPECT_EQ(a.first_integral_phi.verdict, Verdict::kFails);
  const auto pts = run(cc, kSphereBox, 1);
  EXPECT_NEAR(pts[0].first_integral_phi, 0.0011108746942796051, 1e-14);
  EXPECT_NEAR(pts[0].first_integral_phi_v2, 0.010779041731730546, 1e-13);

  // Oracle: S phi with central differences of phi and the spray from the geometry.
  const SamplePoint p = candidate(kSphereBox, 1);
  const Expr phi = parse(kSphereFactor, {"a"});
  const ParamList params{{"a", 0.5}};
  const auto G = cc.base().geometry(p).spray().G;
  double d[4];
  for (int v = 0; v < 4; ++v) {
    Point4 lo = p.coords(), hi = p.coords();
    lo[v] -= 1e-6;
    hi[v] += 1e-6;
    d[v] = (evaluate(phi, hi, params) - evaluate(phi, lo, params)) / 2e-6;
  }
  const double y_dx = p.y[0] * d[0] + p.y[1] * d[1];
  const double g_dy = 2 * (G[0] * d[2] + G[1] * d[3]);
  const double oracle = std::abs(y_dx - g_dy) / std::max({1.0, std::abs(y_dx), std::abs(g_dy)});
  EXPECT_NEAR(pts[0].first_integral_phi, oracle, 1e-8);

  const Audit c = audit(run(change(kSphere, "0*x1 + 0.2"), kSphereBox, 8), {});
  EXPECT_EQ(c.first_integral_phi.verdict, Verdict::kHolds);
}

TEST(Sampling, HaltonAndBox) {
  EXPECT_DOUBLE_EQ(halton(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(halton(3, 2), 0.75);
  EXPECT_DOUBLE_EQ(halton(1, 3), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(halton(4, 3), 4.0 / 9.0);
  const SampleBox b = parse_box("0,1,2,3");
  EXPECT_DOUBLE_EQ(b.x2_lo, 2.0);
  EXPECT_THROW(parse_box("0,1,2"), std::invalid_argument);
  EXPECT_THROW(parse_box("1,0,2,3"), std::invalid_argument);
  EXPECT_THROW(parse_box("0,1,a,3"), std::invalid_argument);
  const SampleBox c = parse_box(format_box(kSphereBox));
  EXPECT_EQ(c.x1_lo, kSphereBox.x1_lo);
  EXPECT_EQ(c.psi_hi, kSphereBox.psi_hi);
}

TEST(Sampling, RejectionsRecordedAndDeterministic) {
  // Inside the cone y1 > 0 only: half of the directions are rejected.
  const Surface s(parse("sqrt(y1)*sqrt(y1+y2^2/y1)"), {});
  const std::function<double(const SamplePoint&)> eval = [&](const SamplePoint& p) {
    return s.geometry(p).F.value();
  };
  const auto one = sample_box<double>(kUnitBox, 20, eval, 1);
  const auto many = sample_box<double>(kUnitBox, 20, eval, 4);
  EXPECT_EQ(one.points.size(), 20u);
  EXPECT_FALSE(one.rejected.empty());
  for (const auto& r : one.rejected) EXPECT_FALSE(r.reason.empty());
  ASSERT_EQ(one.values.size(), many.values.size());
  for (std::size_t k = 0; k < one.values.size(); ++k) EXPECT_EQ(one.values[k], many.values[k]);
  EXPECT_EQ(one.rejected.size(), many.rejected.size());
  EXPECT_EQ(one.points.size() + one.rejected.size(), one.candidates);
}

TEST(Sampling, PointsFile) {
  const auto pts = parse_points("# x1 x2 y1 y2\n0.1, 0.2, 1, 0\n0.3 0.4 0 1  # trailing\n\n");
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].y[1], 1.0);
  EXPECT_THROW(parse_points("1 2 3"), std::invalid_argument);
  EXPECT_THROW(parse_points("1 2 0 0"), std::invalid_argument);
  const Surface s(parse("sqrt(y1)*sqrt(y1+y2^2/y1)"), {});
  const std::function<double(const SamplePoint&)> eval = [&](const SamplePoint& p) {
    return s.geometry(p).F.value();
  };
  const auto got = sample_list<double>(parse_points("0 0 1 0\n0 0 -1 0\n"), eval);
  EXPECT_EQ(got.points.size(), 1u);
  ASSERT_EQ(got.rejected.size(), 1u);
  EXPECT_EQ(got.rejected[0].index, 2u);
}
