#include "anicon/finsler_sphere.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace anicon::sphere {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

bool holds_or_na(Verdict v) { return v == Verdict::kHolds || v == Verdict::kNotApplicable; }

std::string verdicts(const ConditionReport& r) {
  std::string s = r.name + ": " + verdict_name(r.lhs.verdict);
  if (r.rhs) s += std::string(" / ") + verdict_name(r.rhs->verdict);
  return s;
}

}  // namespace

double nabla_closed_form(double a, double theta) {
  const double s2 = std::sin(theta) * std::sin(theta);
  const double d = 1.0 - a * a * s2;
  return a * std::cos(theta) * (1.0 + a * a * s2) / (d * d);
}

double nabla_from_jets(double a, double theta, const char* beta) {
  const ParamList params{{"a", a}};
  const Point4 p{theta, 0.0, 1.0, 1.0};
  const Jet alpha = eval_jet(parse(kAlpha, {"a"}), p, 3, params);
  const Jet A = alpha * alpha;
  const Jet B = eval_jet(parse(beta, {"a"}), p, 2, params);

  // a_ij = 1/2 dy_i dy_j alpha^2; da[k][i][j] = d_k a_ij.
  Mat2 g{};
  std::array<Mat2, 2> da{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      MultiIndex e{};
      e[2 + i] += 1;
      e[2 + j] += 1;
      g[i][j] = 0.5 * A.partial(e);
      for (int k = 0; k < 2; ++k) {
        MultiIndex ek = e;
        ek[k] += 1;
        da[k][i][j] = 0.5 * A.partial(ek);
      }
    }
  }
  const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  const Mat2 gi{{{g[1][1] / det, -g[0][1] / det}, {-g[1][0] / det, g[0][0] / det}}};
  const auto gamma = [&](int k, int i, int j) {
    double s = 0.0;
    for (int l = 0; l < 2; ++l) s += gi[k][l] * (da[i][l][j] + da[j][l][i] - da[l][i][j]);
    return 0.5 * s;
  };
  const Vec2 b{B.partial({0, 0, 1, 0}), B.partial({0, 0, 0, 1})};
  const double d2b1 = B.partial({0, 1, 1, 0});
  return d2b1 - gamma(0, 1, 0) * b[0] - gamma(1, 1, 0) * b[1];
}

Example run_example(double a, std::size_t samples, int order, const Tolerances& tol, unsigned threads) {
  if (!(a >= 0.0 && a < 1.0)) throw std::domain_error("Finsler parameter a must satisfy 0 <= a < 1");
  Example ex;
  ex.a = a;
  const ParamList params{{"a", a}};
  const Surface base(parse(kMetric, {"a"}), params, order);
  const Surface randers(parse(kRanders, {"a"}), params, order);
  const ConformalChange cc(base, Factor::expression(parse(kFactor, {"a"})));
  ex.samples = sample_box<PointEvaluation>(
      kBox, samples, [&](const SamplePoint& p) { return evaluate_point(cc, p); }, threads);
  if (ex.samples.values.empty()) throw InadmissiblePoint("no admissible sample points");

  const Expr F = parse(kMetric), Fbar = parse(kRanders, {"a"}), phi = parse(kFactor, {"a"});
  std::vector<GeometryFlags> base_flags, target_flags;
  for (std::size_t k = 0; k < ex.samples.points.size(); ++k) {
    const Point4 q = ex.samples.points[k].coords();
    const double f = evaluate(F, q), fb = evaluate(Fbar, q, params);
    ex.max_F_difference = std::max(ex.max_F_difference, std::abs(fb - f));
    ex.max_reduction_difference =
        std::max(ex.max_reduction_difference, std::abs(evaluate(Fbar, q, {{"a", 0.0}}) - f));
    ex.max_factor_error = std::max(ex.max_factor_error, std::abs(std::exp(evaluate(phi, q, params)) * f - fb));
    const auto& pe = ex.samples.values[k];
    base_flags.push_back(pe.base);
    target_flags.push_back(pe.target);
    ex.max_curvature_error = std::max(ex.max_curvature_error, std::abs(pe.target.R - 1.0));
    ex.max_base_curvature_error = std::max(ex.max_base_curvature_error, std::abs(pe.base.R - 1.0));
  }
  ex.base = classify(base_flags, tol);
  ex.target = classify(target_flags, tol);
  try {
    require_proper(ex.samples.values, tol);
    ex.audited = true;
  } catch (const ImproperFactor&) {
    ex.audited = false;
  }
  ex.audit = audit(ex.samples.values, tol);

  const VectorField X = parse_vector_field("1,0");
  ex.semi_concurrent_F = semi_concurrent(base, X, ex.samples.points, tol);
  ex.semi_concurrent_Fbar = semi_concurrent(randers, X, ex.samples.points, tol);

  using std::numbers::pi;
  for (double theta : {pi / 6, pi / 4, pi / 3, pi / 2, 2 * pi / 3}) {
    ex.nabla.push_back(
        {theta, nabla_closed_form(a, theta), nabla_from_jets(a, theta, kBetaClosedForm), nabla_from_jets(a, theta, kBeta)});
  }

  const bool finslerian = a > 0.0;
  auto& checks = ex.checks;
  {
    const bool ok = ex.base.riemannian.verdict == Verdict::kHolds &&
                    ex.base.projectively_flat.verdict == Verdict::kFails && ex.max_base_curvature_error < 1e-5;
    checks.push_back({"sphere.i", "F is Riemannian of constant curvature and fails the Hamel equation", ok,
                      verdicts(ex.base.riemannian) + "; " + verdicts(ex.base.projectively_flat) +
                          fmt("; max |R - 1| = %.3g", ex.max_base_curvature_error)});
  }
  {
    bool ok = true;
    std::string detail;
    for (Condition c : {Condition::kC, Condition::kHC, Condition::kVC, Condition::kPhiT}) {
      const auto& r = ex.audit.condition(c);
      ok = ok && holds_or_na(r.lhs.verdict) && holds_or_na(r.rhs->verdict);
      detail += (detail.empty() ? "" : "; ") + verdicts(r);
    }
    checks.push_back({"sphere.ii", "C, horizontal C and vertical C anisotropic; phiT-condition holds", ok, detail});
  }
  {
    double worst = 0.0;
    bool nonzero = false;
    for (const auto& row : ex.nabla) {
      worst = std::max(worst, std::abs(row.jets - row.closed_form));
      nonzero = nonzero || (std::abs(row.closed_form) > tol.fail && std::abs(row.metric_form) > tol.fail);
    }
    const bool ok = worst < 1e-10 &&
                    (finslerian ? ex.target.berwald.verdict == Verdict::kFails &&
                                      ex.target.landsberg.verdict == Verdict::kFails && nonzero
                                : ex.target.berwald.verdict == Verdict::kHolds);
    checks.push_back({"sphere.iii",
                      finslerian ? "F-bar is neither Berwald nor Landsberg; beta is not parallel"
                                 : "F-bar = F is Berwald; beta vanishes",
                      ok,
                      verdicts(ex.target.berwald) + "; " + verdicts(ex.target.landsberg) +
                          fmt("; max |nabla_2 b_1 - closed form| = %.3g", worst)});
  }
  {
    const bool ok = ex.max_curvature_error < 1e-5 && ex.target.projectively_flat.verdict == Verdict::kFails;
    checks.push_back({"sphere.iv", "F-bar has flag curvature 1 and is not projectively flat", ok,
                      fmt("max |R-bar - 1| = %.3g; ", ex.max_curvature_error) + verdicts(ex.target.projectively_flat)});
  }
  {
    bool ok = true;
    std::string detail;
    for (Condition c : {Condition::kCbar, Condition::kHCbar, Condition::kVCbar}) {
      const auto& r = ex.audit.condition(c);
      ok = ok && (finslerian ? r.lhs.verdict == Verdict::kFails && r.rhs->verdict == Verdict::kFails
                             : holds_or_na(r.lhs.verdict) && holds_or_na(r.rhs->verdict));
      detail += (detail.empty() ? "" : "; ") + verdicts(r);
    }
    checks.push_back({"sphere.v",
                      finslerian ? "not C-bar, horizontal C-bar or vertical C-bar anisotropic"
                                 : "barred conditions hold trivially",
                      ok, detail});
  }
  {
    const bool ok = ex.semi_concurrent_F.verdict == Verdict::kHolds &&
                    ex.semi_concurrent_Fbar.verdict == (finslerian ? Verdict::kFails : Verdict::kHolds);
    checks.push_back({"sphere.vii", "F admits a semi-concurrent field X = (1, 0); F-bar does not", ok,
                      std::string("F: ") + verdict_name(ex.semi_concurrent_F.verdict) +
                          "; F-bar: " + verdict_name(ex.semi_concurrent_Fbar.verdict)});
  }
  checks.push_back({"sphere.reduction", "a = 0 gives F-bar = F", ex.max_reduction_difference < 1e-12,
                    fmt("max |F-bar(a = 0) - F| = %.3g", ex.max_reduction_difference)});
  return ex;
}

}  // namespace anicon::sphere
