#include "anicon/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace anicon {

namespace {

constexpr const char* kConditionNames[kConditionCount] = {
    "C",     "C-bar",     "hC",     "hC-bar",     "vC",     "vC-bar",
    "phiT",  "phiT-bar",  "h-phiT", "h-phiT-bar", "v-phiT", "v-phiT-bar",
};

double scaled_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

/// Per-point values of one side; nullopt where not evaluated.
struct Series {
  std::string label;
  std::vector<std::optional<double>> values;
  std::vector<std::string> branches;  // parallel to values, may be empty
};

Side summarize(const Series& s, const Tolerances& tol) {
  Side side;
  side.label = s.label;
  std::vector<double> used;
  std::map<std::string, std::size_t> counts;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (!s.values[k]) continue;
    const double v = *s.values[k];
    used.push_back(v);
    if (!side.worst || v > side.max_residual) {
      side.max_residual = v;
      side.worst = k;
    }
    if (k < s.branches.size() && !s.branches[k].empty()) ++counts[s.branches[k]];
  }
  side.points = used.size();
  side.verdict = verdict_of(used, tol);
  side.branches.assign(counts.begin(), counts.end());
  return side;
}

ConditionReport make_report(std::string name, const Series& lhs, const Series* rhs, bool paired,
                            const Tolerances& tol) {
  ConditionReport r;
  r.name = std::move(name);
  r.lhs = summarize(lhs, tol);
  r.verdict = r.lhs.verdict;
  if (rhs) {
    r.rhs = summarize(*rhs, tol);
    r.paired = paired;
    if (paired) {
      r.agree = verdicts_agree(r.lhs.verdict, r.rhs->verdict);
      const auto classify_one = [&](double v) {
        return v < tol.zero ? Verdict::kHolds : (v > tol.fail ? Verdict::kFails : Verdict::kInconclusive);
      };
      for (std::size_t k = 0; k < lhs.values.size(); ++k) {
        if (!lhs.values[k] || !rhs->values[k]) continue;
        if (!verdicts_agree(classify_one(*lhs.values[k]), classify_one(*rhs->values[k]))) {
          r.witnesses.push_back({k, *lhs.values[k], *rhs->values[k]});
        }
      }
    }
  }
  return r;
}

Series series(std::string label, std::size_t n) {
  Series s;
  s.label = std::move(label);
  s.values.resize(n);
  s.branches.resize(n);
  return s;
}

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

Vec2 vals(const JetVec2& v) { return {v[0].value(), v[1].value()}; }

/// max over lower indices |sum_i A^i_J X_i| / |m_lo|^(lower rank).
double contraction3(const Tensor3& a, const Vec2& X, double m_norm) {
  double m = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) m = std::max(m, std::abs(a[0][j][k] * X[0] + a[1][j][k] * X[1]));
  return m / (m_norm * m_norm);
}

double contraction4(const Tensor4& a, const Vec2& X, double m_norm) {
  double m = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      for (int r = 0; r < 2; ++r) m = std::max(m, std::abs(a[0][j][k][r] * X[0] + a[1][j][k][r] * X[1]));
  return m / (m_norm * m_norm * m_norm);
}

Tensor3 scaled(Tensor3 t, double s) {
  for (auto& a : t)
    for (auto& b : a)
      for (auto& c : b) c *= s;
  return t;
}

Tensor4 scaled(Tensor4 t, double s) {
  for (auto& a : t) a = scaled(a, s);
  return t;
}

/// min(|a|, |b|) with the name of the smaller branch.
std::pair<double, std::string> either(double a, const char* name_a, double b, const char* name_b) {
  return std::abs(a) <= std::abs(b) ? std::pair{std::abs(a), std::string(name_a)}
                                    : std::pair{std::abs(b), std::string(name_b)};
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kFails:
      return "fails";
    case Verdict::kInconclusive:
      return "inconclusive";
    case Verdict::kNotApplicable:
      break;
  }
  return "not-applicable";
}

Verdict verdict_of(const std::vector<double>& residuals, const Tolerances& tol) {
  if (residuals.empty()) return Verdict::kNotApplicable;
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, std::isnan(r) ? INFINITY : r);
  if (worst > tol.fail) return Verdict::kFails;
  if (worst < tol.zero) return Verdict::kHolds;
  return Verdict::kInconclusive;
}

bool verdicts_agree(Verdict a, Verdict b) {
  return !((a == Verdict::kHolds && b == Verdict::kFails) || (a == Verdict::kFails && b == Verdict::kHolds));
}

const char* condition_name(Condition c) { return kConditionNames[static_cast<std::size_t>(c)]; }

bool is_vertical(Condition c) {
  return c == Condition::kVC || c == Condition::kVCbar || c == Condition::kVPhiT || c == Condition::kVPhiTbar;
}

bool is_barred(Condition c) { return static_cast<int>(c) % 2 == 1; }

GeometryFlags geometry_flags(const Geometry& geo) {
  GeometryFlags f;
  f.F = geo.F.value();
  f.I = geo.I.value();
  f.I_v2 = vert_m(geo, geo.I).value();
  f.I_h1 = horiz_l(geo, geo.I).value();
  f.I_h2 = horiz_m(geo, geo.I).value();
  f.weakly_berwald = weakly_berwald_quantity(geo) / f.F;
  const HamelResidual h = hamel_residual(geo);
  f.hamel = h.hamel;
  f.Gm = h.Gm / (f.F * f.F);
  f.dxF = std::max(std::abs(geo.F.partial({1, 0, 0, 0})), std::abs(geo.F.partial({0, 1, 0, 0}))) / f.F;
  f.R = geo.R.value();
  return f;
}

Classification classify(const std::vector<GeometryFlags>& pts, const Tolerances& tol) {
  const std::size_t n = pts.size();
  auto col = [&](const char* label, auto get) {
    Series s = series(label, n);
    for (std::size_t k = 0; k < n; ++k) s.values[k] = std::abs(get(pts[k]));
    return s;
  };
  Classification c;
  const Series I = col("|I|", [](const GeometryFlags& f) { return f.I; });
  const Series I_h1 = col("|I_{,1}|", [](const GeometryFlags& f) { return f.I_h1; });
  const Series I_h2 = col("|I_{,2}|", [](const GeometryFlags& f) { return f.I_h2; });
  Series berwald = col("max(|I_{,1}|, |I_{,2}|)",
                       [](const GeometryFlags& f) { return std::max(std::abs(f.I_h1), std::abs(f.I_h2)); });
  c.riemannian = make_report("riemannian", I, nullptr, false, tol);
  c.landsberg = make_report("landsberg", I_h1, nullptr, false, tol);
  c.berwald = make_report("berwald", berwald, nullptr, false, tol);
  c.vanishing_T = make_report("vanishing_T", col("|I_{;2}|", [](const GeometryFlags& f) { return f.I_v2; }),
                              nullptr, false, tol);
  const Series wb = col("|G^i_k m^k m_i| / F", [](const GeometryFlags& f) { return f.weakly_berwald; });
  c.weakly_berwald_quantity = make_report("weakly_berwald_quantity", wb, &I_h2, false, tol);
  c.weakly_berwald_quantity.note = "I_{,2} shown alongside; equivalence not asserted";
  const Series hamel = col("|hamel|", [](const GeometryFlags& f) { return f.hamel; });
  const Series Gm = col("|G^k m_k| / F^2", [](const GeometryFlags& f) { return f.Gm; });
  c.projectively_flat = make_report("projectively_flat_in_coords", hamel, &Gm, true, tol);
  c.locally_minkowski = make_report("locally_minkowski_in_coords",
                                    col("max|d_x F| / F", [](const GeometryFlags& f) { return f.dxF; }), nullptr,
                                    false, tol);
  return c;
}

PointEvaluation evaluate_point(const ConformalChange& cc, const SamplePoint& p) {
  ConformalAnalysis an = cc.analyze(p);
  const Geometry& B = an.base;
  const Geometry& T = an.target;
  const Jet& phi = an.phi;
  const ConformalPoint& c = an.values;

  PointEvaluation out;
  out.base = geometry_flags(B);
  out.target = geometry_flags(T);

  const double F = B.F.value();
  const double F2 = F * F;
  const double e = B.eps;
  const BerwaldFrame fr = B.frame();
  const Vec2 dphi{phi.partial({1, 0, 0, 0}), phi.partial({0, 1, 0, 0})};
  const Vec2 hphi{delta(B, phi, 0).value(), delta(B, phi, 1).value()};
  const Vec2 vphi{F * vertical(B, phi, 0).value(), F * vertical(B, phi, 1).value()};
  out.dphi = dphi;
  out.m_dphi = contract_m(B, dphi);
  out.l_dphi = contract_l(B, dphi);

  // Unbarred tensors: F C^i_jk and F T^i_jkr.
  const double m_norm = norm2(fr.m_lo);
  const Tensor3 FC = scaled(raise_first(B, cartan_values(B)), F);
  const Tensor4 FT = scaled(raise_first(B, t_tensor(B)), F);

  const double m_diff = scaled_diff(out.m_dphi, e * c.phi_v2 * out.l_dphi);
  const double h_diff = scaled_diff(c.phi_h2, c.phi_v2 * c.phi_h1);
  auto& v = out.conditions;
  auto set = [&](Condition k, double contraction, std::pair<double, std::string> ch) {
    auto& cv = v[static_cast<std::size_t>(k)];
    cv.contraction = contraction;
    cv.characterization = ch.first;
    cv.branch = std::move(ch.second);
  };
  set(Condition::kC, contraction3(FC, dphi, m_norm), either(c.I, "I=0", out.m_dphi, "m.dphi=0"));
  set(Condition::kHC, contraction3(FC, hphi, m_norm), either(c.I, "I=0", c.phi_h2, "phi_{,2}=0"));
  set(Condition::kVC, contraction3(FC, vphi, m_norm), {std::abs(c.I), "I=0"});
  set(Condition::kPhiT, contraction4(FT, dphi, m_norm), either(c.I_v2, "I_{;2}=0", out.m_dphi, "m.dphi=0"));
  set(Condition::kHPhiT, contraction4(FT, hphi, m_norm), either(c.I_v2, "I_{;2}=0", c.phi_h2, "phi_{,2}=0"));
  set(Condition::kVPhiT, contraction4(FT, vphi, m_norm), {std::abs(c.I_v2), "I_{;2}=0"});
  v[static_cast<std::size_t>(Condition::kVPhiT)].literal = std::abs(c.I);

  if (c.frame_applicable) {
    // Barred tensors from the direct recomputation on F-bar.
    const double Fbar = T.F.value();
    const double mbar_norm = norm2(T.frame().m_lo);
    const Tensor3 FCbar = scaled(raise_first(T, cartan_values(T)), Fbar);
    const Tensor4& FTbar = c.direct.T13;
    const auto& f = c.formula;
    set(Condition::kCbar, contraction3(FCbar, dphi, mbar_norm),
        either(f.I_bar, "I-bar=0", m_diff, "m.dphi=eps phi_{;2} l.dphi"));
    set(Condition::kHCbar, contraction3(FCbar, hphi, mbar_norm),
        either(f.I_bar, "I-bar=0", h_diff, "phi_{,2}=phi_{;2} phi_{,1}"));
    set(Condition::kVCbar, contraction3(FCbar, vphi, mbar_norm), {std::abs(f.I_bar), "I-bar=0"});
    set(Condition::kPhiTbar, contraction4(FTbar, dphi, mbar_norm),
        either(f.I_v2, "I-bar_{;2}=0", m_diff, "m.dphi=eps phi_{;2} l.dphi"));
    v[static_cast<std::size_t>(Condition::kPhiTbar)].literal = either(f.I_v2, "", out.m_dphi, "").first;
    set(Condition::kHPhiTbar, contraction4(FTbar, hphi, mbar_norm),
        either(f.I_v2, "I-bar_{;2}=0", h_diff, "phi_{,2}=phi_{;2} phi_{,1}"));
    set(Condition::kVPhiTbar, contraction4(FTbar, vphi, mbar_norm), {std::abs(f.I_v2), "I-bar_{;2}=0"});
  } else {
    for (Condition k : {Condition::kCbar, Condition::kHCbar, Condition::kVCbar, Condition::kPhiTbar,
                        Condition::kHPhiTbar, Condition::kVPhiTbar}) {
      v[static_cast<std::size_t>(k)].applicable = false;
    }
  }

  const Vec2 G = vals(B.G);
  const double Gm = G[0] * fr.m_lo[0] + G[1] * fr.m_lo[1];
  const double Gl = G[0] * fr.l_lo[0] + G[1] * fr.l_lo[1];
  const double wb = weakly_berwald_quantity(B);
  out.identity_a = scaled_diff(F2 * out.l_dphi, F2 * c.phi_h1 + 2.0 * Gm * c.phi_v2);
  out.identity_b = scaled_diff(F * out.m_dphi, e * F * c.phi_h2 + wb * c.phi_v2);
  out.prop_m = scaled_diff(c.phi_h2, -c.phi_v2 * Gm / F2);
  out.prop_l = scaled_diff(c.phi_h2, -c.phi_v2 * Gl / F2);

  const auto first_integral = [&](const Jet& f) {
    double y_dx = 0.0, g_dy = 0.0;
    for (int i = 0; i < 2; ++i) {
      y_dx += p.y[i] * f.derivative(i).value();
      g_dy += 2.0 * G[i] * f.derivative(2 + i).value();
    }
    return std::abs(spray_apply(B, f).value()) / std::max({1.0, std::abs(y_dx), std::abs(g_dy)});
  };
  out.first_integral_phi = first_integral(phi);
  out.first_integral_phi_v2 = first_integral(vert_m(B, phi));

  out.conf = std::move(an.values);
  return out;
}

void require_proper(const std::vector<PointEvaluation>& pts, const Tolerances& tol) {
  for (const auto& p : pts) {
    if (std::abs(p.conf.phi_v2) >= tol.zero || std::abs(p.dphi[0]) >= tol.zero || std::abs(p.dphi[1]) >= tol.zero) {
      return;
    }
  }
  throw ImproperFactor("factor is constant on the samples (homothety); the audit needs a non-constant factor");
}

Audit audit(const std::vector<PointEvaluation>& pts, const Tolerances& tol) {
  const std::size_t n = pts.size();
  Audit a;
  for (std::size_t ci = 0; ci < kConditionCount; ++ci) {
    const auto cond = static_cast<Condition>(ci);
    Series lhs = series("contraction", n), rhs = series("characterization", n);
    std::size_t skipped = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& v = pts[k].conditions[ci];
      if (!v.applicable || (is_vertical(cond) && std::abs(pts[k].conf.phi_v2) < tol.zero)) {
        ++skipped;
        continue;
      }
      lhs.values[k] = v.contraction;
      rhs.values[k] = v.characterization;
      rhs.branches[k] = v.branch;
    }
    ConditionReport r = make_report(condition_name(cond), lhs, &rhs, true, tol);
    if (skipped) {
      r.note = std::to_string(skipped) + (is_vertical(cond) ? " point(s) skipped: phi_{;2} = 0 or frame unavailable"
                                                             : " point(s) skipped: barred frame unavailable");
    }
    a.conditions.push_back(std::move(r));
  }
  for (Condition row : kTableRows) {
    a.table.push_back(a.condition(row));
    a.table_agrees = a.table_agrees && a.table.back().agree;
  }

  auto literal = [&](Condition cond, const char* name, const char* label, const char* note) {
    Series lhs = series("contraction", n), rhs = series(label, n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& v = pts[k].conditions[static_cast<std::size_t>(cond)];
      if (!v.applicable || (is_vertical(cond) && std::abs(pts[k].conf.phi_v2) < tol.zero)) continue;
      lhs.values[k] = v.contraction;
      rhs.values[k] = v.literal;
    }
    ConditionReport r = make_report(name, lhs, &rhs, true, tol);
    r.note = note;
    return r;
  };
  a.phiTbar_table_literal = literal(Condition::kPhiTbar, "phiT-bar (table literal)", "min(|I-bar_{;2}|, |m.dphi|)",
                                    "table scalar branch m.dphi = 0 instead of m.dphi = eps phi_{;2} l.dphi");
  a.vphiT_table_literal =
      literal(Condition::kVPhiT, "v-phiT (table literal)", "|I|", "table column 'F Riemannian' instead of I_{;2} = 0");

  auto scalar = [&](const char* name, const char* label, double PointEvaluation::*field, const char* note) {
    Series s = series(label, n);
    for (std::size_t k = 0; k < n; ++k) s.values[k] = pts[k].*field;
    ConditionReport r = make_report(name, s, nullptr, false, tol);
    r.note = note;
    return r;
  };
  a.identity_a = scalar("identity (a)", "F^2 l.dphi - F^2 phi_{,1} - 2 G^k phi_{;2} m_k",
                        &PointEvaluation::identity_a, "");
  a.identity_b = scalar("identity (b)", "F m.dphi - eps F phi_{,2} - G^i_k phi_{;2} m^k m_i",
                        &PointEvaluation::identity_b, "");
  a.prop_branch_m = scalar("h-branch with G^k m_k", "phi_{,2} + phi_{;2} G^k m_k / F^2", &PointEvaluation::prop_m,
                           "reported only; the two written forms of this branch differ");
  a.prop_branch_l = scalar("h-branch with G^k l_k", "phi_{,2} + phi_{;2} G^k l_k / F^2", &PointEvaluation::prop_l,
                           "reported only; the two written forms of this branch differ");
  a.first_integral_phi = scalar("first_integral(phi)", "|S phi| / scale", &PointEvaluation::first_integral_phi, "");
  a.first_integral_phi_v2 =
      scalar("first_integral(phi_{;2})", "|S phi_{;2}| / scale", &PointEvaluation::first_integral_phi_v2, "");

  // Landsberg base satisfying phiT with m.dphi bounded away from zero must be Berwald.
  std::vector<GeometryFlags> base;
  double max_mdphi = 0.0;
  for (const auto& p : pts) {
    base.push_back(p.base);
    max_mdphi = std::max(max_mdphi, std::abs(p.m_dphi));
  }
  const Classification cls = classify(base, tol);
  a.theorem.premise = cls.landsberg.verdict == Verdict::kHolds &&
                      a.condition(Condition::kPhiT).verdict == Verdict::kHolds && max_mdphi > tol.fail;
  a.theorem.berwald = cls.berwald.verdict;
  if (!a.theorem.premise) {
    a.theorem.status = "vacuous";
  } else {
    a.theorem.status = cls.berwald.verdict == Verdict::kFails ? "violated" : "confirmed";
  }
  return a;
}

VectorField parse_vector_field(const std::string& text, const std::vector<std::string>& params) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
    throw std::invalid_argument("vector field needs two components 'X1,X2'");
  }
  VectorField X{parse(text.substr(0, comma), params), parse(text.substr(comma + 1), params)};
  for (const Expr* e : {&X.x1, &X.x2}) {
    if (e->depends_on(kY1) || e->depends_on(kY2)) {
      throw std::invalid_argument("vector field components must depend on x1, x2 only");
    }
  }
  return X;
}

ConditionReport semi_concurrent(const Surface& surface, const VectorField& X, const std::vector<SamplePoint>& points,
                                const Tolerances& tol) {
  const std::size_t n = points.size();
  Series lhs = series("|X^i C_ijk| F / (|X| |m|^2)", n);
  Series rhs = series("|I|", n);
  bool nonzero = false;
  for (std::size_t k = 0; k < n; ++k) {
    const Geometry geo = surface.geometry(points[k]);
    const Vec2 x{evaluate(X.x1, points[k].coords(), surface.params()),
                 evaluate(X.x2, points[k].coords(), surface.params())};
    const double xn = norm2(x);
    rhs.values[k] = std::abs(geo.I.value());
    if (xn < 1e-12) continue;
    nonzero = true;
    const double m_norm = norm2(vals(geo.m_lo));
    const Tensor3 C = cartan_values(geo);
    double worst = 0.0;
    for (int j = 0; j < 2; ++j)
      for (int kk = 0; kk < 2; ++kk) worst = std::max(worst, std::abs(x[0] * C[0][j][kk] + x[1] * C[1][j][kk]));
    lhs.values[k] = geo.F.value() * worst / (xn * m_norm * m_norm);
  }
  if (!nonzero) throw std::invalid_argument("vector field vanishes at every sample point");
  ConditionReport r = make_report("semi_concurrent", lhs, &rhs, true, tol);
  r.note = "holds with nonzero X requires a Riemannian metric";
  return r;
}

}  // namespace anicon
