#include "anicon/conformal.hpp"

#include <algorithm>
#include <cmath>

namespace anicon {

namespace {

constexpr std::array<double, 3> kHomogeneityScales{0.5, 2.0, 3.0};

Vec2 vals(const JetVec2& v) { return {v[0].value(), v[1].value()}; }

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

void check_homogeneous(const Factor& factor, const Surface& s, const SamplePoint& p) {
  if (factor.is_main_scalar()) return;
  const double phi0 = evaluate(factor.expr, p.coords(), s.params());
  for (double lambda : kHomogeneityScales) {
    SamplePoint q = p;
    q.y = {lambda * p.y[0], lambda * p.y[1]};
    const double phi = evaluate(factor.expr, q.coords(), s.params());
    if (std::abs(phi - phi0) > 1e-8 * std::max(1.0, std::abs(phi0))) {
      throw FactorError("factor is not 0-homogeneous in y");
    }
  }
}

// Derivative of I-bar = sqrt(eps rho) (I + 2 eps phi_{;2} - eps rho_{;2}/(2 rho))
// along a derivation D, given D rho, D I, D phi_{;2} and D rho_{;2}.
double ibar_derivative(const ConformalPoint& c, double root, double d_rho, double d_I, double d_phi_v2,
                       double d_rho_v2) {
  const double e = c.eps;
  return root / (2.0 * c.rho) *
         (d_rho * (c.I + 2.0 * e * c.phi_v2 + 0.5 * e * c.rho_v2 / c.rho) +
          2.0 * c.rho * (d_I + 2.0 * e * d_phi_v2) - e * d_rho_v2);
}

void formula_path(ConformalPoint& c, const Geometry& B, const Jet& phi) {
  const double e = B.eps;
  const Jet phi_v2 = vert_m(B, phi);
  const Jet phi_v2v2 = vert_m(B, phi_v2);
  const Jet phi_h1 = horiz_l(B, phi);
  const Jet phi_h2 = horiz_m(B, phi);
  const Jet phi_h1v2 = vert_m(B, phi_h1);

  const Jet sigma = phi_v2v2 + e * B.I * phi_v2 + 2.0 * phi_v2 * phi_v2;
  const Jet adm = sigma + e - phi_v2 * phi_v2;
  const double scale = std::max({1.0, std::abs(sigma.value()), phi_v2.value() * phi_v2.value()});
  if (std::abs(adm.value()) < 1e-12 * scale) {
    throw InadmissiblePoint("eps + sigma - phi_{;2}^2 vanishes");
  }
  const Jet rho = reciprocal(adm);
  const Jet rho_v2 = vert_m(B, rho);

  const Jet F2 = B.F2;
  const Jet bracket = phi_v2 * phi_h1 + phi_h1v2 - 2.0 * phi_h2;
  const Jet Q = 0.5 * e * rho * F2 * bracket;
  const Jet P = 0.5 * (F2 * phi_h1 - rho * F2 * phi_v2 * bracket);

  c.eps = B.eps;
  c.F = B.F.value();
  c.I = B.I.value();
  c.phi = phi.value();
  c.phi_v2 = phi_v2.value();
  c.phi_v2v2 = phi_v2v2.value();
  c.phi_h1 = phi_h1.value();
  c.phi_h2 = phi_h2.value();
  c.phi_h1v2 = phi_h1v2.value();
  c.phi_v2h1 = horiz_l(B, phi_v2).value();
  c.phi_v2h2 = horiz_m(B, phi_v2).value();
  c.sigma = sigma.value();
  c.admissibility = adm.value();
  c.rho = rho.value();
  c.rho_v2 = rho_v2.value();
  c.rho_v2v2 = vert_m(B, rho_v2).value();
  c.rho_h1 = horiz_l(B, rho).value();
  c.rho_h2 = horiz_m(B, rho).value();
  c.rho_v2h1 = horiz_l(B, rho_v2).value();
  c.rho_v2h2 = horiz_m(B, rho_v2).value();
  c.Q_v2 = vert_m(B, Q).value();
  c.I_v2 = vert_m(B, B.I).value();
  c.I_h1 = horiz_l(B, B.I).value();
  c.I_h2 = horiz_m(B, B.I).value();

  auto& f = c.formula;
  f.Q = Q.value();
  f.P = P.value();
  f.rho = c.rho;
  const double F2v = F2.value();
  c.rho_identity = c.rho * (c.sigma + e - c.phi_v2 * c.phi_v2) - 1.0;
  c.qp_identity = 2.0 * e * c.phi_v2 * f.Q + 2.0 * f.P - F2v * c.phi_h1;
  c.qp_scale = std::max({1.0, std::abs(2.0 * c.phi_v2 * f.Q), std::abs(2.0 * f.P), std::abs(F2v * c.phi_h1)});

  const BerwaldFrame fr = B.frame();
  const Vec2 G = vals(B.G);
  for (int i = 0; i < 2; ++i) f.G_bar[i] = G[i] + f.Q * fr.m_hi[i] + f.P * fr.l_hi[i];

  c.frame_applicable = e * c.rho > 0.0;
  if (!c.frame_applicable) return;

  const double ephi = std::exp(c.phi);
  const double root = std::sqrt(e * c.rho);      // sqrt(eps rho)
  const double root_inv = std::sqrt(e / c.rho);  // sqrt(eps / rho)
  f.eps_bar = e > 0 ? 1 : -1;
  for (int i = 0; i < 2; ++i) {
    f.l_lo[i] = ephi * (fr.l_lo[i] + c.phi_v2 * fr.m_lo[i]);
    f.l_hi[i] = fr.l_hi[i] / ephi;
    f.m_lo[i] = ephi * root_inv * fr.m_lo[i];
    f.m_hi[i] = root / ephi * (fr.m_hi[i] - e * c.phi_v2 * fr.l_hi[i]);
  }
  f.I_bar = root * (c.I + 2.0 * e * c.phi_v2 - 0.5 * e * c.rho_v2 / c.rho);
  f.I_v2 = ibar_derivative(c, root, c.rho_v2, c.I_v2, c.phi_v2v2, c.rho_v2v2);
  f.I_h1 = ibar_derivative(c, root, c.rho_h1, c.I_h1, c.phi_v2h1, c.rho_v2h1);
  f.I_h2 = ibar_derivative(c, root, c.rho_h2, c.I_h2, c.phi_v2h2, c.rho_v2h2);
  f.I_vb = root * f.I_v2;
  f.I_ha = (f.I_h1 - 2.0 * e / F2v * f.Q * f.I_v2) / ephi;
  f.I_hb = root / ephi *
           (f.I_h2 - c.phi_v2 * f.I_h1 -
            e / F2v * (e * f.P + c.Q_v2 - e * c.I * f.Q - 2.0 * c.phi_v2 * f.Q) * f.I_v2);

  const double Fv = c.F;
  f.T_coeff = e * ephi * ephi * ephi / c.rho *
              (c.I_v2 / Fv + 1.0 / (2.0 * Fv * c.rho) *
                                 (4.0 * e * c.rho * c.phi_v2v2 +
                                  c.rho_v2 * (c.I + 2.0 * e * c.phi_v2 + e * c.rho_v2 / (2.0 * c.rho)) -
                                  e * c.rho_v2v2));

  // F-bar T-bar^i_jkr = e^{2 phi} sqrt(eps/rho) I-bar_{;2} (m^i - eps phi_{;2} l^i) m_j m_k m_r
  double t13_scale = 1.0;
  double t13_dev = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double up = fr.m_hi[i] - e * c.phi_v2 * fr.l_hi[i];
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        for (int r = 0; r < 2; ++r) {
          const double v = ephi * ephi * root_inv * f.I_v2 * up * fr.m_lo[j] * fr.m_lo[k] * fr.m_lo[r];
          f.T13[i][j][k][r] = v;
          const double alt = f.I_vb * f.m_hi[i] * f.m_lo[j] * f.m_lo[k] * f.m_lo[r];
          t13_scale = std::max({t13_scale, std::abs(v), std::abs(alt)});
          t13_dev = std::max(t13_dev, std::abs(v - alt));
        }
      }
    }
  }
  c.t13_consistency = t13_dev / t13_scale;
  c.vb_identity = f.I_vb - root * f.I_v2;
}

void direct_path(ConformalPoint& c, const Geometry& B, const Geometry& T, const Jet& phi) {
  auto& d = c.direct;
  const BerwaldFrame fr = B.frame();
  const BerwaldFrame tf = T.frame();
  d.eps_bar = T.eps;
  d.l_lo = tf.l_lo;
  d.l_hi = tf.l_hi;
  d.m_lo = tf.m_lo;
  d.m_hi = tf.m_hi;
  d.I_bar = T.I.value();
  d.G_bar = vals(T.G);
  const Vec2 G = vals(B.G);
  const Vec2 dG{d.G_bar[0] - G[0], d.G_bar[1] - G[1]};
  d.Q = B.eps * dot(dG, fr.m_lo);
  d.P = dot(dG, fr.l_lo);
  d.rho = B.eps * std::exp(4.0 * phi.value()) * B.det_g.value() / T.det_g.value();

  d.I_v2 = vert_m(B, T.I).value();
  d.I_h1 = horiz_l(B, T.I).value();
  d.I_h2 = horiz_m(B, T.I).value();
  d.I_vb = vert_m(T, T.I).value();
  d.I_ha = horiz_l(T, T.I).value();
  d.I_hb = horiz_m(T, T.I).value();

  const Tensor4 Tbar = t_tensor(T);
  double coeff = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e)
        for (int h = 0; h < 2; ++h) coeff += Tbar[a][b][e][h] * fr.m_hi[a] * fr.m_hi[b] * fr.m_hi[e] * fr.m_hi[h];
  d.T_coeff = coeff;
  const Tensor4 up = raise_first(T, Tbar);
  const double Fbar = T.F.value();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e)
        for (int h = 0; h < 2; ++h) d.T13[a][b][e][h] = Fbar * up[a][b][e][h];
}

void add(std::vector<Deviation>& out, std::string name, double a, double b) {
  out.push_back({std::move(name), a, b, relative_deviation(a, b)});
}

void compare(ConformalPoint& c) {
  auto& f = c.formula;
  auto& d = c.direct;
  auto& out = c.deviations;
  add(out, "rho", f.rho, d.rho);
  add(out, "Q", f.Q, d.Q);
  add(out, "P", f.P, d.P);
  add(out, "G_bar^1", f.G_bar[0], d.G_bar[0]);
  add(out, "G_bar^2", f.G_bar[1], d.G_bar[1]);
  if (!c.frame_applicable) return;

  c.sign = dot(f.m_lo, d.m_lo) >= 0.0 ? 1 : -1;
  const double s = c.sign;
  // Quantities odd in the sign of m-bar.
  for (int i = 0; i < 2; ++i) {
    d.m_lo[i] *= s;
    d.m_hi[i] *= s;
  }
  d.I_bar *= s;
  d.I_v2 *= s;
  d.I_h1 *= s;
  d.I_h2 *= s;
  d.I_ha *= s;

  add(out, "eps_bar", f.eps_bar, d.eps_bar);
  const char* idx[2] = {"1", "2"};
  for (int i = 0; i < 2; ++i) {
    add(out, std::string("l_bar_") + idx[i], f.l_lo[i], d.l_lo[i]);
    add(out, std::string("l_bar^") + idx[i], f.l_hi[i], d.l_hi[i]);
    add(out, std::string("m_bar_") + idx[i], f.m_lo[i], d.m_lo[i]);
    add(out, std::string("m_bar^") + idx[i], f.m_hi[i], d.m_hi[i]);
  }
  add(out, "I_bar", f.I_bar, d.I_bar);
  add(out, "I_bar;2", f.I_v2, d.I_v2);
  add(out, "I_bar,1", f.I_h1, d.I_h1);
  add(out, "I_bar,2", f.I_h2, d.I_h2);
  add(out, "I_bar;b", f.I_vb, d.I_vb);
  add(out, "I_bar,a", f.I_ha, d.I_ha);
  add(out, "I_bar,b", f.I_hb, d.I_hb);
  add(out, "T_bar", f.T_coeff, d.T_coeff);
  double scale = 1.0, dev = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e)
        for (int h = 0; h < 2; ++h) {
          scale = std::max({scale, std::abs(f.T13[a][b][e][h]), std::abs(d.T13[a][b][e][h])});
          dev = std::max(dev, std::abs(f.T13[a][b][e][h] - d.T13[a][b][e][h]));
        }
  out.push_back({"T_bar(1,3)", 0.0, dev, dev / scale});
}

}  // namespace

double relative_deviation(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

ConformalChange::ConformalChange(const Surface& base, Factor factor) : base_(base), factor_(std::move(factor)) {
  int order = base.order();
  if (factor_.is_main_scalar()) {
    const int needed = std::max(order, kMinConformalOrder) + 3;
    if (needed > kMaxJetOrder) {
      throw std::invalid_argument("main-scalar factor needs metric jets of order " + std::to_string(needed) +
                                  ", above the supported maximum");
    }
    warnings_.push_back("metric jet order raised from " + std::to_string(order) + " to " +
                        std::to_string(needed) + " for the main-scalar factor");
    order = needed;
  } else {
    if (factor_.expr.empty()) throw FactorError("empty factor expression");
    for (const auto& name : factor_.expr.parameters()) {
      bool bound = false;
      for (const auto& p : base.params()) bound = bound || p.name == name;
      if (!bound) throw std::invalid_argument("unbound parameter '" + name + "' in factor");
    }
    if (order < kMinConformalOrder) {
      warnings_.push_back("jet order raised from " + std::to_string(order) + " to " +
                          std::to_string(kMinConformalOrder) + " for barred derivatives");
      order = kMinConformalOrder;
    }
  }
  if (order != base.order()) base_ = Surface(base.metric(), base.params(), order);
}

int ConformalChange::factor_order() const noexcept {
  return factor_.is_main_scalar() ? base_.order() - 3 : base_.order();
}

Jet ConformalChange::phi_jet(const Geometry& base_geo, const SamplePoint& p) const {
  if (factor_.is_main_scalar()) return base_geo.I;
  return base_.field(factor_.expr, p);
}

ConformalAnalysis ConformalChange::analyze(const SamplePoint& p) const {
  check_homogeneous(factor_, base_, p);
  Geometry B = base_.geometry(p);
  Jet phi = phi_jet(B, p);
  const Jet Fbar = exp(phi) * B.F.truncated(phi.order());
  Geometry T = Geometry::from_jet(Fbar);

  ConformalPoint c;
  c.point = p;
  formula_path(c, B, phi);
  direct_path(c, B, T, phi);
  compare(c);
  return {std::move(B), std::move(T), std::move(phi), std::move(c)};
}

LandsbergPrediction landsberg_prediction(const ConformalPoint& c) {
  const double F2 = c.F * c.F;
  return {-c.eps * c.rho * F2 * c.phi_h2, c.rho * F2 * c.phi_v2 * c.phi_h2};
}

}  // namespace anicon
