#include "anicon/surface.hpp"

#include <algorithm>
#include <cmath>

namespace anicon {

namespace {

double frob(const Mat2& m) {
  return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]);
}

Mat2 values(const JetMat2& m) {
  return {{{m[0][0].value(), m[0][1].value()}, {m[1][0].value(), m[1][1].value()}}};
}

Vec2 values(const JetVec2& v) { return {v[0].value(), v[1].value()}; }

}  // namespace

Jet Geometry::constant(double v) const { return Jet(point, order(), v); }

Geometry Geometry::from_jet(const Jet& F) {
  const int K = F.order();
  if (K < 4) throw OrderError("metric jet order must be at least 4");
  Geometry geo;
  geo.point = F.base();
  if (!(F.value() > 0.0)) throw InadmissiblePoint("F is not positive");
  geo.F = F;
  geo.F2 = F * F;
  for (int i = 0; i < 2; ++i) geo.y[i] = Jet::variable(2 + i, geo.point, K);

  const JetVec2 dF2{geo.F2.derivative(2), geo.F2.derivative(3)};
  geo.g[0][0] = 0.5 * dF2[0].derivative(2);
  geo.g[0][1] = 0.5 * dF2[0].derivative(3);
  geo.g[1][0] = geo.g[0][1];
  geo.g[1][1] = 0.5 * dF2[1].derivative(3);
  geo.det_g = geo.g[0][0] * geo.g[1][1] - geo.g[0][1] * geo.g[0][1];

  const Mat2 gv = values(geo.g);
  const double gscale = std::max({std::abs(gv[0][0]), std::abs(gv[0][1]), std::abs(gv[1][1])});
  if (!(std::abs(geo.det_g.value()) > 1e-12 * gscale * gscale)) {
    throw InadmissiblePoint("degenerate fundamental tensor");
  }
  const Jet inv_det = reciprocal(geo.det_g);
  geo.g_inv[0][0] = geo.g[1][1] * inv_det;
  geo.g_inv[0][1] = -geo.g[0][1] * inv_det;
  geo.g_inv[1][0] = geo.g_inv[0][1];
  geo.g_inv[1][1] = geo.g[0][0] * inv_det;

  const Jet inv_F = reciprocal(F);
  for (int i = 0; i < 2; ++i) {
    geo.l_lo[i] = F.derivative(2 + i);
    geo.l_hi[i] = geo.y[i] * inv_F;
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) geo.h[i][j] = geo.g[i][j] - geo.l_lo[i] * geo.l_lo[j];
  }

  const Mat2 hv = values(geo.h);
  const double trace = hv[0][0] + hv[1][1];
  const double hnorm = frob(hv);
  if (!(hnorm > 0.0) || trace == 0.0) throw InadmissiblePoint("angular metric vanishes");
  geo.eps = trace > 0.0 ? 1 : -1;
  if ((geo.det_g.value() > 0.0 ? 1 : -1) != geo.eps) {
    throw InadmissiblePoint("signature of g inconsistent with angular metric");
  }
  const double hdet = hv[0][0] * hv[1][1] - hv[0][1] * hv[1][0];
  const double disc = std::sqrt(std::max(0.0, trace * trace - 4.0 * hdet));
  const double lambda_min = std::min(std::abs(0.5 * (trace + disc)), std::abs(0.5 * (trace - disc)));
  if (lambda_min >= 1e-8 * hnorm) throw InadmissiblePoint("angular metric is not rank one");

  // h_ij = eps m_i m_j; solve from the dominant diagonal entry.
  const int p = std::abs(hv[0][0]) >= std::abs(hv[1][1]) ? 0 : 1;
  const int q = 1 - p;
  geo.m_lo[p] = sqrt(geo.eps * geo.h[p][p]);
  geo.m_lo[q] = geo.eps * geo.h[p][q] / geo.m_lo[p];
  const double mmax = std::max(std::abs(geo.m_lo[0].value()), std::abs(geo.m_lo[1].value()));
  for (int i = 0; i < 2; ++i) {
    const double c = geo.m_lo[i].value();
    if (std::abs(c) > 1e-12 * mmax) {
      if (c < 0.0) {
        geo.m_lo[0] = -geo.m_lo[0];
        geo.m_lo[1] = -geo.m_lo[1];
      }
      break;
    }
  }
  for (int i = 0; i < 2; ++i) {
    geo.m_hi[i] = geo.g_inv[i][0] * geo.m_lo[0] + geo.g_inv[i][1] * geo.m_lo[1];
  }

  const Jet c000 = 0.5 * geo.g[0][0].derivative(2);
  const Jet c001 = 0.5 * geo.g[0][0].derivative(3);
  const Jet c011 = 0.5 * geo.g[0][1].derivative(3);
  const Jet c111 = 0.5 * geo.g[1][1].derivative(3);
  geo.C[0][0][0] = c000;
  geo.C[0][0][1] = geo.C[0][1][0] = geo.C[1][0][0] = c001;
  geo.C[0][1][1] = geo.C[1][0][1] = geo.C[1][1][0] = c011;
  geo.C[1][1][1] = c111;

  const Jet& a = geo.m_hi[0];
  const Jet& b = geo.m_hi[1];
  const Jet a2 = a * a;
  const Jet b2 = b * b;
  geo.I = geo.eps * F * (c000 * a2 * a + 3.0 * c001 * a2 * b + 3.0 * c011 * a * b2 + c111 * b2 * b);

  const double Fv = F.value();
  const double Iv = geo.I.value();
  const Vec2 mv = values(geo.m_lo);
  const double mnorm = std::hypot(mv[0], mv[1]);
  double cartan_residual = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        const double r = Fv * geo.C[i][j][k].value() - Iv * mv[i] * mv[j] * mv[k];
        cartan_residual = std::max(cartan_residual, std::abs(r));
      }
    }
  }
  if (!(cartan_residual <= 1e-8 * (1.0 + std::abs(Iv)) * std::max(1.0, mnorm * mnorm * mnorm))) {
    throw InadmissiblePoint("Cartan tensor inconsistent with the main scalar");
  }

  // G^i = 1/4 g^{ik} (y^m d_m dot-d_k F^2 - d_k F^2)
  JetVec2 w;
  for (int k = 0; k < 2; ++k) {
    w[k] = geo.y[0] * dF2[k].derivative(0) + geo.y[1] * dF2[k].derivative(1) -
           geo.F2.derivative(k);
  }
  for (int i = 0; i < 2; ++i) geo.G[i] = 0.25 * (geo.g_inv[i][0] * w[0] + geo.g_inv[i][1] * w[1]);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) geo.Gconn[i][j] = geo.G[j].derivative(2 + i);
  }

  // R^i_k = 2 d_k G^i - y^j dot-d_k d_j G^i + 2 G^j dot-d_j dot-d_k G^i
  //         - dot-d_j G^i dot-d_k G^j
  Jet R;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      Jet Rik = 2.0 * geo.G[i].derivative(k);
      for (int j = 0; j < 2; ++j) {
        Rik -= geo.y[j] * geo.G[i].derivative(j).derivative(2 + k);
        Rik += 2.0 * geo.G[j] * geo.Gconn[k][i].derivative(2 + j);
        Rik -= geo.Gconn[j][i] * geo.Gconn[k][j];
      }
      const Jet term = Rik * geo.m_lo[i] * geo.m_hi[k];
      R = R.empty() ? term : R + term;
    }
  }
  geo.R = geo.eps * R * reciprocal(geo.F2);
  return geo;
}

FundamentalData Geometry::fundamental() const {
  FundamentalData d;
  d.F = F.value();
  d.g = values(g);
  d.g_inv = values(g_inv);
  d.det_g = det_g.value();
  d.h = values(h);
  return d;
}

BerwaldFrame Geometry::frame() const {
  BerwaldFrame f;
  f.l_lo = values(l_lo);
  f.l_hi = values(l_hi);
  f.m_lo = values(m_lo);
  f.m_hi = values(m_hi);
  f.eps = eps;
  return f;
}

SprayData Geometry::spray() const {
  SprayData s;
  s.G = values(G);
  s.Gconn = values(Gconn);
  s.R = R.value();
  return s;
}

Jet vertical(const Geometry&, const Jet& f, int i) { return f.derivative(2 + i); }

Jet vert_l(const Geometry& geo, const Jet& f) {
  return geo.y[0] * f.derivative(2) + geo.y[1] * f.derivative(3);
}

Jet vert_m(const Geometry& geo, const Jet& f) {
  return geo.eps * geo.F * (f.derivative(2) * geo.m_hi[0] + f.derivative(3) * geo.m_hi[1]);
}

Jet delta(const Geometry& geo, const Jet& f, int i) {
  return f.derivative(i) - geo.Gconn[i][0] * f.derivative(2) - geo.Gconn[i][1] * f.derivative(3);
}

Jet horiz_l(const Geometry& geo, const Jet& f) {
  return delta(geo, f, 0) * geo.l_hi[0] + delta(geo, f, 1) * geo.l_hi[1];
}

Jet horiz_m(const Geometry& geo, const Jet& f) {
  return geo.eps * (delta(geo, f, 0) * geo.m_hi[0] + delta(geo, f, 1) * geo.m_hi[1]);
}

Jet spray_apply(const Geometry& geo, const Jet& f) {
  return geo.y[0] * f.derivative(0) + geo.y[1] * f.derivative(1) -
         2.0 * (geo.G[0] * f.derivative(2) + geo.G[1] * f.derivative(3));
}

double contract_l(const Geometry& geo, const Vec2& v) {
  return v[0] * geo.l_hi[0].value() + v[1] * geo.l_hi[1].value();
}

double contract_m(const Geometry& geo, const Vec2& v) {
  return v[0] * geo.m_hi[0].value() + v[1] * geo.m_hi[1].value();
}

Tensor3 cartan_values(const Geometry& geo) {
  Tensor3 c{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) c[i][j][k] = geo.C[i][j][k].value();
    }
  }
  return c;
}

Tensor3 raise_first(const Geometry& geo, const Tensor3& t) {
  const Mat2 gi = values(geo.g_inv);
  Tensor3 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) out[i][j][k] = gi[i][0] * t[0][j][k] + gi[i][1] * t[1][j][k];
    }
  }
  return out;
}

Tensor4 raise_first(const Geometry& geo, const Tensor4& t) {
  const Mat2 gi = values(geo.g_inv);
  Tensor4 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        for (int r = 0; r < 2; ++r) out[i][j][k][r] = gi[i][0] * t[0][j][k][r] + gi[i][1] * t[1][j][k][r];
      }
    }
  }
  return out;
}

Tensor4 t_tensor(const Geometry& geo) {
  const Tensor3 c = cartan_values(geo);
  const Tensor3 cu = raise_first(geo, c);  // C^r_hk
  const Vec2 l = values(geo.l_lo);
  const double F = geo.F.value();
  Tensor4 t{};
  for (int h = 0; h < 2; ++h) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
          double cov = geo.C[h][i][j].derivative(2 + k).value();
          for (int r = 0; r < 2; ++r) {
            cov -= c[r][i][j] * cu[r][h][k] + c[h][r][j] * cu[r][i][k] + c[h][i][r] * cu[r][j][k];
          }
          t[h][i][j][k] = F * cov + c[h][i][j] * l[k] + c[h][i][k] * l[j] + c[h][j][k] * l[i] +
                          c[i][j][k] * l[h];
        }
      }
    }
  }
  return t;
}

HamelResidual hamel_residual(const Geometry& geo) {
  HamelResidual r;
  r.hamel = geo.F.derivative(1).derivative(2).value() - geo.F.derivative(0).derivative(3).value();
  r.Gm = geo.G[0].value() * geo.m_lo[0].value() + geo.G[1].value() * geo.m_lo[1].value();
  return r;
}

double weakly_berwald_quantity(const Geometry& geo) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      s += geo.Gconn[k][i].value() * geo.m_hi[k].value() * geo.m_lo[i].value();
    }
  }
  return s;
}

CommutationResidual commutation(const Geometry& geo, const Jet& f) {
  const Jet f1 = horiz_l(geo, f);
  const Jet f2 = horiz_m(geo, f);
  const Jet fv = vert_m(geo, f);
  const double I1 = horiz_l(geo, geo.I).value();

  CommutationResidual c;
  c.f_v2 = fv.value();
  c.first_lhs = horiz_m(geo, f1).value() - horiz_l(geo, f2).value();
  c.first_rhs = -geo.R.value() * c.f_v2;
  c.second_lhs = vert_m(geo, f1).value() - horiz_l(geo, fv).value();
  c.second_rhs = f2.value();
  c.third_lhs = vert_m(geo, f2).value() - horiz_m(geo, fv).value();
  c.third_rhs = -geo.eps * (f1.value() + geo.I.value() * f2.value() + I1 * c.f_v2);
  return c;
}

Surface::Surface(Expr metric, ParamList params, int order)
    : metric_(std::move(metric)), params_(std::move(params)), order_(order) {
  validate_params(params_);
  if (order_ < 4 || order_ > kMaxJetOrder) {
    throw std::invalid_argument("jet order must lie in [4, " + std::to_string(kMaxJetOrder) + "]");
  }
  for (const auto& name : metric_.parameters()) {
    bool bound = false;
    for (const auto& p : params_) bound = bound || p.name == name;
    if (!bound) throw std::invalid_argument("unbound parameter '" + name + "' in metric");
  }
}

Jet Surface::metric_jet(const SamplePoint& p) const {
  return eval_jet(metric_, p.coords(), order_, params_);
}

Geometry Surface::geometry(const SamplePoint& p) const { return Geometry::from_jet(metric_jet(p)); }

Jet Surface::field(const Expr& f, const SamplePoint& p) const {
  return eval_jet(f, p.coords(), order_, params_);
}

}  // namespace anicon
