#include "anicon/catalog.hpp"

#include "anicon/finsler_sphere.hpp"

namespace anicon {

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {"euclidean", "sqrt(y1^2+y2^2)", {}, {0.0, 1.0, 0.0, 1.0}, "flat Euclidean plane"},
      {"riemannian-sphere", sphere::kMetric, {}, sphere::kBox, "round unit sphere in (theta, eta)"},
      {"finsler-sphere", sphere::kRanders, {{"a", 0.5}}, sphere::kBox,
       "Randers sphere of flag curvature 1, Finsler parameter a in [0, 1)"},
      {"minkowski-randers", "sqrt(y1^2+y2^2)+0.3*y1", {}, {0.0, 1.0, 0.0, 1.0},
       "non-quadratic locally Minkowski (Berwald, I not zero)"},
      {"polar-minkowski-randers", "sqrt(y1^2+x1^2*y2^2)+b*(cos(x2)*y1 - x1*sin(x2)*y2)", {{"b", 0.3}},
       {0.5, 2.0, 0.0, 6.283185307179586}, "minkowski-randers with b = 0.3 written in polar coordinates"},
  };
  return entries;
}

std::optional<CatalogEntry> find_metric(const std::string& name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return e;
  }
  return std::nullopt;
}

}  // namespace anicon
