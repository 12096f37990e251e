#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace anicon {

/// Independent variables of every jet, in slot order: x1, x2, y1, y2.
inline constexpr int kJetVars = 4;

/// Largest truncation order the shared index tables are built for.
inline constexpr int kMaxJetOrder = 12;

inline constexpr int kDefaultJetOrder = 6;

using MultiIndex = std::array<int, kJetVars>;
using Point4 = std::array<double, kJetVars>;

/// An elementary function was applied outside its domain (sqrt or ln of a
/// non-positive value, division by zero, non-finite result).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derivative or partial was requested beyond the truncation order.
class OrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of multi-indices alpha with |alpha| <= order.
std::size_t monomial_count(int order);

/// Position of alpha in the graded ordering shared by all jets. Jets of
/// lower order store a prefix of the coefficient array of higher ones.
std::size_t monomial_index(const MultiIndex& alpha);

const MultiIndex& monomial(std::size_t index);

/// Truncated multivariate Taylor expansion of a scalar at a base point.
///
/// Coefficients are stored divided by alpha!, so coeff(alpha) is the
/// Taylor coefficient and partial(alpha) the mixed partial derivative.
/// Binary operations require equal base points; the result carries the
/// smaller of the two orders. A default-constructed jet is empty and
/// rejects every operation.
class Jet {
 public:
  Jet() = default;

  /// Constant jet.
  Jet(const Point4& base, int order, double value);

  /// Coordinate function `index` expanded at `base`.
  static Jet variable(int index, const Point4& base, int order);

  /// Jet with the given Taylor coefficients in graded order; `coeffs`
  /// must hold monomial_count(order) finite values.
  static Jet from_coeffs(const Point4& base, int order, std::vector<double> coeffs);

  int order() const noexcept { return order_; }
  bool empty() const noexcept { return order_ < 0; }
  const Point4& base() const noexcept { return base_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  double value() const;
  double coeff(const MultiIndex& alpha) const;
  double partial(const MultiIndex& alpha) const;

  /// Exact partial derivative along one variable; the order drops by one.
  Jet derivative(int var) const;

  Jet truncated(int order) const;

  Jet operator-() const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);
  Jet& operator/=(double rhs);

  friend Jet operator*(const Jet& a, const Jet& b);

  /// Composes the univariate Taylor series `series` (coefficients of
  /// (t - value())^n / 1, n = 0..order) with this jet.
  Jet compose(std::span<const double> series) const;

 private:
  void require_valid(const char* what) const;

  Point4 base_{};
  int order_ = -1;
  std::vector<double> coeffs_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double b);
Jet operator+(double a, Jet b);
Jet operator-(Jet a, double b);
Jet operator-(double a, const Jet& b);
Jet operator*(Jet a, double b);
Jet operator*(double a, Jet b);
Jet operator/(Jet a, double b);
Jet operator/(double a, const Jet& b);

Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet reciprocal(const Jet& a);

/// Plain-double versions with the same domain rules as the jet overloads.
double checked_sqrt(double v);
double checked_log(double v);
double checked_pow(double v, double exponent);
double checked_div(double a, double b);

}  // namespace anicon
