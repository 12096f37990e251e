#include "anicon/jet.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace anicon {

namespace {

constexpr int kStride = kMaxJetOrder + 1;

struct IndexTables {
  std::vector<MultiIndex> monomials;   // graded order
  std::vector<std::size_t> counts;     // counts[n] = #{|alpha| <= n}
  std::vector<std::int32_t> lookup;    // dense alpha -> position

  // Product pairs grouped by result position: pairs for result k live in
  // [pair_offsets[k], pair_offsets[k + 1]).
  std::vector<std::uint32_t> pair_offsets;
  std::vector<std::uint16_t> pair_lhs;
  std::vector<std::uint16_t> pair_rhs;

  // derivative_source[v][k]: position of monomial(k) + e_v.
  std::array<std::vector<std::uint16_t>, kJetVars> derivative_source;

  IndexTables() {
    lookup.assign(kStride * kStride * kStride * kStride, -1);
    for (int degree = 0; degree <= kMaxJetOrder; ++degree) {
      for (int a0 = degree; a0 >= 0; --a0) {
        for (int a1 = degree - a0; a1 >= 0; --a1) {
          for (int a2 = degree - a0 - a1; a2 >= 0; --a2) {
            const MultiIndex alpha{a0, a1, a2, degree - a0 - a1 - a2};
            lookup[key(alpha)] = static_cast<std::int32_t>(monomials.size());
            monomials.push_back(alpha);
          }
        }
      }
      counts.push_back(monomials.size());
    }

    pair_offsets.push_back(0);
    for (std::size_t k = 0; k < monomials.size(); ++k) {
      const MultiIndex& target = monomials[k];
      for (std::size_t i = 0; i <= k; ++i) {
        const MultiIndex& lhs = monomials[i];
        MultiIndex rest{};
        bool fits = true;
        for (int v = 0; v < kJetVars; ++v) {
          rest[v] = target[v] - lhs[v];
          fits = fits && rest[v] >= 0;
        }
        if (!fits) continue;
        pair_lhs.push_back(static_cast<std::uint16_t>(i));
        pair_rhs.push_back(static_cast<std::uint16_t>(lookup[key(rest)]));
      }
      pair_offsets.push_back(static_cast<std::uint32_t>(pair_lhs.size()));
    }

    for (int v = 0; v < kJetVars; ++v) {
      auto& source = derivative_source[v];
      for (std::size_t k = 0; k < counts[kMaxJetOrder - 1]; ++k) {
        MultiIndex up = monomials[k];
        ++up[v];
        source.push_back(static_cast<std::uint16_t>(lookup[key(up)]));
      }
    }
  }

  static std::size_t key(const MultiIndex& a) {
    return ((static_cast<std::size_t>(a[0]) * kStride + a[1]) * kStride + a[2]) * kStride + a[3];
  }
};

const IndexTables& tables() {
  static const IndexTables instance;
  return instance;
}

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw OrderError("jet order " + std::to_string(order) + " outside [0, " +
                     std::to_string(kMaxJetOrder) + "]");
  }
}

int degree_of(const MultiIndex& alpha) {
  int d = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("negative multi-index component");
    d += a;
  }
  return d;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

void require_finite(std::span<const double> coeffs, const char* what) {
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw DomainError(std::string(what) + ": non-finite jet coefficient");
  }
}

void require_same_base(const Jet& a, const Jet& b) {
  if (a.base() != b.base()) throw std::invalid_argument("jets expanded at different base points");
}

}  // namespace

std::size_t monomial_count(int order) {
  check_order(order);
  return tables().counts[order];
}

std::size_t monomial_index(const MultiIndex& alpha) {
  const int d = degree_of(alpha);
  if (d > kMaxJetOrder) throw OrderError("multi-index degree exceeds table order");
  return static_cast<std::size_t>(tables().lookup[IndexTables::key(alpha)]);
}

const MultiIndex& monomial(std::size_t index) { return tables().monomials.at(index); }

Jet::Jet(const Point4& base, int order, double value) : base_(base), order_(order) {
  check_order(order);
  coeffs_.assign(monomial_count(order), 0.0);
  coeffs_[0] = value;
}

Jet Jet::variable(int index, const Point4& base, int order) {
  if (index < 0 || index >= kJetVars) throw std::invalid_argument("variable index out of range");
  Jet j(base, order, base[index]);
  if (order >= 1) {
    MultiIndex e{};
    e[index] = 1;
    j.coeffs_[monomial_index(e)] = 1.0;
  }
  return j;
}

Jet Jet::from_coeffs(const Point4& base, int order, std::vector<double> coeffs) {
  check_order(order);
  if (coeffs.size() != monomial_count(order)) {
    throw std::invalid_argument("coefficient count does not match jet order");
  }
  require_finite(coeffs, "from_coeffs");
  Jet j;
  j.base_ = base;
  j.order_ = order;
  j.coeffs_ = std::move(coeffs);
  return j;
}

void Jet::require_valid(const char* what) const {
  if (empty()) throw OrderError(std::string(what) + ": empty jet (insufficient order upstream)");
}

double Jet::value() const {
  require_valid("value");
  return coeffs_[0];
}

double Jet::coeff(const MultiIndex& alpha) const {
  require_valid("coeff");
  if (degree_of(alpha) > order_) throw OrderError("coefficient beyond jet order");
  return coeffs_[monomial_index(alpha)];
}

double Jet::partial(const MultiIndex& alpha) const {
  double scale = 1.0;
  for (int a : alpha) scale *= factorial(a);
  return scale * coeff(alpha);
}

Jet Jet::derivative(int var) const {
  require_valid("derivative");
  if (var < 0 || var >= kJetVars) throw std::invalid_argument("variable index out of range");
  if (order_ == 0) throw OrderError("jet order insufficient for another derivative");
  Jet out;
  out.base_ = base_;
  out.order_ = order_ - 1;
  const std::size_t n = monomial_count(out.order_);
  out.coeffs_.resize(n);
  const auto& t = tables();
  const auto& source = t.derivative_source[var];
  for (std::size_t k = 0; k < n; ++k) {
    out.coeffs_[k] = (t.monomials[k][var] + 1) * coeffs_[source[k]];
  }
  return out;
}

Jet Jet::truncated(int order) const {
  require_valid("truncated");
  if (order > order_) throw OrderError("cannot raise jet order by truncation");
  Jet out = *this;
  out.order_ = order;
  out.coeffs_.resize(monomial_count(order));
  return out;
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& c : out.coeffs_) c = -c;
  return out;
}

Jet& Jet::operator+=(const Jet& rhs) {
  require_valid("add");
  rhs.require_valid("add");
  require_same_base(*this, rhs);
  if (rhs.order_ < order_) *this = truncated(rhs.order_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  require_valid("subtract");
  rhs.require_valid("subtract");
  require_same_base(*this, rhs);
  if (rhs.order_ < order_) *this = truncated(rhs.order_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.require_valid("multiply");
  b.require_valid("multiply");
  require_same_base(a, b);
  Jet out;
  out.base_ = a.base_;
  out.order_ = std::min(a.order_, b.order_);
  const std::size_t n = monomial_count(out.order_);
  out.coeffs_.resize(n);
  const auto& t = tables();
  const double* pa = a.coeffs_.data();
  const double* pb = b.coeffs_.data();
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::uint32_t p = t.pair_offsets[k]; p < t.pair_offsets[k + 1]; ++p) {
      sum += pa[t.pair_lhs[p]] * pb[t.pair_rhs[p]];
    }
    out.coeffs_[k] = sum;
  }
  return out;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }
Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet& Jet::operator+=(double rhs) {
  require_valid("add");
  coeffs_[0] += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) {
  require_valid("subtract");
  coeffs_[0] -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) {
  require_valid("scale");
  for (double& c : coeffs_) c *= rhs;
  return *this;
}

Jet& Jet::operator/=(double rhs) {
  require_valid("scale");
  if (rhs == 0.0) throw DomainError("division by zero");
  for (double& c : coeffs_) c /= rhs;
  return *this;
}

Jet Jet::compose(std::span<const double> series) const {
  require_valid("compose");
  if (series.size() != static_cast<std::size_t>(order_) + 1) {
    throw std::invalid_argument("series length must be order + 1");
  }
  Jet shifted = *this;
  shifted.coeffs_[0] = 0.0;
  Jet out(base_, order_, series[order_]);
  for (int k = order_ - 1; k >= 0; --k) {
    out = out * shifted;
    out.coeffs_[0] += series[k];
  }
  require_finite(out.coeffs_, "compose");
  return out;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double b) { return a += b; }
Jet operator+(double a, Jet b) { return b += a; }
Jet operator-(Jet a, double b) { return a -= b; }
Jet operator-(double a, const Jet& b) { return -b + a; }
Jet operator*(Jet a, double b) { return a *= b; }
Jet operator*(double a, Jet b) { return b *= a; }
Jet operator/(Jet a, double b) { return a /= b; }
Jet operator/(double a, const Jet& b) { return reciprocal(b) * a; }

Jet pow(const Jet& a, double exponent) {
  const double x = a.value();
  const int n = a.order();
  const bool integral = is_integer(exponent);
  if (!integral && x <= 0.0) throw DomainError("pow: non-positive base with non-integer exponent");
  if (integral && exponent < 0.0 && x == 0.0) throw DomainError("pow: division by zero");
  std::vector<double> series(n + 1);
  double binom = 1.0;  // exponent choose k
  for (int k = 0; k <= n; ++k) {
    if (integral && exponent >= 0.0 && k > exponent) {
      series[k] = 0.0;
    } else {
      series[k] = binom * std::pow(x, exponent - k);
    }
    binom *= (exponent - k) / (k + 1);
  }
  return a.compose(series);
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw DomainError("sqrt: non-positive argument");
  return pow(a, 0.5);
}

Jet reciprocal(const Jet& a) {
  if (a.value() == 0.0) throw DomainError("division by zero");
  return pow(a, -1.0);
}

Jet exp(const Jet& a) {
  const int n = a.order();
  std::vector<double> series(n + 1);
  const double e = std::exp(a.value());
  double fact = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= k;
    series[k] = e / fact;
  }
  return a.compose(series);
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("ln: non-positive argument");
  const int n = a.order();
  std::vector<double> series(n + 1);
  series[0] = std::log(x);
  double xp = 1.0;
  for (int k = 1; k <= n; ++k) {
    xp *= x;
    series[k] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * xp);
  }
  return a.compose(series);
}

namespace {

// Taylor coefficients of sin(x0 + t) (phase 0) or cos(x0 + t) (phase 1).
std::vector<double> trig_series(double x, int n, int phase) {
  std::vector<double> series(n + 1);
  const double s = std::sin(x);
  const double c = std::cos(x);
  const std::array<double, 4> cycle{s, c, -s, -c};
  double fact = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= k;
    series[k] = cycle[(k + phase) % 4] / fact;
  }
  return series;
}

}  // namespace

Jet sin(const Jet& a) { return a.compose(trig_series(a.value(), a.order(), 0)); }
Jet cos(const Jet& a) { return a.compose(trig_series(a.value(), a.order(), 1)); }

double checked_sqrt(double v) {
  if (!(v > 0.0)) throw DomainError("sqrt: non-positive argument");
  return std::sqrt(v);
}

double checked_log(double v) {
  if (!(v > 0.0)) throw DomainError("ln: non-positive argument");
  return std::log(v);
}

double checked_pow(double v, double exponent) {
  const bool integral = is_integer(exponent);
  if (!integral && v <= 0.0) throw DomainError("pow: non-positive base with non-integer exponent");
  if (integral && exponent < 0.0 && v == 0.0) throw DomainError("pow: division by zero");
  return std::pow(v, exponent);
}

double checked_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  const double r = a / b;
  if (!std::isfinite(r)) throw DomainError("division: non-finite result");
  return r;
}

}  // namespace anicon
