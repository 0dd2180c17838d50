#pragma once

// Truncated multivariate Taylor series ("jets").
//
// A jet of order m in n variables stores c_a = (d^a f)(p) / a! for every
// multi-index a with |a| <= m, in graded-lexicographic order. The graded
// ordering does not depend on m, so the coefficients of a lower-order
// truncation always form a prefix of the higher-order coefficient vector.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace projeq {

using MultiIndex = std::vector<int>;

/// Binomial coefficient C(n, k) for small non-negative arguments.
std::size_t binomial(int n, int k);

/// Multi-index bookkeeping shared by all jets with the same (nvars, order).
/// Instances are immutable and interned; obtain them through `get`.
class JetLayout {
 public:
  static std::shared_ptr<const JetLayout> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return indices_.size(); }

  const MultiIndex& multi_index(std::size_t k) const { return indices_[k]; }
  /// Position of `alpha` in the coefficient vector. Throws
  /// OrderExhaustedError when |alpha| exceeds the order.
  std::size_t index_of(const MultiIndex& alpha) const;
  /// Number of coefficients with |alpha| <= d.
  std::size_t prefix_size(int d) const { return degree_end_[d]; }

  struct Product {
    std::uint32_t a, b, out;
  };
  /// All (a, b) pairs with |a| + |b| <= order, sorted by output position.
  const std::vector<Product>& products() const { return products_; }

  struct ShiftEntry {
    std::uint32_t from;  // index of alpha + e_i in this layout
    double factor;       // alpha_i + 1
  };
  /// For variable i, entry k describes coefficient k of the order-(m-1)
  /// derivative jet. Empty for order 0.
  const std::vector<ShiftEntry>& derivative_table(int var) const {
    return derivative_[var];
  }

  JetLayout(int nvars, int order);

 private:
  int nvars_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> degree_end_;
  std::vector<Product> products_;
  std::vector<std::vector<ShiftEntry>> derivative_;
};

/// Truncated Taylor expansion of a scalar function at a base point.
///
/// Jets are values: every operation returns a new jet. Binary operations
/// require both operands to have the same variable count and order and throw
/// ShapeError otherwise; use `truncate` to bring operands to a common order.
class Jet {
 public:
  /// Zero jet.
  Jet(int nvars, int order);
  /// Constant jet.
  Jet(int nvars, int order, double value);
  Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> coeffs);

  static Jet constant(int nvars, int order, double value) {
    return Jet(nvars, order, value);
  }

  int nvars() const { return layout_->nvars(); }
  int order() const { return layout_->order(); }
  std::size_t size() const { return coeffs_.size(); }
  const JetLayout& layout() const { return *layout_; }
  const std::shared_ptr<const JetLayout>& layout_ptr() const { return layout_; }

  double value() const { return coeffs_[0]; }
  std::span<const double> coeffs() const { return coeffs_; }
  double coeff(const MultiIndex& alpha) const {
    return coeffs_[layout_->index_of(alpha)];
  }
  double operator[](std::size_t k) const { return coeffs_[k]; }

  bool same_shape(const Jet& other) const {
    return layout_ == other.layout_;
  }

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    coeffs_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, Jet a) {
    a *= -1.0;
    return a += s;
  }

  /// Fused a += b * c without an intermediate jet.
  void add_product(const Jet& b, const Jet& c);

 private:
  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> coeffs_;
};

/// One coordinate jet per entry of `point`: constant term point[i], unit
/// linear term in slot i. Throws DomainError on non-finite entries.
std::vector<Jet> seed_coordinates(std::span<const double> point, int order);

Jet reciprocal(const Jet& f);
Jet sqrt(const Jet& f);
/// f^exponent. Integer exponents accept any base (negative integers need a
/// nonzero constant term); fractional exponents need a positive base.
Jet pow(const Jet& f, double exponent);
/// sign(c_0) * f; undefined (SingularInputError) for a zero constant term.
Jet abs(const Jet& f);
Jet exp(const Jet& f);
Jet log(const Jet& f);
Jet sin(const Jet& f);
Jet cos(const Jet& f);

/// alpha! * c_alpha, i.e. the partial derivative d^alpha f at the base point.
double partial(const Jet& f, const MultiIndex& alpha);

/// Jet of d f / d x^var, one order lower.
Jet differentiate(const Jet& f, int var);

/// Drops every coefficient with |alpha| > order.
Jet truncate(const Jet& f, int order);

/// Composition h(f) given the Taylor coefficients of h at f's constant term:
/// outer[k] = h^(k)(c_0) / k!, for k = 0..f.order().
Jet compose(std::span<const double> outer, const Jet& f);

}  // namespace projeq
