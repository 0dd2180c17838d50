#include "projeq/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "projeq/errors.hpp"

namespace projeq {

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / i;
  return r;
}

namespace {

// Appends every multi-index of total degree `degree` in lexicographically
// descending order, so (1,0) precedes (0,1).
void enumerate_degree(int nvars, int degree, MultiIndex& current, int var,
                      std::vector<MultiIndex>& out) {
  if (var == nvars - 1) {
    current[var] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = e;
    enumerate_degree(nvars, degree - e, current, var + 1, out);
  }
  current[var] = 0;
}

std::size_t encode(const MultiIndex& alpha, int base) {
  std::size_t code = 0;
  for (int e : alpha) code = code * base + static_cast<std::size_t>(e);
  return code;
}

constexpr int kMaxVars = 8;
constexpr int kMaxOrder = 16;

}  // namespace

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || nvars > kMaxVars || order < 0 || order > kMaxOrder) {
    throw DomainError(fmt::format(
        "unsupported jet shape: {} variables, order {}", nvars, order));
  }
  MultiIndex current(nvars, 0);
  for (int d = 0; d <= order; ++d) {
    enumerate_degree(nvars, d, current, 0, indices_);
    degree_end_.push_back(indices_.size());
  }

  // Dense lookup from base-(order+1) code to position.
  const int base = order + 1;
  std::size_t table_size = 1;
  for (int i = 0; i < nvars; ++i) table_size *= base;
  std::vector<std::uint32_t> lookup(table_size, 0);
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    lookup[encode(indices_[k], base)] = static_cast<std::uint32_t>(k);
  }

  MultiIndex sum(nvars);
  for (std::size_t a = 0; a < indices_.size(); ++a) {
    int da = std::accumulate(indices_[a].begin(), indices_[a].end(), 0);
    for (std::size_t b = 0; b < degree_end_[order - da]; ++b) {
      for (int i = 0; i < nvars; ++i) sum[i] = indices_[a][i] + indices_[b][i];
      products_.push_back({static_cast<std::uint32_t>(a),
                           static_cast<std::uint32_t>(b),
                           lookup[encode(sum, base)]});
    }
  }
  std::stable_sort(products_.begin(), products_.end(),
                   [](const Product& x, const Product& y) { return x.out < y.out; });

  derivative_.resize(nvars);
  if (order > 0) {
    for (int i = 0; i < nvars; ++i) {
      for (std::size_t k = 0; k < degree_end_[order - 1]; ++k) {
        MultiIndex shifted = indices_[k];
        shifted[i] += 1;
        derivative_[i].push_back({lookup[encode(shifted, base)],
                                  static_cast<double>(shifted[i])});
      }
    }
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_shared<const JetLayout>(nvars, order);
  return slot;
}

std::size_t JetLayout::index_of(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != nvars_) {
    throw ShapeError(fmt::format("multi-index has {} entries, jet has {} variables",
                                 alpha.size(), nvars_));
  }
  int degree = 0;
  for (int e : alpha) {
    if (e < 0) throw DomainError("negative multi-index exponent");
    degree += e;
  }
  if (degree > order_) {
    throw OrderExhaustedError(fmt::format(
        "derivative of order {} requested from a jet of order {}", degree, order_));
  }
  // Offsets are small; a linear scan within the degree block is enough.
  std::size_t begin = degree == 0 ? 0 : degree_end_[degree - 1];
  for (std::size_t k = begin; k < degree_end_[degree]; ++k) {
    if (indices_[k] == alpha) return k;
  }
  throw Error("multi-index lookup failed");
}

Jet::Jet(int nvars, int order)
    : layout_(JetLayout::get(nvars, order)), coeffs_(layout_->size(), 0.0) {}

Jet::Jet(int nvars, int order, double value) : Jet(nvars, order) {
  coeffs_[0] = value;
}

Jet::Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> coeffs)
    : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != layout_->size()) {
    throw ShapeError(fmt::format("jet needs {} coefficients, got {}",
                                 layout_->size(), coeffs_.size()));
  }
}

namespace {

void require_same_shape(const Jet& a, const Jet& b) {
  if (!a.same_shape(b)) {
    throw ShapeError(fmt::format(
        "jet shape mismatch: ({} vars, order {}) vs ({} vars, order {})",
        a.nvars(), a.order(), b.nvars(), b.order()));
  }
}

}  // namespace

Jet& Jet::operator+=(const Jet& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

void Jet::add_product(const Jet& b, const Jet& c) {
  require_same_shape(*this, b);
  require_same_shape(*this, c);
  const double* pb = b.coeffs_.data();
  const double* pc = c.coeffs_.data();
  double* out = coeffs_.data();
  for (const auto& p : layout_->products()) out[p.out] += pb[p.a] * pc[p.b];
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.layout_, std::vector<double>(a.size(), 0.0));
  out.add_product(a, b);
  return out;
}

namespace {

void require_finite(double v, const char* op) {
  if (!std::isfinite(v)) {
    throw DomainError(fmt::format("non-finite constant term in {}", op));
  }
}

Jet reciprocal_named(const Jet& f, const char* op) {
  const double c0 = f.value();
  if (c0 == 0.0) throw SingularInputError(op, "zero constant term in denominator");
  std::vector<double> outer(f.order() + 1);
  outer[0] = 1.0 / c0;
  for (std::size_t k = 1; k < outer.size(); ++k) outer[k] = -outer[k - 1] / c0;
  return compose(outer, f);
}

}  // namespace

Jet operator/(const Jet& a, const Jet& b) {
  require_same_shape(a, b);
  return a * reciprocal_named(b, "div");
}

Jet compose(std::span<const double> outer, const Jet& f) {
  if (outer.size() != static_cast<std::size_t>(f.order()) + 1) {
    throw ShapeError("outer Taylor coefficients do not match jet order");
  }
  std::vector<double> nil(f.coeffs().begin(), f.coeffs().end());
  nil[0] = 0.0;
  Jet u(f.layout_ptr(), std::move(nil));
  Jet result(f.nvars(), f.order(), outer.back());
  for (int k = f.order() - 1; k >= 0; --k) {
    result = result * u;
    result += outer[k];
  }
  return result;
}

std::vector<Jet> seed_coordinates(std::span<const double> point, int order) {
  if (point.empty()) throw DomainError("seed point must have at least one entry");
  if (order < 0) throw DomainError("jet order must be non-negative");
  const int n = static_cast<int>(point.size());
  std::vector<Jet> seeds;
  seeds.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(point[i])) {
      throw DomainError(fmt::format("non-finite seed coordinate {}", i));
    }
    Jet x(n, order, point[i]);
    if (order >= 1) {
      MultiIndex e(n, 0);
      e[i] = 1;
      std::vector<double> c(x.coeffs().begin(), x.coeffs().end());
      c[x.layout().index_of(e)] = 1.0;
      x = Jet(x.layout_ptr(), std::move(c));
    }
    seeds.push_back(std::move(x));
  }
  return seeds;
}

Jet reciprocal(const Jet& f) { return reciprocal_named(f, "reciprocal"); }

Jet pow(const Jet& f, double exponent) {
  if (!std::isfinite(exponent)) throw DomainError("non-finite exponent in pow");
  require_finite(f.value(), "pow");
  const double rounded = std::round(exponent);
  if (rounded == exponent && std::abs(exponent) <= 64.0) {
    long e = static_cast<long>(rounded);
    Jet base = e < 0 ? reciprocal_named(f, "pow") : f;
    e = std::labs(e);
    Jet result(f.nvars(), f.order(), 1.0);
    while (e > 0) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return result;
  }
  const double c0 = f.value();
  if (!(c0 > 0.0)) {
    throw SingularInputError("pow", "fractional power of a non-positive constant term");
  }
  std::vector<double> outer(f.order() + 1);
  outer[0] = std::pow(c0, exponent);
  for (std::size_t k = 1; k < outer.size(); ++k) {
    outer[k] = outer[k - 1] * (exponent - static_cast<double>(k - 1)) /
               (static_cast<double>(k) * c0);
  }
  return compose(outer, f);
}

Jet sqrt(const Jet& f) {
  const double c0 = f.value();
  require_finite(c0, "sqrt");
  if (!(c0 > 0.0)) throw SingularInputError("sqrt", "non-positive constant term");
  std::vector<double> outer(f.order() + 1);
  outer[0] = std::sqrt(c0);
  for (std::size_t k = 1; k < outer.size(); ++k) {
    outer[k] = outer[k - 1] * (0.5 - static_cast<double>(k - 1)) /
               (static_cast<double>(k) * c0);
  }
  return compose(outer, f);
}

Jet abs(const Jet& f) {
  const double c0 = f.value();
  require_finite(c0, "abs");
  if (c0 == 0.0) throw SingularInputError("abs", "zero constant term");
  return c0 > 0.0 ? f : -f;
}

Jet exp(const Jet& f) {
  require_finite(f.value(), "exp");
  std::vector<double> outer(f.order() + 1);
  outer[0] = std::exp(f.value());
  for (std::size_t k = 1; k < outer.size(); ++k) outer[k] = outer[k - 1] / k;
  return compose(outer, f);
}

Jet log(const Jet& f) {
  const double c0 = f.value();
  require_finite(c0, "ln");
  if (!(c0 > 0.0)) throw SingularInputError("ln", "non-positive constant term");
  std::vector<double> outer(f.order() + 1);
  outer[0] = std::log(c0);
  double inv_power = 1.0;
  for (std::size_t k = 1; k < outer.size(); ++k) {
    inv_power /= c0;
    outer[k] = ((k % 2 == 1) ? 1.0 : -1.0) * inv_power / static_cast<double>(k);
  }
  return compose(outer, f);
}

namespace {

// Taylor coefficients of sin (phase 0) or cos (phase 1) at c0.
std::vector<double> trig_outer(double c0, int order, int phase) {
  const double s = std::sin(c0), c = std::cos(c0);
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> outer(order + 1);
  double factorial = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) factorial *= k;
    outer[k] = cycle[(k + phase) % 4] / factorial;
  }
  return outer;
}

}  // namespace

Jet sin(const Jet& f) {
  require_finite(f.value(), "sin");
  return compose(trig_outer(f.value(), f.order(), 0), f);
}

Jet cos(const Jet& f) {
  require_finite(f.value(), "cos");
  return compose(trig_outer(f.value(), f.order(), 1), f);
}

double partial(const Jet& f, const MultiIndex& alpha) {
  double factorial = 1.0;
  for (int e : alpha) {
    for (int k = 2; k <= e; ++k) factorial *= k;
  }
  return factorial * f.coeff(alpha);
}

Jet differentiate(const Jet& f, int var) {
  if (var < 0 || var >= f.nvars()) {
    throw ShapeError(fmt::format("coordinate index {} out of range", var));
  }
  if (f.order() < 1) {
    throw OrderExhaustedError("cannot differentiate a jet of order 0");
  }
  const auto& table = f.layout().derivative_table(var);
  std::vector<double> c(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    c[k] = table[k].factor * f[table[k].from];
  }
  return Jet(JetLayout::get(f.nvars(), f.order() - 1), std::move(c));
}

Jet truncate(const Jet& f, int order) {
  if (order == f.order()) return f;
  if (order > f.order()) {
    throw OrderExhaustedError(fmt::format(
        "cannot raise jet order from {} to {}", f.order(), order));
  }
  if (order < 0) throw DomainError("jet order must be non-negative");
  auto layout = JetLayout::get(f.nvars(), order);
  std::vector<double> c(f.coeffs().begin(), f.coeffs().begin() + layout->size());
  return Jet(std::move(layout), std::move(c));
}

}  // namespace projeq
