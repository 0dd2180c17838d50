#include "projeq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include <fmt/format.h>

#include "projeq/errors.hpp"

namespace projeq {

namespace {

std::size_t ipow(int base, int exponent) {
  std::size_t r = 1;
  for (int i = 0; i < exponent; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

Jet zero_like(const Jet& j) { return Jet(j.nvars(), j.order()); }

int common_order(const JetTensor& a, const JetTensor& b) {
  return std::min(a.order(), b.order());
}

void require_rank2_square(const JetTensor& m, const char* what) {
  if (m.rank() != 2) throw ShapeError(fmt::format("{} needs a rank-2 tensor", what));
}

}  // namespace

JetTensor::JetTensor(int dim, std::vector<Variance> slots, std::vector<Jet> components)
    : dim_(dim), slots_(std::move(slots)), components_(std::move(components)) {
  if (dim < 1) throw ShapeError("tensor dimension must be positive");
  if (components_.size() != ipow(dim, rank())) {
    throw ShapeError(fmt::format("tensor of rank {} in dimension {} needs {} components, got {}",
                                 rank(), dim, ipow(dim, rank()), components_.size()));
  }
  for (const auto& c : components_) {
    if (!c.same_shape(components_.front())) {
      throw ShapeError("tensor components differ in jet shape");
    }
  }
}

JetTensor JetTensor::zeros(int dim, std::vector<Variance> slots, int order) {
  const std::size_t count = ipow(dim, static_cast<int>(slots.size()));
  std::vector<Jet> comps(count, Jet(dim, order));
  return JetTensor(dim, std::move(slots), std::move(comps));
}

JetTensor JetTensor::scalar(Jet value) {
  const int n = value.nvars();
  return JetTensor(n, {}, {std::move(value)});
}

JetTensor JetTensor::identity(int dim, int order) {
  auto id = zeros(dim, {Variance::kUp, Variance::kDown}, order);
  for (int i = 0; i < dim; ++i) id({i, i}) = Jet(dim, order, 1.0);
  return id;
}

std::array<int, 2> JetTensor::valence() const {
  int up = static_cast<int>(std::count(slots_.begin(), slots_.end(), Variance::kUp));
  return {up, rank() - up};
}

std::size_t JetTensor::flat_index(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank()) {
    throw ShapeError(fmt::format("tensor of rank {} indexed with {} indices", rank(), idx.size()));
  }
  std::size_t k = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim_) throw ShapeError(fmt::format("index {} out of range", i));
    k = k * dim_ + static_cast<std::size_t>(i);
  }
  return k;
}

std::size_t JetTensor::flat_index(std::initializer_list<int> idx) const {
  return flat_index(std::span<const int>(idx.begin(), idx.size()));
}

std::vector<int> JetTensor::unflatten(std::size_t k) const {
  std::vector<int> idx(rank());
  for (int s = rank() - 1; s >= 0; --s) {
    idx[s] = static_cast<int>(k % dim_);
    k /= dim_;
  }
  return idx;
}

std::vector<double> JetTensor::values() const {
  std::vector<double> v;
  v.reserve(components_.size());
  for (const auto& c : components_) v.push_back(c.value());
  return v;
}

double JetTensor::max_abs() const {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, std::abs(c.value()));
  return m;
}

JetTensor JetTensor::truncated(int order) const {
  std::vector<Jet> comps;
  comps.reserve(components_.size());
  for (const auto& c : components_) comps.push_back(truncate(c, order));
  return JetTensor(dim_, slots_, std::move(comps));
}

namespace {

JetTensor combine(const JetTensor& a, const JetTensor& b, double sign) {
  if (a.dim() != b.dim() || a.slots() != b.slots()) {
    throw ShapeError("tensor sum needs identical slot structure");
  }
  const int order = common_order(a, b);
  std::vector<Jet> comps;
  comps.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    Jet x = truncate(a.at(k), order);
    Jet y = truncate(b.at(k), order);
    comps.push_back(sign > 0 ? x + y : x - y);
  }
  return JetTensor(a.dim(), a.slots(), std::move(comps));
}

}  // namespace

JetTensor operator+(const JetTensor& a, const JetTensor& b) { return combine(a, b, 1.0); }
JetTensor operator-(const JetTensor& a, const JetTensor& b) { return combine(a, b, -1.0); }

JetTensor operator*(double s, const JetTensor& a) {
  JetTensor out = a;
  for (auto& c : out.components()) c *= s;
  return out;
}

MetricField MetricField::from_lower_triangle(std::vector<std::string> coordinates,
                                             const std::vector<std::vector<std::string>>& rows) {
  const int n = static_cast<int>(coordinates.size());
  if (static_cast<int>(rows.size()) != n) {
    throw ShapeError(fmt::format("metric needs {} rows, got {}", n, rows.size()));
  }
  MetricField m;
  m.dim = n;
  std::vector<std::optional<expr::Expression>> slots(n * n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) < i + 1) {
      throw ShapeError(fmt::format("metric row {} needs at least {} entries", i, i + 1));
    }
    for (int j = 0; j <= i; ++j) {
      auto e = expr::parse(rows[i][j], coordinates);
      slots[i * n + j] = e;
      slots[j * n + i] = e;
    }
  }
  m.coordinates = std::move(coordinates);
  for (auto& s : slots) m.components.push_back(std::move(*s));
  return m;
}

void require_nondegenerate(const JetTensor& g, const char* what) {
  require_rank2_square(g, what);
  const int n = g.dim();
  double scale = 0.0;
  for (const auto& c : g.components()) scale = std::max(scale, std::abs(c.value()));
  // Determinant of the constant part only.
  auto constant = g.truncated(0);
  const double det = determinant(constant).value();
  if (!std::isfinite(det) || scale == 0.0 ||
      std::abs(det) <= kDegeneracyTolerance * std::pow(scale, n)) {
    throw DegeneracyError(fmt::format("{} is degenerate (det = {:.3e}, scale = {:.3e})", what,
                                      det, scale));
  }
}

JetTensor evaluate_metric(const MetricField& metric, std::span<const double> point, int order) {
  const int n = metric.dim;
  if (static_cast<int>(point.size()) != n) {
    throw ShapeError(fmt::format("metric of dimension {} evaluated at a {}-point", n,
                                 point.size()));
  }
  const auto seeds = seed_coordinates(point, order);
  std::vector<Jet> comps(n * n, Jet(n, order));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      comps[i * n + j] = metric.component(i, j).eval(std::span<const Jet>(seeds));
      comps[j * n + i] = comps[i * n + j];
    }
  }
  JetTensor g(n, {Variance::kDown, Variance::kDown}, std::move(comps));
  require_nondegenerate(g, "metric");
  return g;
}

namespace {

Jet minor_determinant(const JetTensor& m, std::vector<int>& rows, std::vector<int>& cols) {
  const std::size_t k = rows.size();
  if (k == 1) return m({rows[0], cols[0]});
  if (k == 2) {
    return m({rows[0], cols[0]}) * m({rows[1], cols[1]}) -
           m({rows[0], cols[1]}) * m({rows[1], cols[0]});
  }
  const int r0 = rows.front();
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  Jet det = zero_like(m.at(0));
  double sign = 1.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<int> sub_cols;
    for (std::size_t d = 0; d < k; ++d) {
      if (d != c) sub_cols.push_back(cols[d]);
    }
    Jet term = m({r0, cols[c]}) * minor_determinant(m, sub_rows, sub_cols);
    if (sign > 0) {
      det += term;
    } else {
      det -= term;
    }
    sign = -sign;
  }
  return det;
}

Variance flip(Variance v) { return v == Variance::kUp ? Variance::kDown : Variance::kUp; }

}  // namespace

Jet determinant(const JetTensor& m) {
  require_rank2_square(m, "determinant");
  std::vector<int> idx(m.dim());
  for (int i = 0; i < m.dim(); ++i) idx[i] = i;
  std::vector<int> cols = idx;
  return minor_determinant(m, idx, cols);
}

JetTensor invert(const JetTensor& m) {
  require_rank2_square(m, "invert");
  const int n = m.dim();
  const int order = m.order();
  std::vector<std::vector<Jet>> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i].push_back(m({i, j}));
      b[i].push_back(Jet(n, order, i == j ? 1.0 : 0.0));
    }
  }
  double scale = m.max_abs();
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int r = k + 1; r < n; ++r) {
      if (std::abs(a[r][k].value()) > std::abs(a[pivot][k].value())) pivot = r;
    }
    if (std::abs(a[pivot][k].value()) <= 1e-14 * scale || scale == 0.0) {
      throw DegeneracyError("matrix is singular at the base point");
    }
    std::swap(a[k], a[pivot]);
    std::swap(b[k], b[pivot]);
    const Jet inv = reciprocal(a[k][k]);
    for (int j = 0; j < n; ++j) {
      a[k][j] = a[k][j] * inv;
      b[k][j] = b[k][j] * inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == k) continue;
      const Jet factor = a[r][k];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= factor * a[k][j];
        b[r][j] -= factor * b[k][j];
      }
    }
  }
  std::vector<Jet> comps;
  comps.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) comps.push_back(std::move(b[i][j]));
  }
  return JetTensor(n, {flip(m.slots()[1]), flip(m.slots()[0])}, std::move(comps));
}

JetTensor inverse_metric(const JetTensor& g) {
  require_nondegenerate(g, "metric");
  return invert(g);
}

JetTensor christoffel(const JetTensor& g, const JetTensor& ginv) {
  const int n = g.dim();
  if (g.order() < 1) throw OrderExhaustedError("Christoffel symbols need a metric jet of order >= 1");
  const int order = g.order() - 1;
  // dg[(s*n + j)*n + k] = d_k g_{sj}
  std::vector<Jet> dg;
  dg.reserve(n * n * n);
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) dg.push_back(differentiate(g({s, j}), k));
    }
  }
  auto d = [&](int s, int j, int k) -> const Jet& { return dg[(s * n + j) * n + k]; };
  const JetTensor gi = ginv.truncated(order);

  auto gamma = JetTensor::zeros(n, {Variance::kUp, Variance::kDown, Variance::kDown}, order);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      // Gamma_{s jk} (first kind)
      std::vector<Jet> first;
      first.reserve(n);
      for (int s = 0; s < n; ++s) first.push_back(0.5 * (d(s, k, j) + d(s, j, k) - d(j, k, s)));
      for (int i = 0; i < n; ++i) {
        Jet acc(n, order);
        for (int s = 0; s < n; ++s) acc.add_product(gi({i, s}), first[s]);
        gamma({i, j, k}) = acc;
        gamma({i, k, j}) = std::move(acc);
      }
    }
  }
  return gamma;
}

JetTensor gradient(const JetTensor& t) {
  if (t.order() < 1) throw OrderExhaustedError("gradient needs a jet of order >= 1");
  const int n = t.dim();
  std::vector<Variance> slots = t.slots();
  slots.push_back(Variance::kDown);
  std::vector<Jet> comps;
  comps.reserve(t.size() * n);
  for (const auto& c : t.components()) {
    for (int k = 0; k < n; ++k) comps.push_back(differentiate(c, k));
  }
  return JetTensor(n, std::move(slots), std::move(comps));
}

JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma) {
  if (t.order() < 1) throw OrderExhaustedError("covariant derivative needs a jet of order >= 1");
  const int order = t.order() - 1;
  if (gamma.order() < order) {
    throw OrderExhaustedError(fmt::format(
        "Christoffel jets of order {} cannot differentiate a tensor of order {}", gamma.order(),
        t.order()));
  }
  if (gamma.dim() != t.dim()) throw ShapeError("connection and tensor differ in dimension");
  const int n = t.dim();
  const int rank = t.rank();
  const JetTensor tt = t.truncated(order);
  const JetTensor g = gamma.truncated(order);
  JetTensor out = gradient(t);

  std::vector<int> idx(rank + 1), moved(rank);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    idx = out.unflatten(flat);
    const int k = idx[rank];
    Jet& acc = out.at(flat);
    for (int s = 0; s < rank; ++s) {
      std::copy(idx.begin(), idx.begin() + rank, moved.begin());
      for (int m = 0; m < n; ++m) {
        moved[s] = m;
        const Jet& comp = tt.at(tt.flat_index(moved));
        if (t.slots()[s] == Variance::kUp) {
          acc.add_product(g({idx[s], k, m}), comp);
        } else {
          Jet term = g({m, k, idx[s]}) * comp;
          acc -= term;
        }
      }
    }
  }
  return out;
}

JetTensor ricci(const JetTensor& gamma) {
  if (gamma.order() < 1) throw OrderExhaustedError("Ricci tensor needs a metric jet of order >= 2");
  const int n = gamma.dim();
  const int order = gamma.order() - 1;
  const JetTensor dgamma = gradient(gamma);  // d_l Gamma^i_{jk} at (i, j, k, l)
  const JetTensor g = gamma.truncated(order);

  auto r = JetTensor::zeros(n, {Variance::kDown, Variance::kDown}, order);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet acc(n, order);
      for (int s = 0; s < n; ++s) {
        acc += dgamma({s, i, j, s});
        acc -= dgamma({s, s, i, j});
        for (int p = 0; p < n; ++p) {
          acc.add_product(g({s, s, p}), g({p, i, j}));
          acc -= g({s, j, p}) * g({p, s, i});
        }
      }
      r({i, j}) = std::move(acc);
    }
  }
  return r;
}

JetTensor raise_index(const JetTensor& t, const JetTensor& ginv, int slot) {
  if (slot < 0 || slot >= t.rank()) throw ShapeError(fmt::format("slot {} out of range", slot));
  if (t.slots()[slot] != Variance::kDown) throw ShapeError("can only raise a lower slot");
  const int order = common_order(t, ginv);
  const JetTensor tt = t.truncated(order);
  const JetTensor gi = ginv.truncated(order);
  std::vector<Variance> slots = t.slots();
  slots[slot] = Variance::kUp;
  auto out = JetTensor::zeros(t.dim(), std::move(slots), order);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    const int a = idx[slot];
    for (int s = 0; s < t.dim(); ++s) {
      idx[slot] = s;
      out.at(flat).add_product(gi({a, s}), tt.at(tt.flat_index(idx)));
    }
  }
  return out;
}

JetTensor lower_index(const JetTensor& t, const JetTensor& g, int slot) {
  if (slot < 0 || slot >= t.rank()) throw ShapeError(fmt::format("slot {} out of range", slot));
  if (t.slots()[slot] != Variance::kUp) throw ShapeError("can only lower an upper slot");
  const int order = common_order(t, g);
  const JetTensor tt = t.truncated(order);
  const JetTensor gl = g.truncated(order);
  std::vector<Variance> slots = t.slots();
  slots[slot] = Variance::kDown;
  auto out = JetTensor::zeros(t.dim(), std::move(slots), order);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    const int a = idx[slot];
    for (int s = 0; s < t.dim(); ++s) {
      idx[slot] = s;
      out.at(flat).add_product(gl({a, s}), tt.at(tt.flat_index(idx)));
    }
  }
  return out;
}

JetTensor contract(const JetTensor& t, int slot_a, int slot_b) {
  if (slot_a < 0 || slot_a >= t.rank() || slot_b < 0 || slot_b >= t.rank() ||
      slot_a == slot_b) {
    throw ShapeError("contraction slots out of range");
  }
  if (t.slots()[slot_a] == t.slots()[slot_b]) {
    throw ShapeError("contraction needs one upper and one lower slot");
  }
  std::vector<Variance> slots;
  for (int s = 0; s < t.rank(); ++s) {
    if (s != slot_a && s != slot_b) slots.push_back(t.slots()[s]);
  }
  const int n = t.dim();
  auto out = JetTensor::zeros(n, slots, t.order());
  std::vector<int> full(t.rank());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto rest = out.unflatten(flat);
    for (int m = 0; m < n; ++m) {
      int r = 0;
      for (int s = 0; s < t.rank(); ++s) {
        full[s] = (s == slot_a || s == slot_b) ? m : rest[r++];
      }
      out.at(flat) += t.at(t.flat_index(full));
    }
  }
  return out;
}

JetTensor tensor_product(const JetTensor& a, const JetTensor& b) {
  if (a.dim() != b.dim()) throw ShapeError("tensor product needs equal dimensions");
  const int order = common_order(a, b);
  const JetTensor ta = a.truncated(order);
  const JetTensor tb = b.truncated(order);
  std::vector<Variance> slots = a.slots();
  slots.insert(slots.end(), b.slots().begin(), b.slots().end());
  std::vector<Jet> comps;
  comps.reserve(a.size() * b.size());
  for (const auto& x : ta.components()) {
    for (const auto& y : tb.components()) comps.push_back(x * y);
  }
  return JetTensor(a.dim(), std::move(slots), std::move(comps));
}

JetTensor compose(const JetTensor& a, const JetTensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim() != b.dim()) {
    throw ShapeError("compose needs two rank-2 tensors of equal dimension");
  }
  if (a.slots()[1] == b.slots()[0]) {
    throw ShapeError("compose contracts slots of opposite variance");
  }
  const int n = a.dim();
  const int order = common_order(a, b);
  const JetTensor ta = a.truncated(order);
  const JetTensor tb = b.truncated(order);
  auto out = JetTensor::zeros(n, {a.slots()[0], b.slots()[1]}, order);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet& acc = out({i, j});
      for (int s = 0; s < n; ++s) acc.add_product(ta({i, s}), tb({s, j}));
    }
  }
  return out;
}

JetTensor transpose(const JetTensor& t) {
  require_rank2_square(t, "transpose");
  const int n = t.dim();
  std::vector<Jet> comps;
  comps.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) comps.push_back(t({j, i}));
  }
  return JetTensor(n, {t.slots()[1], t.slots()[0]}, std::move(comps));
}

}  // namespace projeq
