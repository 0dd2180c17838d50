#include "projeq/operators.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "projeq/errors.hpp"

namespace projeq {

namespace {

JetTensor raise_both(const JetTensor& k_low, const JetTensor& ginv) {
  return raise_index(raise_index(k_low, ginv, 0), ginv, 1);
}

// g at `order + 1` so that Gamma carries `order`.
OperatorJets metric_part(const MetricField& metric, std::span<const double> point, int order,
                         JetTensor k_up) {
  const JetTensor g = evaluate_metric(metric, point, order + 1);
  const JetTensor ginv = inverse_metric(g);
  JetTensor gamma = christoffel(g, ginv);
  Jet sqrt_det = sqrt(abs(determinant(g.truncated(order))));
  return OperatorJets{std::move(k_up), std::move(gamma), std::move(sqrt_det)};
}

void require_operator_order(const OperatorJets& op, int needed) {
  if (op.k_up.order() < needed || op.gamma.order() < needed - 1 ||
      op.sqrt_det.order() < needed) {
    throw OrderExhaustedError(fmt::format(
        "operator coefficients of order {} are too short for this application",
        op.k_up.order()));
  }
}

// V^i = K^{ij} d_j f, order f.order() - 1.
std::vector<Jet> flux(const OperatorJets& op, const Jet& f) {
  const int n = f.nvars();
  const int order = f.order() - 1;
  std::vector<Jet> df;
  df.reserve(n);
  for (int j = 0; j < n; ++j) df.push_back(differentiate(f, j));
  std::vector<Jet> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    Jet acc(n, order);
    for (int j = 0; j < n; ++j) acc.add_product(truncate(op.k_up({i, j}), order), df[j]);
    v.push_back(std::move(acc));
  }
  return v;
}

void require_applicable(const OperatorJets& op, const Jet& f) {
  if (f.order() < 2) {
    throw OrderExhaustedError(
        fmt::format("a second-order operator needs a jet of order >= 2, got {}", f.order()));
  }
  if (op.k_up.dim() != f.nvars()) throw ShapeError("operator and function differ in dimension");
  require_operator_order(op, f.order() - 1);
}

}  // namespace

QuantizedOperator::QuantizedOperator(MetricField metric, CoefficientField coefficients)
    : metric_(std::move(metric)), coefficients_(std::move(coefficients)) {}

QuantizedOperator QuantizedOperator::laplace(const MetricField& metric) {
  return QuantizedOperator(metric, [metric](std::span<const double> p, int order) {
    return inverse_metric(evaluate_metric(metric, p, order));
  });
}

QuantizedOperator QuantizedOperator::killing_family(const ProjectivePair& pair, double t) {
  return QuantizedOperator(pair.g, [pair, t](std::span<const double> p, int order) {
    const JetTensor g = evaluate_metric(pair.g, p, order);
    const JetTensor gbar = evaluate_metric(pair.gbar, p, order);
    const BenentiData b = benenti_data(g, gbar);
    return raise_both(b.killing(t), inverse_metric(g));
  });
}

QuantizedOperator QuantizedOperator::from_lower(const MetricField& metric, MetricField lower) {
  if (lower.dim != metric.dim) throw ShapeError("coefficient field and metric differ in dimension");
  return QuantizedOperator(metric, [metric, lower](std::span<const double> p, int order) {
    const JetTensor ginv = inverse_metric(evaluate_metric(metric, p, order));
    const auto seeds = seed_coordinates(p, order);
    const int n = metric.dim;
    std::vector<Jet> comps;
    comps.reserve(n * n);
    for (const auto& e : lower.components) comps.push_back(e.eval(std::span<const Jet>(seeds)));
    JetTensor k(n, {Variance::kDown, Variance::kDown}, std::move(comps));
    return raise_both(k, ginv);
  });
}

OperatorJets QuantizedOperator::at(std::span<const double> point, int order) const {
  return metric_part(metric_, point, order, coefficients_(point, order));
}

Jet apply(const OperatorJets& op, const Jet& f) {
  require_applicable(op, f);
  const int n = f.nvars();
  const int order = f.order() - 2;
  const std::vector<Jet> v = flux(op, f);
  Jet out(n, order);
  for (int i = 0; i < n; ++i) {
    out += differentiate(v[i], i);
    const Jet vi = truncate(v[i], order);
    for (int s = 0; s < n; ++s) out.add_product(truncate(op.gamma({s, s, i}), order), vi);
  }
  return out;
}

Jet apply_density_form(const OperatorJets& op, const Jet& f) {
  require_applicable(op, f);
  const int n = f.nvars();
  const int order = f.order() - 2;
  const std::vector<Jet> v = flux(op, f);
  const Jet rho = truncate(op.sqrt_det, order + 1);
  Jet div(n, order);
  for (int i = 0; i < n; ++i) div += differentiate(rho * v[i], i);
  return div / truncate(op.sqrt_det, order);
}

Jet apply_operator(const QuantizedOperator& op, const expr::Expression& f,
                   std::span<const double> point, int output_order) {
  if (output_order < 0) throw DomainError("output order must be non-negative");
  const OperatorJets jets = op.at(point, output_order + 1);
  return apply(jets, expr::eval_jet(f, point, output_order + 2));
}

Jet laplace_apply(const MetricField& g, const expr::Expression& f,
                  std::span<const double> point, int output_order) {
  return apply_operator(QuantizedOperator::laplace(g), f, point, output_order);
}

DivergenceForms apply_both_forms(const QuantizedOperator& op, const expr::Expression& f,
                                 std::span<const double> point, int output_order) {
  if (output_order < 0) throw DomainError("output order must be non-negative");
  const OperatorJets jets = op.at(point, output_order + 1);
  const Jet fj = expr::eval_jet(f, point, output_order + 2);
  Jet a = apply(jets, fj);
  Jet b = apply_density_form(jets, fj);
  double gap = 0.0, scale = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    gap = std::max(gap, std::abs(a[k] - b[k]));
    scale = std::max(scale, std::abs(a[k]));
  }
  return DivergenceForms{std::move(a), std::move(b), gap / scale};
}

double CommutatorValue::scale() const {
  return std::max({1.0, std::abs(forward), std::abs(backward)});
}

CommutatorValue commutator_apply(const OperatorJets& op_t, const OperatorJets& op_s,
                                 const Jet& f) {
  if (f.order() < 4) {
    throw OrderExhaustedError(fmt::format(
        "commutator of two second-order operators needs working order >= 4, got {}",
        f.order()));
  }
  const Jet f4 = truncate(f, 4);
  const Jet ts = apply(op_t, apply(op_s, f4));
  const Jet st = apply(op_s, apply(op_t, f4));
  return CommutatorValue{ts.value(), st.value()};
}

CommutatorValue commutator_apply(const QuantizedOperator& op_t, const QuantizedOperator& op_s,
                                 const expr::Expression& f, std::span<const double> point) {
  return commutator_apply(op_t.at(point, 3), op_s.at(point, 3), expr::eval_jet(f, point, 4));
}

double CommutatorDecomposition::q_norm() const {
  double m = 0.0;
  for (double x : q) m = std::max(m, std::abs(x));
  return m;
}

double CommutatorDecomposition::v_norm() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

CommutatorDecomposition commutator_decompose(const OperatorJets& op_t, const OperatorJets& op_s,
                                             std::span<const double> point) {
  constexpr int kProbeOrder = 5;
  const int n = static_cast<int>(point.size());
  require_operator_order(op_t, kProbeOrder - 1);
  require_operator_order(op_s, kProbeOrder - 1);

  // Centred coordinates u^i = x^i - p^i.
  std::vector<Jet> u = seed_coordinates(point, kProbeOrder);
  for (int i = 0; i < n; ++i) u[i] += -point[i];

  // Commutator of a probe, as an order-1 jet.
  auto commutator = [&](const Jet& probe) {
    return apply(op_t, apply(op_s, probe)) - apply(op_s, apply(op_t, probe));
  };

  CommutatorDecomposition out;
  out.zeroth_order = std::abs(commutator(Jet(n, kProbeOrder, 1.0)).value());

  // Linear probes see only the first-order coefficient b^l.
  std::vector<double> b(n);
  for (int l = 0; l < n; ++l) b[l] = commutator(u[l]).value();

  // Quadratic probes: value = 2 Q^{ij}; first derivative in x^k
  // = 2 d_k Q^{ij} + b^i delta^j_k + b^j delta^i_k.
  out.q.assign(n * n, 0.0);
  std::vector<double> dq(n * n * n, 0.0);  // d_k Q^{ij} at ((i*n + j)*n + k)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Jet c = commutator(u[i] * u[j]);
      out.q[i * n + j] = out.q[j * n + i] = 0.5 * c.value();
      for (int k = 0; k < n; ++k) {
        MultiIndex e(n, 0);
        e[k] = 1;
        double d = c.coeff(e);
        if (j == k) d -= b[i];
        if (i == k) d -= b[j];
        dq[(i * n + j) * n + k] = dq[(j * n + i) * n + k] = 0.5 * d;
      }
    }
  }

  // nabla_i (Q^{ij} d_j f) has first-order coefficient d_i Q^{ij} +
  // Gamma^i_{is} Q^{sj}; the remainder of b is V.
  out.v.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double first = 0.0;
    for (int i = 0; i < n; ++i) {
      first += dq[(i * n + j) * n + i];
      for (int s = 0; s < n; ++s) first += op_t.gamma({i, i, s}).value() * out.q[s * n + j];
    }
    out.v[j] = b[j] - first;
  }

  for (int a = 0; a < n; ++a) {
    for (int bb = a; bb < n; ++bb) {
      for (int c = bb; c < n; ++c) {
        const Jet r = commutator(u[a] * u[bb] * u[c]);
        out.third_order = std::max(out.third_order, std::abs(r.value()));
      }
    }
  }
  return out;
}

CommutatorDecomposition commutator_decompose(const QuantizedOperator& op_t,
                                             const QuantizedOperator& op_s,
                                             std::span<const double> point) {
  return commutator_decompose(op_t.at(point, 4), op_s.at(point, 4), point);
}

double quadratic_form(const JetTensor& k_up, std::span<const double> p) {
  const int n = k_up.dim();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) acc += k_up({i, j}).value() * p[i] * p[j];
  }
  return acc;
}

namespace {

void require_phase_point(const PhaseSpacePoint& phase, int n) {
  if (static_cast<int>(phase.x.size()) != n || static_cast<int>(phase.p.size()) != n) {
    throw ShapeError(fmt::format("phase-space point must have {} + {} entries", n, n));
  }
  for (double v : phase.x) {
    if (!std::isfinite(v)) throw DomainError("non-finite phase-space position");
  }
  for (double v : phase.p) {
    if (!std::isfinite(v)) throw DomainError("non-finite phase-space momentum");
  }
}

JetTensor killing_up(const ProjectivePair& pair, double t, std::span<const double> x, int order) {
  const JetTensor g = evaluate_metric(pair.g, x, order);
  const JetTensor gbar = evaluate_metric(pair.gbar, x, order);
  return raise_both(benenti_data(g, gbar).killing(t), inverse_metric(g));
}

}  // namespace

double integral_value(const ProjectivePair& pair, double t, const PhaseSpacePoint& phase) {
  require_phase_point(phase, pair.dim());
  return quadratic_form(killing_up(pair, t, phase.x, 0), phase.p);
}

BracketValue poisson_bracket(const JetTensor& a_up, const JetTensor& b_up,
                             std::span<const double> p) {
  if (a_up.order() < 1 || b_up.order() < 1) {
    throw OrderExhaustedError("Poisson bracket needs coefficient jets of order >= 1");
  }
  const int n = a_up.dim();
  // dA/dp_k = 2 A^{kj} p_j;  dA/dx^k = (d_k A^{ij}) p_i p_j.
  auto dp = [&](const JetTensor& k, int idx) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += 2.0 * k({idx, j}).value() * p[j];
    return acc;
  };
  auto dx = [&](const JetTensor& k, int idx) {
    MultiIndex e(n, 0);
    e[idx] = 1;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) acc += k({i, j}).coeff(e) * p[i] * p[j];
    }
    return acc;
  };
  double value = 0.0, scale = 0.0;
  for (int k = 0; k < n; ++k) {
    const double first = dp(a_up, k) * dx(b_up, k);
    const double second = dx(a_up, k) * dp(b_up, k);
    value += first - second;
    scale += std::abs(first) + std::abs(second);
  }
  return BracketValue{value, std::max(1.0, scale)};
}

BracketValue poisson_bracket(const ProjectivePair& pair, double t, double s,
                             const PhaseSpacePoint& phase) {
  require_phase_point(phase, pair.dim());
  const JetTensor g = evaluate_metric(pair.g, phase.x, 1);
  const JetTensor gbar = evaluate_metric(pair.gbar, phase.x, 1);
  const BenentiData b = benenti_data(g, gbar);
  const JetTensor ginv = inverse_metric(g);
  return poisson_bracket(raise_both(b.killing(t), ginv), raise_both(b.killing(s), ginv),
                         phase.p);
}

namespace {

bool inside(const std::vector<Interval>& domain, std::span<const double> x) {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!(x[i] > domain[i].lo && x[i] < domain[i].hi)) return false;
  }
  return true;
}

}  // namespace

namespace {

// Integrates one geodesic and tracks the drift of every quantity returned by
// `invariants(x, p)`, where p = g v.
using InvariantSet = std::function<std::vector<double>(std::span<const double>,
                                                       std::span<const double>)>;

std::vector<DriftResult> integrate_drift(const MetricField& metric,
                                         const std::vector<Interval>& domain,
                                         const InvariantSet& invariants,
                                         const PhaseSpacePoint& start, double horizon,
                                         double step) {
  const int n = metric.dim;
  require_phase_point(start, n);
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("integration step must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw DomainError("integration horizon must be non-negative");
  }
  if (static_cast<int>(domain.size()) != n) throw ShapeError("domain does not match metric");
  if (!inside(domain, start.x)) throw DomainError("initial point lies outside the domain");

  // State y = (x, v); y' = (v, -Gamma(v, v)).
  auto rhs = [&](const std::vector<double>& y) {
    std::span<const double> x(y.data(), n);
    const JetTensor g = evaluate_metric(metric, x, 1);
    const JetTensor gamma = christoffel(g, inverse_metric(g));
    std::vector<double> dy(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
      dy[i] = y[n + i];
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) acc += gamma({i, j, k}).value() * y[n + j] * y[n + k];
      }
      dy[n + i] = -acc;
    }
    return dy;
  };
  auto evaluate = [&](const std::vector<double>& y) {
    std::span<const double> x(y.data(), n);
    const JetTensor g = evaluate_metric(metric, x, 0);
    std::vector<double> p(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) p[i] += g({i, j}).value() * y[n + j];
    }
    return invariants(x, p);
  };

  std::vector<double> y(2 * n);
  {
    const JetTensor ginv = inverse_metric(evaluate_metric(metric, start.x, 0));
    for (int i = 0; i < n; ++i) {
      y[i] = start.x[i];
      for (int j = 0; j < n; ++j) y[n + i] += ginv({i, j}).value() * start.p[j];
    }
  }

  const std::vector<double> initial = evaluate(y);
  std::vector<DriftResult> results(initial.size());
  std::vector<double> denom(initial.size());
  for (std::size_t q = 0; q < initial.size(); ++q) {
    results[q].initial_value = initial[q];
    denom[q] = std::max(1.0, std::abs(initial[q]));
  }
  const int total_steps = static_cast<int>(std::llround(std::ceil(horizon / step - 1e-9)));
  std::vector<double> tmp(2 * n);
  int steps = 0;
  bool exited = false;
  double exit_time = 0.0;
  for (int s = 0; s < total_steps; ++s) {
    const double h = std::min(step, horizon - s * step);
    const auto k1 = rhs(y);
    for (int i = 0; i < 2 * n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(tmp);
    for (int i = 0; i < 2 * n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(tmp);
    for (int i = 0; i < 2 * n; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = rhs(tmp);
    for (int i = 0; i < 2 * n; ++i) {
      tmp[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (!inside(domain, std::span<const double>(tmp.data(), n))) {
      exited = true;
      exit_time = s * step;
      break;
    }
    y = tmp;
    ++steps;
    const std::vector<double> now = evaluate(y);
    for (std::size_t q = 0; q < now.size(); ++q) {
      results[q].max_drift =
          std::max(results[q].max_drift, std::abs(now[q] - initial[q]) / denom[q]);
    }
  }
  for (auto& r : results) {
    r.steps = steps;
    r.exited = exited;
    r.exit_time = exit_time;
  }
  return results;
}

}  // namespace

DriftResult geodesic_drift(const MetricField& metric, const std::vector<Interval>& domain,
                           const QuantizedOperator::CoefficientField& k_up,
                           const PhaseSpacePoint& start, double horizon, double step) {
  const InvariantSet single = [&k_up](std::span<const double> x, std::span<const double> p) {
    return std::vector<double>{quadratic_form(k_up(x, 0), p)};
  };
  return integrate_drift(metric, domain, single, start, horizon, step).front();
}

DriftResult geodesic_drift(const ProjectivePair& pair, double t, const PhaseSpacePoint& start,
                           double horizon, double step) {
  return geodesic_drift(pair, std::vector<double>{t}, start, horizon, step).front();
}

std::vector<DriftResult> geodesic_drift(const ProjectivePair& pair, const std::vector<double>& ts,
                                        const PhaseSpacePoint& start, double horizon,
                                        double step) {
  const InvariantSet family = [&pair, &ts](std::span<const double> x,
                                           std::span<const double> p) {
    const JetTensor g = evaluate_metric(pair.g, x, 0);
    const JetTensor gbar = evaluate_metric(pair.gbar, x, 0);
    const BenentiData b = benenti_data(g, gbar);
    const JetTensor ginv = inverse_metric(g);
    std::vector<double> values;
    for (double t : ts) values.push_back(quadratic_form(raise_both(b.killing(t), ginv), p));
    return values;
  };
  return integrate_drift(pair.g, pair.domain, family, start, horizon, step);
}

}  // namespace projeq
