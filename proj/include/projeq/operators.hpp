#pragma once

// Second-order operators f -> nabla_i K^{ij} nabla_j f, their pointwise
// composition through jets, and the matching classical objects on T*M.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "projeq/expr.hpp"
#include "projeq/geometry.hpp"
#include "projeq/projective.hpp"

namespace projeq {

/// Coefficient data of one operator at one base point.
struct OperatorJets {
  JetTensor k_up;   // K^{ij}
  JetTensor gamma;  // Christoffel symbols of the background metric
  Jet sqrt_det;     // sqrt|det g|
};

/// The operator nabla_i K^{ij} nabla_j for a coefficient field K^{ij} over a
/// background metric.
class QuantizedOperator {
 public:
  /// Returns K^{ij} at a point as (2,0) jets of the requested order.
  using CoefficientField = std::function<JetTensor(std::span<const double>, int)>;

  QuantizedOperator(MetricField metric, CoefficientField coefficients);

  /// The Beltrami-Laplace operator, K^{ij} = g^{ij}.
  static QuantizedOperator laplace(const MetricField& metric);
  /// K(t) of a pair, with indices raised by g.
  static QuantizedOperator killing_family(const ProjectivePair& pair, double t);
  /// An arbitrary (0,2) field given by expressions, raised by the metric.
  static QuantizedOperator from_lower(const MetricField& metric, MetricField lower);

  const MetricField& metric() const { return metric_; }
  /// K^{ij}, Gamma and sqrt|det g| at `point`, all of order `order`.
  OperatorJets at(std::span<const double> point, int order) const;

 private:
  MetricField metric_;
  CoefficientField coefficients_;
};

/// K f = d_i V^i + Gamma^s_{si} V^i with V^i = K^{ij} d_j f. The result is two
/// orders below f; the operator jets must carry order >= f.order() - 1.
Jet apply(const OperatorJets& op, const Jet& f);
/// The same operator in density form (1/sqrt|g|) d_i (sqrt|g| V^i).
Jet apply_density_form(const OperatorJets& op, const Jet& f);

/// K f at `point` to `output_order`.
Jet apply_operator(const QuantizedOperator& op, const expr::Expression& f,
                   std::span<const double> point, int output_order);
/// Laplacian of f at `point` to `output_order`.
Jet laplace_apply(const MetricField& g, const expr::Expression& f,
                  std::span<const double> point, int output_order);

struct DivergenceForms {
  Jet christoffel_form;
  Jet density_form;
  /// max |difference| / max(1, max |christoffel_form|) over coefficients.
  double relative_gap;
};
DivergenceForms apply_both_forms(const QuantizedOperator& op, const expr::Expression& f,
                                 std::span<const double> point, int output_order);

struct CommutatorValue {
  double forward;   // K_t K_s f
  double backward;  // K_s K_t f
  double value() const { return forward - backward; }
  /// max(1, |forward|, |backward|)
  double scale() const;
};

/// (K_t K_s - K_s K_t) f at the base point of `f`. `f` must have order >= 4
/// and the operator jets order >= f.order() - 1.
CommutatorValue commutator_apply(const OperatorJets& op_t, const OperatorJets& op_s,
                                 const Jet& f);
CommutatorValue commutator_apply(const QuantizedOperator& op_t, const QuantizedOperator& op_s,
                                 const expr::Expression& f, std::span<const double> point);

/// Second- and first-order parts of a commutator written as
/// nabla_i Q^{ij} nabla_j + V^l nabla_l, recovered from probe functions
/// centred at the base point.
struct CommutatorDecomposition {
  std::vector<double> q;      // Q^{ij}, row-major
  std::vector<double> v;      // V^l
  double third_order = 0.0;   // max |commutator| over centred cubic probes
  double zeroth_order = 0.0;  // |commutator applied to 1|
  double q_norm() const;
  double v_norm() const;
};

/// Needs operator jets of order >= 4 (probes are carried at order 5).
CommutatorDecomposition commutator_decompose(const OperatorJets& op_t, const OperatorJets& op_s,
                                             std::span<const double> point);
CommutatorDecomposition commutator_decompose(const QuantizedOperator& op_t,
                                             const QuantizedOperator& op_s,
                                             std::span<const double> point);

struct PhaseSpacePoint {
  std::vector<double> x;
  std::vector<double> p;
};

/// K^{ij} p_i p_j for a (2,0) tensor.
double quadratic_form(const JetTensor& k_up, std::span<const double> p);

/// I_t(x, p) = g^{ia} g^{jb} K(t)_ab p_i p_j.
double integral_value(const ProjectivePair& pair, double t, const PhaseSpacePoint& phase);

struct BracketValue {
  double value;
  double scale;  // max(1, sum of |terms|)
};

/// {A, B} for A = A^{ij} p_i p_j, B = B^{ij} p_i p_j, coefficient jets of
/// order >= 1 at x.
BracketValue poisson_bracket(const JetTensor& a_up, const JetTensor& b_up,
                             std::span<const double> p);
BracketValue poisson_bracket(const ProjectivePair& pair, double t, double s,
                             const PhaseSpacePoint& phase);

struct DriftResult {
  double max_drift = 0.0;      // max |I - I_0| / max(1, |I_0|)
  double initial_value = 0.0;  // I_0
  int steps = 0;
  bool exited = false;         // left the domain before the horizon
  double exit_time = 0.0;
};

/// Integrates x'' + Gamma(x', x') = 0 with classical RK4 from (x0, v0) where
/// v0 = g^{-1} p0, and measures drift of I_t along the trajectory.
/// Throws DomainError for step <= 0 or horizon < 0.
DriftResult geodesic_drift(const ProjectivePair& pair, double t, const PhaseSpacePoint& start,
                           double horizon, double step);

/// One trajectory, drift of I_t for every t in `ts`.
std::vector<DriftResult> geodesic_drift(const ProjectivePair& pair, const std::vector<double>& ts,
                                        const PhaseSpacePoint& start, double horizon,
                                        double step);

/// Same integrator for an arbitrary quadratic integral candidate K^{ij}.
DriftResult geodesic_drift(const MetricField& metric, const std::vector<Interval>& domain,
                           const QuantizedOperator::CoefficientField& k_up,
                           const PhaseSpacePoint& start, double horizon, double step);

}  // namespace projeq
