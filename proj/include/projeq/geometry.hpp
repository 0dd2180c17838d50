#pragma once

// Chart-local tensor calculus in jet arithmetic.
//
// Indices are 0-based. A JetTensor records the variance of every slot in
// order, so raising or lowering an index keeps its position. Derivative
// indices produced by `covariant_derivative` are appended as the last slot:
// the components of nabla T are T_{...;k}.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "projeq/expr.hpp"
#include "projeq/jet.hpp"

namespace projeq {

enum class Variance : unsigned char { kUp, kDown };

class JetTensor {
 public:
  JetTensor(int dim, std::vector<Variance> slots, std::vector<Jet> components);
  static JetTensor zeros(int dim, std::vector<Variance> slots, int order);
  static JetTensor scalar(Jet value);
  /// delta^i_j as constant jets.
  static JetTensor identity(int dim, int order);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(slots_.size()); }
  int order() const { return components_.front().order(); }
  const std::vector<Variance>& slots() const { return slots_; }
  /// (number of upper slots, number of lower slots)
  std::array<int, 2> valence() const;

  std::size_t size() const { return components_.size(); }
  std::span<const Jet> components() const { return components_; }
  std::span<Jet> components() { return components_; }

  std::size_t flat_index(std::initializer_list<int> idx) const;
  std::size_t flat_index(std::span<const int> idx) const;
  /// Multi-index of flat position k.
  std::vector<int> unflatten(std::size_t k) const;

  const Jet& operator()(std::initializer_list<int> idx) const {
    return components_[flat_index(idx)];
  }
  Jet& operator()(std::initializer_list<int> idx) { return components_[flat_index(idx)]; }
  const Jet& at(std::size_t k) const { return components_[k]; }
  Jet& at(std::size_t k) { return components_[k]; }

  /// Constant terms of every component, flattened.
  std::vector<double> values() const;
  /// Largest |constant term| over all components.
  double max_abs() const;

  JetTensor truncated(int order) const;

 private:
  int dim_;
  std::vector<Variance> slots_;
  std::vector<Jet> components_;
};

JetTensor operator+(const JetTensor& a, const JetTensor& b);
JetTensor operator-(const JetTensor& a, const JetTensor& b);
JetTensor operator*(double s, const JetTensor& a);

/// A metric given by component expressions over named coordinates. The
/// component matrix is symmetric by construction.
struct MetricField {
  int dim = 0;
  std::vector<std::string> coordinates;
  std::vector<expr::Expression> components;  // row-major, n*n, [i][j] == [j][i]

  /// Builds from the lower triangle: rows[i] holds entries (i, 0..i).
  static MetricField from_lower_triangle(std::vector<std::string> coordinates,
                                         const std::vector<std::vector<std::string>>& rows);

  const expr::Expression& component(int i, int j) const { return components[i * dim + j]; }
};

/// Relative degeneracy threshold: |det g| must exceed kDegeneracyTolerance *
/// (max |g_ij|)^n.
inline constexpr double kDegeneracyTolerance = 1e-10;

/// g_{ij} as jets at `point`. Throws DegeneracyError when the constant-term
/// matrix is degenerate.
JetTensor evaluate_metric(const MetricField& metric, std::span<const double> point, int order);

/// Throws DegeneracyError if the constant part of `g` fails the degeneracy
/// test.
void require_nondegenerate(const JetTensor& g, const char* what);

/// Determinant of a square rank-2 jet tensor (cofactor expansion, no
/// divisions).
Jet determinant(const JetTensor& m);

/// Inverse of a square rank-2 jet tensor by Gauss-Jordan elimination with
/// partial pivoting on constant terms. Slot variances are flipped.
JetTensor invert(const JetTensor& m);

/// g^{ij} from g_{ij}.
JetTensor inverse_metric(const JetTensor& g);

/// Gamma^i_{jk} = 1/2 g^{is} (d_j g_{sk} + d_k g_{sj} - d_s g_{jk}); one order
/// below g.
JetTensor christoffel(const JetTensor& g, const JetTensor& ginv);

/// Levi-Civita covariant derivative; the new lower index is appended last.
/// Output order is T.order() - 1.
JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma);

/// Partial derivative of every component; new lower index appended last.
JetTensor gradient(const JetTensor& t);

/// R_{ij} = d_s Gamma^s_{ij} - d_j Gamma^s_{si} + Gamma^s_{sp} Gamma^p_{ij}
///          - Gamma^s_{jp} Gamma^p_{si}; two orders below the metric.
JetTensor ricci(const JetTensor& gamma);

/// Contracts slot `slot` (lower) with g^{ab}; the slot becomes upper.
JetTensor raise_index(const JetTensor& t, const JetTensor& ginv, int slot);
/// Contracts slot `slot` (upper) with g_{ab}; the slot becomes lower.
JetTensor lower_index(const JetTensor& t, const JetTensor& g, int slot);
/// Trace over one upper and one lower slot.
JetTensor contract(const JetTensor& t, int slot_a, int slot_b);
/// Outer product; slots of `a` come first.
JetTensor tensor_product(const JetTensor& a, const JetTensor& b);
/// Matrix product of two rank-2 tensors, contracting a's second slot with b's
/// first (which must have opposite variance).
JetTensor compose(const JetTensor& a, const JetTensor& b);
/// Swaps the two slots of a rank-2 tensor.
JetTensor transpose(const JetTensor& t);

}  // namespace projeq
