#pragma once

// Constructions attached to a pair of metrics (g, gbar) on one chart:
//
//   L^i_j   = |det gbar / det g|^(1/(n+1)) gbar^{il} g_{lj}
//   lambda  = trace(L) / 2,   lambda_i = d_i lambda
//   phi_i   = -(L^{-1})^s_i lambda_s
//   S(t)    = adj(t Id - L) = sum_k t^k S_k
//   K(t)_ij = g_ir S(t)^r_j = sum_k t^k K_k
//
// and residual checks of the identities these objects satisfy when the
// metrics are projectively equivalent. Every residual is a dimensionless
// max-norm over components, evaluated at the base point.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "projeq/geometry.hpp"

namespace projeq {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ProjectivePair {
  std::string name;
  std::string notes;
  MetricField g;
  MetricField gbar;
  std::vector<Interval> domain;  // one open interval per coordinate

  int dim() const { return g.dim; }
  const std::vector<std::string>& coordinates() const { return g.coordinates; }
  /// Throws ShapeError when the metrics or the domain disagree in shape.
  void validate() const;
};

/// Characteristic data of a (1,1) jet tensor A, from the Faddeev-LeVerrier
/// recursion:  det(t Id - A) = sum_k charpoly[k] t^k (charpoly[n] = 1) and
/// adj(t Id - A) = sum_k adjugate[k] t^k for k = 0..n-1.
struct CharacteristicData {
  std::vector<Jet> charpoly;
  std::vector<JetTensor> adjugate;
};

CharacteristicData faddeev_leverrier(const JetTensor& a);

struct BenentiData {
  JetTensor L;                           // (1,1), order m
  Jet lambda;                            // order m
  std::optional<JetTensor> lambda_form;  // (0,1), order m-1
  std::optional<JetTensor> phi_form;     // (0,1), order m-1
  CharacteristicData characteristic;     // of L
  std::vector<JetTensor> killing_coeffs; // K_0..K_{n-1}, (0,2), order m

  /// K(t) = sum_k t^k K_k.
  JetTensor killing(double t) const;
  /// S(t) = sum_k t^k S_k.
  JetTensor comatrix(double t) const;
};

/// L from metric jets at a common point.
JetTensor build_L(const JetTensor& g, const JetTensor& gbar);
JetTensor build_L(const ProjectivePair& pair, std::span<const double> point, int order);

BenentiData benenti_data(const JetTensor& g, const JetTensor& gbar);
BenentiData benenti_data(const ProjectivePair& pair, std::span<const double> point, int order);

/// Everything the checks need at one point, computed once.
struct PointFrame {
  std::vector<double> point;
  int order = 0;
  JetTensor g;
  JetTensor ginv;
  JetTensor gbar;
  JetTensor gbar_inv;
  std::optional<JetTensor> gamma;      // order-1
  std::optional<JetTensor> gamma_bar;  // order-1
  std::optional<JetTensor> ricci;      // R_ij, order-2
  BenentiData benenti;

  /// R^i_j = g^{is} R_sj.
  JetTensor ricci_endomorphism() const;
};

PointFrame make_frame(const ProjectivePair& pair, std::span<const double> point, int order);

/// max|nabla_k L_ij - lambda_i g_jk - lambda_j g_ik| / max(1, max|nabla L|).
double check_projective_equivalence(const PointFrame& frame);
double check_projective_equivalence(const ProjectivePair& pair, std::span<const double> point,
                                    int order);

/// max|Gammabar^i_jk - Gamma^i_jk - delta^i_k phi_j - delta^i_j phi_k|
///   / max(1, max|Gammabar - Gamma|).
double check_connection_difference(const PointFrame& frame);
double check_connection_difference(const ProjectivePair& pair, std::span<const double> point,
                                   int order);

/// max|nabla_(i K_jk)| / max(1, max|nabla K|) for a symmetric (0,2) tensor.
double check_killing(const JetTensor& k, const JetTensor& gamma);

/// max|R^i_s L^s_j - L^i_s R^s_j| / max(1, max|R^i_j| * max|L^i_j|).
double check_ricci_commutation(const PointFrame& frame);
double check_ricci_commutation(const ProjectivePair& pair, std::span<const double> point,
                               int order);

/// max_j |nabla_i B^i_j| with B = R K(t) - K(t) R as endomorphisms,
///   normalized by max(1, max|R^i_j| * max|K(t)^i_j|). Needs order >= 3.
double check_carter_condition(const PointFrame& frame, double t);
double check_carter_condition(const ProjectivePair& pair, double t,
                              std::span<const double> point, int order);

/// Eigenvalues of the constant part of a (1,1) tensor.
std::vector<std::complex<double>> eigenvalues(const JetTensor& endomorphism);

/// Whether the constant part of a (1,1) tensor is diagonalizable over C, in
/// the sense that its eigenvector matrix has condition number below
/// 1/tolerance.
bool is_diagonalizable(const JetTensor& endomorphism, double tolerance = 1e-8);

/// The default parameter grid for K(t) checks.
std::vector<double> default_t_grid();

/// `grid` without values within `margin` of an eigenvalue of L at the frame.
std::vector<double> exclude_spectrum(const std::vector<double>& grid,
                                     const JetTensor& L, double margin = 1e-6);

}  // namespace projeq
