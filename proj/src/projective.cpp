#include "projeq/projective.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "projeq/errors.hpp"

namespace projeq {

void ProjectivePair::validate() const {
  if (g.dim < 1) throw ShapeError("pair has no coordinates");
  if (g.dim != gbar.dim || g.coordinates != gbar.coordinates) {
    throw ShapeError("metrics of a pair must share dimension and coordinates");
  }
  if (static_cast<int>(domain.size()) != g.dim) {
    throw ShapeError(fmt::format("domain has {} intervals for {} coordinates", domain.size(),
                                 g.dim));
  }
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!(domain[i].lo < domain[i].hi) || !std::isfinite(domain[i].lo) ||
        !std::isfinite(domain[i].hi)) {
      throw ShapeError(fmt::format("domain interval for '{}' is empty or unbounded",
                                   g.coordinates[i]));
    }
  }
}

CharacteristicData faddeev_leverrier(const JetTensor& a) {
  if (a.rank() != 2 || a.slots()[0] != Variance::kUp || a.slots()[1] != Variance::kDown) {
    throw ShapeError("Faddeev-LeVerrier needs a (1,1) tensor");
  }
  const int n = a.dim();
  const int order = a.order();
  const JetTensor id = JetTensor::identity(n, order);

  CharacteristicData out;
  out.charpoly.assign(n + 1, Jet(n, order));
  out.charpoly[n] = Jet(n, order, 1.0);
  // M_1 = Id; M_k = A M_{k-1} + c_{n-k+1} Id; c_{n-k} = -tr(A M_k) / k.
  // adj(t Id - A) = sum_{k=1}^{n} M_k t^{n-k}.
  std::vector<JetTensor> m;
  m.push_back(id);
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      JetTensor next = compose(a, m.back());
      for (int i = 0; i < n; ++i) next({i, i}) += out.charpoly[n - k + 1];
      m.push_back(std::move(next));
    }
    const JetTensor am = compose(a, m.back());
    Jet trace(n, order);
    for (int i = 0; i < n; ++i) trace += am({i, i});
    out.charpoly[n - k] = trace * (-1.0 / k);
  }
  out.adjugate.reserve(n);
  for (int j = 0; j < n; ++j) out.adjugate.push_back(m[n - 1 - j]);
  return out;
}

JetTensor build_L(const JetTensor& g, const JetTensor& gbar) {
  if (g.dim() != gbar.dim() || g.order() != gbar.order()) {
    throw ShapeError("metric jets of a pair must agree in dimension and order");
  }
  const int n = g.dim();
  const JetTensor gbar_inv = inverse_metric(gbar);
  require_nondegenerate(g, "metric g");
  const Jet ratio = determinant(gbar) / determinant(g);
  const Jet factor = pow(abs(ratio), 1.0 / (n + 1));
  JetTensor l = compose(gbar_inv, g);
  for (auto& c : l.components()) c = factor * c;
  return l;
}

JetTensor build_L(const ProjectivePair& pair, std::span<const double> point, int order) {
  return build_L(evaluate_metric(pair.g, point, order), evaluate_metric(pair.gbar, point, order));
}

JetTensor BenentiData::killing(double t) const {
  JetTensor k = killing_coeffs.back();
  for (int j = static_cast<int>(killing_coeffs.size()) - 2; j >= 0; --j) {
    k = t * k + killing_coeffs[j];
  }
  return k;
}

JetTensor BenentiData::comatrix(double t) const {
  const auto& s = characteristic.adjugate;
  JetTensor out = s.back();
  for (int j = static_cast<int>(s.size()) - 2; j >= 0; --j) out = t * out + s[j];
  return out;
}

BenentiData benenti_data(const JetTensor& g, const JetTensor& gbar) {
  JetTensor l = build_L(g, gbar);
  const int n = g.dim();
  const int order = g.order();
  Jet lambda(n, order);
  for (int i = 0; i < n; ++i) lambda += l({i, i});
  lambda *= 0.5;

  std::optional<JetTensor> lambda_form, phi_form;
  if (order >= 1) {
    lambda_form = gradient(JetTensor::scalar(lambda));
    // phi_i = -(L^{-1})^s_i lambda_s
    const JetTensor l_inv = invert(l).truncated(order - 1);
    auto phi = JetTensor::zeros(n, {Variance::kDown}, order - 1);
    for (int i = 0; i < n; ++i) {
      Jet acc(n, order - 1);
      for (int s = 0; s < n; ++s) acc.add_product(l_inv({s, i}), (*lambda_form)({s}));
      phi({i}) = -acc;
    }
    phi_form = std::move(phi);
  }

  CharacteristicData ch = faddeev_leverrier(l);
  std::vector<JetTensor> k;
  k.reserve(n);
  for (const auto& s : ch.adjugate) k.push_back(lower_index(s, g, 0));

  return BenentiData{std::move(l),        std::move(lambda), std::move(lambda_form),
                     std::move(phi_form), std::move(ch),     std::move(k)};
}

BenentiData benenti_data(const ProjectivePair& pair, std::span<const double> point, int order) {
  return benenti_data(evaluate_metric(pair.g, point, order),
                      evaluate_metric(pair.gbar, point, order));
}

JetTensor PointFrame::ricci_endomorphism() const {
  if (!ricci) throw OrderExhaustedError("frame order too low for the Ricci tensor");
  return raise_index(*ricci, ginv, 0);
}

PointFrame make_frame(const ProjectivePair& pair, std::span<const double> point, int order) {
  JetTensor g = evaluate_metric(pair.g, point, order);
  JetTensor gbar = evaluate_metric(pair.gbar, point, order);
  JetTensor ginv = inverse_metric(g);
  JetTensor gbar_inv = inverse_metric(gbar);
  std::optional<JetTensor> gamma, gamma_bar, ric;
  if (order >= 1) {
    gamma = christoffel(g, ginv);
    gamma_bar = christoffel(gbar, gbar_inv);
  }
  if (order >= 2) ric = ricci(*gamma);
  BenentiData benenti = benenti_data(g, gbar);
  return PointFrame{std::vector<double>(point.begin(), point.end()),
                    order,
                    std::move(g),
                    std::move(ginv),
                    std::move(gbar),
                    std::move(gbar_inv),
                    std::move(gamma),
                    std::move(gamma_bar),
                    std::move(ric),
                    std::move(benenti)};
}

namespace {

void require_order(const PointFrame& f, int needed, const char* what) {
  if (f.order < needed) {
    throw OrderExhaustedError(
        fmt::format("{} needs jets of order >= {}, frame has order {}", what, needed, f.order));
  }
}

}  // namespace

double check_projective_equivalence(const PointFrame& frame) {
  require_order(frame, 1, "projective-equivalence check");
  const int n = frame.g.dim();
  const JetTensor l_low = lower_index(frame.benenti.L, frame.g, 0);  // L_ij
  const JetTensor dl = covariant_derivative(l_low, *frame.gamma);     // (i, j, k) = nabla_k L_ij
  const JetTensor& lam = *frame.benenti.lambda_form;
  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double rhs = lam({i}).value() * frame.g({j, k}).value() +
                           lam({j}).value() * frame.g({i, k}).value();
        defect = std::max(defect, std::abs(dl({i, j, k}).value() - rhs));
      }
    }
  }
  return defect / std::max(1.0, dl.max_abs());
}

double check_projective_equivalence(const ProjectivePair& pair, std::span<const double> point,
                                    int order) {
  return check_projective_equivalence(make_frame(pair, point, order));
}

double check_connection_difference(const PointFrame& frame) {
  require_order(frame, 1, "connection-difference check");
  const int n = frame.g.dim();
  const JetTensor& phi = *frame.benenti.phi_form;
  double defect = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double diff =
            (*frame.gamma_bar)({i, j, k}).value() - (*frame.gamma)({i, j, k}).value();
        const double rhs = (i == k ? phi({j}).value() : 0.0) + (i == j ? phi({k}).value() : 0.0);
        defect = std::max(defect, std::abs(diff - rhs));
        scale = std::max(scale, std::abs(diff));
      }
    }
  }
  return defect / std::max(1.0, scale);
}

double check_connection_difference(const ProjectivePair& pair, std::span<const double> point,
                                   int order) {
  return check_connection_difference(make_frame(pair, point, order));
}

double check_killing(const JetTensor& k, const JetTensor& gamma) {
  if (k.rank() != 2 || k.slots()[0] != Variance::kDown || k.slots()[1] != Variance::kDown) {
    throw ShapeError("Killing check needs a (0,2) tensor");
  }
  const int n = k.dim();
  const JetTensor dk = covariant_derivative(k, gamma);  // (j, k, i) = nabla_i K_jk
  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        // Sum over all six permutations of (i, j, l), divided by 6.
        const double s = dk({j, l, i}).value() + dk({l, j, i}).value() +
                         dk({l, i, j}).value() + dk({i, l, j}).value() +
                         dk({i, j, l}).value() + dk({j, i, l}).value();
        defect = std::max(defect, std::abs(s / 6.0));
      }
    }
  }
  return defect / std::max(1.0, dk.max_abs());
}

double check_ricci_commutation(const PointFrame& frame) {
  require_order(frame, 2, "Ricci commutation check");
  const JetTensor r = frame.ricci_endomorphism();
  const JetTensor& l = frame.benenti.L;
  const JetTensor c = compose(r, l) - compose(l, r);
  return c.max_abs() / std::max(1.0, r.max_abs() * l.max_abs());
}

double check_ricci_commutation(const ProjectivePair& pair, std::span<const double> point,
                               int order) {
  return check_ricci_commutation(make_frame(pair, point, order));
}

double check_carter_condition(const PointFrame& frame, double t) {
  require_order(frame, 3, "Carter condition check");
  const JetTensor r = frame.ricci_endomorphism();                       // order m-2
  const JetTensor k = raise_index(frame.benenti.killing(t), frame.ginv, 0);  // K^i_j
  const JetTensor b = compose(r, k) - compose(k, r);
  const JetTensor db = covariant_derivative(b, *frame.gamma);  // (i, j, k) = nabla_k B^i_j
  const JetTensor div = contract(db, 0, 2);
  return div.max_abs() / std::max(1.0, r.max_abs() * k.max_abs());
}

double check_carter_condition(const ProjectivePair& pair, double t,
                              std::span<const double> point, int order) {
  return check_carter_condition(make_frame(pair, point, order), t);
}

namespace {

Eigen::MatrixXd constant_matrix(const JetTensor& m) {
  const int n = m.dim();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = m({i, j}).value();
  }
  return a;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const JetTensor& endomorphism) {
  if (endomorphism.rank() != 2) throw ShapeError("eigenvalues need a rank-2 tensor");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(constant_matrix(endomorphism), false);
  const auto ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

bool is_diagonalizable(const JetTensor& endomorphism, double tolerance) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(constant_matrix(endomorphism), true);
  const Eigen::MatrixXcd v = solver.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest == 0.0) return false;
  return sv(0) / smallest < 1.0 / tolerance;
}

std::vector<double> default_t_grid() { return {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0}; }

std::vector<double> exclude_spectrum(const std::vector<double>& grid, const JetTensor& L,
                                     double margin) {
  const auto ev = eigenvalues(L);
  std::vector<double> out;
  for (double t : grid) {
    bool near = false;
    for (const auto& e : ev) near = near || std::abs(std::complex<double>(t, 0.0) - e) <= margin;
    if (!near) out.push_back(t);
  }
  return out;
}

}  // namespace projeq
