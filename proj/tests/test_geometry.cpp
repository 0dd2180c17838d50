#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "projeq/errors.hpp"
#include "projeq/geometry.hpp"

namespace projeq {
namespace {

using Rows = std::vector<std::vector<std::string>>;

struct Geometry {
  JetTensor g;
  JetTensor ginv;
  JetTensor gamma;
};

Geometry at(const MetricField& m, std::vector<double> p, int order) {
  JetTensor g = evaluate_metric(m, p, order);
  JetTensor ginv = inverse_metric(g);
  JetTensor gamma = christoffel(g, ginv);
  return {g, ginv, gamma};
}

TEST(Christoffel, PolarCoordinates) {
  const auto m = MetricField::from_lower_triangle({"r", "th"}, Rows{{"1"}, {"0", "r^2"}});
  const auto geo = at(m, {1.7, 0.4}, 3);
  EXPECT_NEAR(geo.gamma({0, 1, 1}).value(), -1.7, 1e-15);
  EXPECT_NEAR(geo.gamma({1, 0, 1}).value(), 1 / 1.7, 1e-15);
  EXPECT_NEAR(geo.gamma({1, 1, 0}).value(), 1 / 1.7, 1e-15);
  EXPECT_NEAR(geo.gamma({0, 0, 0}).value(), 0.0, 1e-15);
  EXPECT_NEAR(geo.gamma({1, 1, 1}).value(), 0.0, 1e-15);
  // Derivatives of Gamma^th_{r th} = 1/r.
  EXPECT_NEAR(partial(geo.gamma({1, 0, 1}), {1, 0}), -1 / (1.7 * 1.7), 1e-14);
  EXPECT_NEAR(partial(geo.gamma({1, 0, 1}), {2, 0}), 2 / std::pow(1.7, 3), 1e-13);
  EXPECT_EQ(geo.gamma.order(), 2);
}

TEST(Christoffel, DerivativesMatchFiniteDifferencesOfClosedForm) {
  // Gamma^x_{yy} = -(1/2) d_x (x^2 e^y) / (1 + x^2) for g = diag(1 + x^2, x^2 e^y).
  const auto m = MetricField::from_lower_triangle({"x", "y"}, Rows{{"1 + x^2"}, {"0", "x^2*exp(y)"}});
  const std::vector<double> p{0.8, 0.3};
  const auto geo = at(m, p, 3);
  const oracles::ScalarField closed = [](std::span<const double> q) {
    return -q[0] * std::exp(q[1]) / (1 + q[0] * q[0]);
  };
  EXPECT_NEAR(geo.gamma({0, 1, 1}).value(), closed(p), 1e-15);
  for (const MultiIndex& a : {MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{1, 1}, MultiIndex{2, 0}}) {
    EXPECT_TRUE(oracles::close_relative(partial(geo.gamma({0, 1, 1}), a),
                                        oracles::fd_partial(closed, p, a, 1e-3), 1e-8));
  }
}

TEST(Ricci, UnitSphereIsEinstein) {
  const auto m =
      MetricField::from_lower_triangle({"theta", "phi"}, Rows{{"1"}, {"0", "sin(theta)^2"}});
  const auto geo = at(m, {0.9, 0.2}, 3);
  const JetTensor r = ricci(geo.gamma);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(r({i, j}).value(), geo.g({i, j}).value(), 1e-14);
  }
}

TEST(Ricci, HyperbolicHalfPlaneHasCurvatureMinusOne) {
  const auto m = MetricField::from_lower_triangle({"x", "y"}, Rows{{"1/y^2"}, {"0", "1/y^2"}});
  const auto geo = at(m, {0.3, 1.4}, 2);
  const JetTensor r = ricci(geo.gamma);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(r({i, j}).value(), -geo.g({i, j}).value(), 1e-14);
  }
}

TEST(Ricci, ThreeSphereIsTwiceTheMetric) {
  const auto m = MetricField::from_lower_triangle(
      {"a", "b", "c"}, Rows{{"1"}, {"0", "sin(a)^2"}, {"0", "0", "sin(a)^2*sin(b)^2"}});
  const auto geo = at(m, {1.1, 0.7, 0.1}, 2);
  const JetTensor r = ricci(geo.gamma);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(r({i, j}).value(), 2 * geo.g({i, j}).value(), 1e-14);
    }
  }
}

TEST(CovariantDerivative, MetricIsParallel) {
  std::mt19937_64 rng(5);
  const auto m = MetricField::from_lower_triangle(
      {"x", "y", "z"},
      Rows{{"2 + sin(x*y)"}, {"0.3*z", "1 + x^2"}, {"0.1*x*y", "0", "3 + cos(z)"}});
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> p{oracles::uniform(rng, -1, 1), oracles::uniform(rng, -1, 1),
                          oracles::uniform(rng, -1, 1)};
    const auto geo = at(m, p, 3);
    const JetTensor dg = covariant_derivative(geo.g, geo.gamma);
    EXPECT_EQ(dg.rank(), 3);
    EXPECT_EQ(dg.order(), 2);
    for (const Jet& c : dg.components()) {
      for (double v : c.coeffs()) EXPECT_NEAR(v, 0.0, 1e-12);
    }
    const JetTensor dginv = covariant_derivative(geo.ginv, geo.gamma);
    for (const Jet& c : dginv.components()) {
      for (double v : c.coeffs()) EXPECT_NEAR(v, 0.0, 1e-12);
    }
  }
}

TEST(CovariantDerivative, ScalarGradientIsThePartialDerivative) {
  const std::vector<double> p{0.5, -0.2};
  const auto v = seed_coordinates(p, 3);
  const JetTensor f = JetTensor::scalar(v[0] * v[0] * v[1]);
  const JetTensor df = gradient(f);
  EXPECT_NEAR(df({0}).value(), 2 * 0.5 * -0.2, 1e-15);
  EXPECT_NEAR(df({1}).value(), 0.25, 1e-15);
  EXPECT_EQ(df.slots()[0], Variance::kDown);
}

TEST(LinearAlgebra, DeterminantAndInverseMatchOracle) {
  std::mt19937_64 rng(9);
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> vals(n * n);
      for (auto& v : vals) v = oracles::uniform(rng, -2, 2);
      std::vector<Jet> comps;
      for (double v : vals) comps.emplace_back(n, 0, v);
      const JetTensor a(n, {Variance::kUp, Variance::kDown}, comps);
      EXPECT_NEAR(determinant(a).value(), oracles::determinant(vals, n), 1e-12);
      const auto inv = oracles::inverse(vals, n);
      const JetTensor ai = invert(a);
      for (int k = 0; k < n * n; ++k) EXPECT_NEAR(ai.at(k).value(), inv[k], 1e-10);
    }
  }
}

TEST(LinearAlgebra, JetInverseComposesToIdentity) {
  const auto m = MetricField::from_lower_triangle(
      {"x", "y"}, Rows{{"1 + x^2"}, {"x*y", "2 + sin(y)"}});
  const JetTensor g = evaluate_metric(m, std::vector<double>{0.4, 0.9}, 4);
  const JetTensor ginv = inverse_metric(g);
  EXPECT_EQ(ginv.slots()[0], Variance::kUp);
  const JetTensor id = compose(ginv, g);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Jet& c = id({i, j});
      EXPECT_NEAR(c.value(), i == j ? 1.0 : 0.0, 1e-14);
      for (std::size_t k = 1; k < c.size(); ++k) EXPECT_NEAR(c[k], 0.0, 1e-13);
    }
  }
}

TEST(LinearAlgebra, RaiseLowerContractTranspose) {
  const auto m = MetricField::from_lower_triangle({"x", "y"}, Rows{{"2"}, {"1", "3"}});
  const JetTensor g = evaluate_metric(m, std::vector<double>{0, 0}, 1);
  const JetTensor ginv = inverse_metric(g);
  const JetTensor mixed = raise_index(g, ginv, 0);
  EXPECT_NEAR(contract(mixed, 0, 1).at(0).value(), 2.0, 1e-15);
  const JetTensor back = lower_index(mixed, g, 0);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(back.at(k).value(), g.at(k).value(), 1e-15);
  std::vector<Jet> comps{Jet(2, 0, 1), Jet(2, 0, 2), Jet(2, 0, 3), Jet(2, 0, 4)};
  const JetTensor a(2, {Variance::kUp, Variance::kDown}, comps);
  EXPECT_EQ(transpose(a)({0, 1}).value(), 3.0);
  EXPECT_EQ(tensor_product(a, a).rank(), 4);
}

TEST(Errors, DegenerateMetricIsRejected) {
  const auto m = MetricField::from_lower_triangle({"x", "y"}, Rows{{"x"}, {"0", "1"}});
  EXPECT_THROW(evaluate_metric(m, std::vector<double>{0.0, 0.5}, 1), DegeneracyError);
  std::vector<Jet> comps{Jet(2, 1, 1e-12), Jet(2, 1), Jet(2, 1), Jet(2, 1, 1.0)};
  const JetTensor g(2, {Variance::kDown, Variance::kDown}, comps);
  EXPECT_THROW(require_nondegenerate(g, "g"), DegeneracyError);
  EXPECT_THROW(inverse_metric(g), DegeneracyError);
  EXPECT_THROW(evaluate_metric(m, std::vector<double>{0.0}, 1), ShapeError);
}

TEST(Errors, NonSymmetricRowsRejected) {
  EXPECT_THROW(MetricField::from_lower_triangle({"x", "y"}, Rows{{"1"}, {"0"}}), ShapeError);
}

}  // namespace
}  // namespace projeq
