#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "projeq/errors.hpp"
#include "projeq/jet.hpp"

namespace projeq {
namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

TEST(JetLayout, SizesMatchBinomialCounts) {
  for (int n = 1; n <= 4; ++n) {
    for (int m = 0; m <= 6; ++m) {
      const auto layout = JetLayout::get(n, m);
      EXPECT_EQ(layout->size(), binomial(n + m, m));
      for (int d = 0; d <= m; ++d) EXPECT_EQ(layout->prefix_size(d), binomial(n + d, d));
    }
  }
}

TEST(JetLayout, GradedOrderIsAPrefixAcrossOrders) {
  const auto low = JetLayout::get(3, 2);
  const auto high = JetLayout::get(3, 5);
  for (std::size_t k = 0; k < low->size(); ++k) {
    EXPECT_EQ(low->multi_index(k), high->multi_index(k));
    EXPECT_EQ(high->index_of(low->multi_index(k)), k);
  }
}

TEST(JetLayout, IndexBeyondOrderThrows) {
  const auto layout = JetLayout::get(2, 2);
  EXPECT_THROW(layout->index_of({2, 1}), OrderExhaustedError);
}

TEST(JetLayout, InterningReturnsTheSameInstance) {
  EXPECT_EQ(JetLayout::get(2, 4).get(), JetLayout::get(2, 4).get());
}

TEST(Jet, PolynomialProductMatchesHandExpansion) {
  // (1 + x)(2 - y) at the origin = 2 + 2x - y - xy.
  const std::vector<double> origin{0.0, 0.0};
  const auto v = seed_coordinates(origin, 3);
  const Jet f = (1.0 + v[0]) * (2.0 - v[1]);
  EXPECT_DOUBLE_EQ(f.coeff({0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(f.coeff({1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(f.coeff({0, 1}), -1.0);
  EXPECT_DOUBLE_EQ(f.coeff({1, 1}), -1.0);
  EXPECT_DOUBLE_EQ(f.coeff({2, 0}), 0.0);
}

TEST(Jet, ExpCoefficientsAreExpOverFactorial) {
  const std::vector<double> p{0.3};
  const Jet f = exp(seed_coordinates(p, 7)[0]);
  for (int k = 0; k <= 7; ++k) {
    EXPECT_NEAR(f.coeff({k}), std::exp(0.3) / factorial(k), 1e-15);
  }
}

TEST(Jet, SinOfSumHasShiftedPhaseDerivatives) {
  // d^a sin(x + y) = sin(x + y + |a| pi / 2).
  const std::vector<double> p{0.4, -1.1};
  const auto v = seed_coordinates(p, 5);
  const Jet f = sin(v[0] + v[1]);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const MultiIndex& a = f.layout().multi_index(k);
    const int total = a[0] + a[1];
    EXPECT_NEAR(partial(f, a), std::sin(p[0] + p[1] + total * std::numbers::pi / 2), 1e-13);
  }
}

TEST(Jet, LogSqrtAndPowMatchClosedForms) {
  const std::vector<double> p{1.7};
  const Jet x = seed_coordinates(p, 6)[0];
  const Jet l = log(x);
  const Jet s = sqrt(x);
  const Jet q = pow(x, -2.5);
  for (int k = 1; k <= 6; ++k) {
    // d^k ln x = (-1)^(k-1) (k-1)! / x^k.
    EXPECT_NEAR(partial(l, {k}), std::pow(-1.0, k - 1) * factorial(k - 1) / std::pow(1.7, k),
                1e-12);
    double falling = 1.0, falling_q = 1.0;
    for (int i = 0; i < k; ++i) {
      falling *= 0.5 - i;
      falling_q *= -2.5 - i;
    }
    EXPECT_NEAR(partial(s, {k}), falling * std::pow(1.7, 0.5 - k), 1e-12);
    EXPECT_NEAR(partial(q, {k}), falling_q * std::pow(1.7, -2.5 - k), 1e-11);
  }
}

TEST(Jet, IntegerPowerOfNegativeBase) {
  const std::vector<double> p{-1.5};
  const Jet x = seed_coordinates(p, 4)[0];
  const Jet c = pow(x, 3.0);
  EXPECT_DOUBLE_EQ(c.value(), -3.375);
  EXPECT_DOUBLE_EQ(partial(c, {1}), 3 * 2.25);
  EXPECT_DOUBLE_EQ(partial(c, {2}), 6 * -1.5);
  EXPECT_DOUBLE_EQ(partial(c, {3}), 6.0);
  EXPECT_DOUBLE_EQ(partial(c, {4}), 0.0);
}

TEST(Jet, DivisionInvertsMultiplication) {
  const std::vector<double> p{0.2, 0.9, -0.4};
  const auto v = seed_coordinates(p, 5);
  const Jet a = exp(v[0]) + v[1] * v[2];
  const Jet b = 2.0 + sin(v[1] - v[2]);
  const Jet back = (a / b) * b;
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(back[k], a[k], 1e-14);
}

TEST(Jet, DifferentiateShiftsCoefficients) {
  const std::vector<double> p{0.5, 0.25};
  const auto v = seed_coordinates(p, 5);
  const Jet f = exp(v[0] * v[1]);
  const Jet dx = differentiate(f, 0);
  EXPECT_EQ(dx.order(), 4);
  for (std::size_t k = 0; k < dx.size(); ++k) {
    MultiIndex a = dx.layout().multi_index(k);
    MultiIndex shifted = a;
    shifted[0] += 1;
    EXPECT_NEAR(partial(dx, a), partial(f, shifted), 1e-12);
  }
}

TEST(Jet, TruncateKeepsThePrefix) {
  const std::vector<double> p{0.1, 0.2};
  const Jet f = cos(seed_coordinates(p, 6)[0]) * seed_coordinates(p, 6)[1];
  const Jet t = truncate(f, 3);
  ASSERT_EQ(t.order(), 3);
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_EQ(t[k], f[k]);
}

TEST(Jet, ErrorsCarryTheirKind) {
  const std::vector<double> zero{0.0};
  const Jet x = seed_coordinates(zero, 3)[0];
  EXPECT_THROW(reciprocal(x), SingularInputError);
  EXPECT_THROW(log(x), SingularInputError);
  EXPECT_THROW(sqrt(x), SingularInputError);
  EXPECT_THROW(abs(x), SingularInputError);
  EXPECT_THROW(pow(x - 1.0, 0.5), SingularInputError);
  EXPECT_THROW(Jet(2, 3) + Jet(2, 4), ShapeError);
  EXPECT_THROW(Jet(1, 3) * Jet(2, 3), ShapeError);
  const std::vector<double> bad{std::nan("")};
  EXPECT_THROW(seed_coordinates(bad, 2), DomainError);
  try {
    reciprocal(x);
  } catch (const SingularInputError& e) {
    EXPECT_EQ(e.operation(), "reciprocal");
  }
}

TEST(Jet, AbsFlipsSignOfNegativeJets) {
  const std::vector<double> p{-2.0};
  const Jet x = seed_coordinates(p, 2)[0];
  const Jet a = abs(x * x * x);
  EXPECT_DOUBLE_EQ(a.value(), 8.0);
  EXPECT_DOUBLE_EQ(partial(a, {1}), -12.0);
}

// Chain rule against finite differences for random composite functions.
TEST(JetProperty, ChainRuleMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto f = oracles::random_composite(rng, n);
    std::vector<double> p(n);
    for (auto& c : p) c = oracles::uniform(rng, -1.0, 1.0);
    const Jet j = f.eval(std::span<const Jet>(seed_coordinates(p, 2)));
    const oracles::ScalarField field = [&f](std::span<const double> x) { return f.eval(x); };
    for (std::size_t k = 1; k < j.size(); ++k) {
      const MultiIndex& a = j.layout().multi_index(k);
      const double fd = oracles::fd_partial(field, p, a, 1e-3);
      EXPECT_TRUE(oracles::close_relative(partial(j, a), fd, 1e-4))
          << f.description << " trial " << trial << " jet " << partial(j, a) << " fd " << fd;
    }
    EXPECT_DOUBLE_EQ(j.value(), f.eval(p));
  }
}

TEST(JetProperty, ProductRuleAndLinearity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p{oracles::uniform(rng, -1, 1), oracles::uniform(rng, -1, 1)};
    const auto v = seed_coordinates(p, 4);
    const Jet a = sin(v[0]) + v[1];
    const Jet b = exp(v[1] - v[0]);
    const double s = oracles::uniform(rng, -3, 3);
    const Jet lhs = differentiate(a * b + s * a, 0);
    const Jet rhs = truncate(differentiate(a, 0), 3) * truncate(b, 3) +
                    truncate(a, 3) * truncate(differentiate(b, 0), 3) +
                    s * truncate(differentiate(a, 0), 3);
    for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-12);
  }
}

}  // namespace
}  // namespace projeq
