#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "projeq/catalog.hpp"
#include "projeq/errors.hpp"
#include "projeq/projective.hpp"

namespace projeq {
namespace {

using Rows = std::vector<std::vector<std::string>>;

JetTensor random_endomorphism(std::mt19937_64& rng, int n, int order) {
  // Constant part plus random nilpotent parts, so the identities are tested
  // on full jets rather than on numbers only.
  const std::vector<double> origin(n, 0.0);
  const auto v = seed_coordinates(origin, order);
  std::vector<Jet> comps;
  for (int k = 0; k < n * n; ++k) {
    Jet c(n, order, oracles::uniform(rng, -2, 2));
    for (int i = 0; i < n; ++i) c += oracles::uniform(rng, -1, 1) * v[i];
    c += oracles::uniform(rng, -0.5, 0.5) * v[0] * v[n - 1];
    comps.push_back(c);
  }
  return JetTensor(n, {Variance::kUp, Variance::kDown}, comps);
}

ProjectivePair curved_nonequivalent() {
  ProjectivePair p;
  p.name = "curved_nonequivalent";
  p.g = MetricField::from_lower_triangle(
      {"x", "y", "z"}, Rows{{"1 + y^2"}, {"0", "1 + z^2"}, {"0", "0", "1 + x^2"}});
  p.gbar = MetricField::from_lower_triangle(
      {"x", "y", "z"}, Rows{{"2 + x"}, {"0.1*x", "1 + z^2"}, {"0", "0", "1 + y^2"}});
  p.domain = {{-1, 1}, {-1, 1}, {-1, 1}};
  p.validate();
  return p;
}

TEST(FaddeevLeVerrier, AdjugateIdentityHoldsOnJets) {
  std::mt19937_64 rng(21);
  for (int n = 2; n <= 3; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const JetTensor a = random_endomorphism(rng, n, 2);
      const CharacteristicData cd = faddeev_leverrier(a);
      ASSERT_EQ(static_cast<int>(cd.charpoly.size()), n + 1);
      ASSERT_EQ(static_cast<int>(cd.adjugate.size()), n);
      const double t = oracles::uniform(rng, -3, 3);
      // M = t Id - A, adj(M) = sum t^k adjugate[k], det(M) = sum t^k charpoly[k].
      const JetTensor m = t * JetTensor::identity(n, 2) - a;
      JetTensor adj = JetTensor::zeros(n, {Variance::kUp, Variance::kDown}, 2);
      Jet det(n, 2);
      double tk = 1.0;
      for (int k = 0; k <= n; ++k) {
        if (k < n) adj = adj + tk * cd.adjugate[k];
        det += tk * cd.charpoly[k];
        tk *= t;
      }
      const JetTensor prod = compose(adj, m);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const Jet expected = i == j ? det : Jet(n, 2);
          for (std::size_t k = 0; k < det.size(); ++k) {
            EXPECT_NEAR(prod({i, j})[k], expected[k], 1e-9 * std::max(1.0, std::abs(det[k])));
          }
        }
      }
      EXPECT_NEAR(determinant(m).value(), det.value(), 1e-9 * std::max(1.0, std::abs(det.value())));
    }
  }
}

TEST(FaddeevLeVerrier, KillingFamilyIsPolynomialOfDegreeNMinusOne) {
  const char* names[] = {"dini", "beltrami", "levi_civita3", "trivial3"};
  for (const char* name : names) {
    const auto& pair = catalog::get_entry(name).pair;
    const int n = pair.dim();
    std::vector<double> p;
    for (const auto& iv : pair.domain) p.push_back(0.6 * iv.lo + 0.4 * iv.hi);
    const BenentiData b = benenti_data(pair, p, 2);
    std::vector<double> nodes;
    for (int k = 0; k < n; ++k) nodes.push_back(-1.0 + 1.3 * k);
    for (double t : {-2.5, 0.3, 4.0}) {
      const JetTensor direct = b.killing(t);
      // Lagrange interpolation through the n nodes.
      JetTensor interp = JetTensor::zeros(n, {Variance::kDown, Variance::kDown}, 2);
      for (int a = 0; a < n; ++a) {
        double w = 1.0;
        for (int c = 0; c < n; ++c) {
          if (c != a) w *= (t - nodes[c]) / (nodes[a] - nodes[c]);
        }
        interp = interp + w * b.killing(nodes[a]);
      }
      for (std::size_t k = 0; k < direct.size(); ++k) {
        for (std::size_t q = 0; q < direct.at(k).size(); ++q) {
          EXPECT_NEAR(direct.at(k)[q], interp.at(k)[q],
                      1e-9 * std::max(1.0, std::abs(direct.at(k)[q])))
              << name;
        }
      }
    }
  }
}

TEST(Benenti, DiniClosedForms) {
  const auto& pair = catalog::get_entry("dini").pair;
  const std::vector<double> p{2.3, 0.4};
  const BenentiData b = benenti_data(pair, p, 3);
  EXPECT_NEAR(b.L({0, 0}).value(), 2.3, 1e-14);
  EXPECT_NEAR(b.L({1, 1}).value(), 0.4, 1e-14);
  EXPECT_NEAR(b.L({0, 1}).value(), 0.0, 1e-14);
  EXPECT_NEAR(partial(b.L({0, 0}), {1, 0}), 1.0, 1e-13);
  EXPECT_NEAR(b.lambda.value(), 0.5 * (2.3 + 0.4), 1e-14);
  ASSERT_TRUE(b.lambda_form && b.phi_form);
  EXPECT_NEAR((*b.lambda_form)({0}).value(), 0.5, 1e-14);
  EXPECT_NEAR((*b.lambda_form)({1}).value(), 0.5, 1e-14);
  // phi = -(1/2) d ln det L.
  EXPECT_NEAR((*b.phi_form)({0}).value(), -1 / (2 * 2.3), 1e-14);
  EXPECT_NEAR((*b.phi_form)({1}).value(), -1 / (2 * 0.4), 1e-14);
  // K(t) = (x - y) diag(t - y, t - x).
  for (double t : {-1.0, 0.0, 2.5}) {
    const JetTensor k = b.killing(t);
    EXPECT_NEAR(k({0, 0}).value(), (2.3 - 0.4) * (t - 0.4), 1e-13);
    EXPECT_NEAR(k({1, 1}).value(), (2.3 - 0.4) * (t - 2.3), 1e-13);
    EXPECT_NEAR(k({0, 1}).value(), 0.0, 1e-13);
  }
}

TEST(Benenti, BeltramiLIsIdentityPlusOuterProduct) {
  const auto& pair = catalog::get_entry("beltrami").pair;
  const std::vector<double> p{0.3, -0.7};
  const JetTensor L = build_L(pair, p, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(L({i, j}).value(), (i == j ? 1.0 : 0.0) + p[i] * p[j], 1e-14);
    }
  }
}

TEST(Benenti, TrivialPairHasIdentityL) {
  const auto& pair = catalog::get_entry("trivial").pair;
  const std::vector<double> p{1.0, 0.2};
  const BenentiData b = benenti_data(pair, p, 2);
  EXPECT_NEAR(b.L({0, 0}).value(), 1.0, 1e-15);
  EXPECT_NEAR(b.L({1, 1}).value(), 1.0, 1e-15);
  // ḡ = g, n = 2: K(t) = (t - 1) g.
  const JetTensor k = b.killing(3.0);
  EXPECT_NEAR(k({1, 1}).value(), 2.0 * std::sin(1.0) * std::sin(1.0), 1e-14);
}

TEST(Checks, EquivalentPairsHaveRoundoffResiduals) {
  std::mt19937_64 rng(4);
  for (const auto& e : catalog::all_entries()) {
    if (!e.expected_equivalent) continue;
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> p;
      for (const auto& iv : e.pair.domain) p.push_back(oracles::uniform(rng, iv.lo, iv.hi));
      const PointFrame f = make_frame(e.pair, p, 3);
      EXPECT_LE(check_projective_equivalence(f), 1e-8) << e.name;
      EXPECT_LE(check_connection_difference(f), 1e-8) << e.name;
      EXPECT_LE(check_ricci_commutation(f), 1e-8) << e.name;
      for (double t : default_t_grid()) {
        EXPECT_LE(check_killing(f.benenti.killing(t), *f.gamma), 1e-9) << e.name;
        EXPECT_LE(check_carter_condition(f, t), 1e-7) << e.name;
      }
    }
  }
}

TEST(Checks, FlatNonEquivalentControlFailsStructureChecks) {
  const auto& pair = catalog::get_entry("control_nonequiv").pair;
  const std::vector<double> p{1.2, 0.3};
  EXPECT_GT(check_projective_equivalence(pair, p, 2), 1e-2);
  EXPECT_GT(check_connection_difference(pair, p, 2), 1e-2);
  // With g flat the Ricci endomorphism vanishes, so this check is silent.
  EXPECT_EQ(check_ricci_commutation(pair, p, 2), 0.0);
}

TEST(Checks, CurvedNonEquivalentPairFailsRicciAndCarter) {
  const ProjectivePair pair = curved_nonequivalent();
  const std::vector<double> p{2.3 - 2, 1.4 - 1, 0.6};
  EXPECT_GT(check_projective_equivalence(pair, p, 3), 1e-2);
  EXPECT_GT(check_ricci_commutation(pair, p, 3), 1e-3);
  EXPECT_GT(check_carter_condition(pair, 0.5, p, 3), 1e-3);
}

TEST(Checks, NonKillingControlResidualIsOne) {
  // Flat g, K = diag(x, 0): the only defect is d_x K_xx = 1.
  const auto g = MetricField::from_lower_triangle({"x", "y"}, Rows{{"1"}, {"0", "1"}});
  const auto k = MetricField::from_lower_triangle({"x", "y"}, Rows{{"x"}, {"0", "0"}});
  const std::vector<double> p{1.0, 1.0};
  const JetTensor gj = evaluate_metric(g, p, 2);
  const JetTensor gamma = christoffel(gj, inverse_metric(gj));
  std::vector<Jet> comps;
  const auto v = seed_coordinates(p, 2);
  for (int i = 0; i < 4; ++i) comps.push_back(k.components[i].eval(std::span<const Jet>(v)));
  const JetTensor kj(2, {Variance::kDown, Variance::kDown}, comps);
  EXPECT_NEAR(check_killing(kj, gamma), 1.0, 1e-15);
}

TEST(Checks, OrderRequirements) {
  const auto& pair = catalog::get_entry("dini").pair;
  const std::vector<double> p{2.0, 0.5};
  const PointFrame f = make_frame(pair, p, 2);
  EXPECT_THROW(check_carter_condition(f, 0.0), OrderExhaustedError);
  const PointFrame f0 = make_frame(pair, p, 0);
  EXPECT_THROW(check_projective_equivalence(f0), OrderExhaustedError);
}

TEST(Spectrum, EigenvaluesAndDiagonalizability) {
  auto constant = [](std::vector<double> vals) {
    std::vector<Jet> comps;
    for (double v : vals) comps.emplace_back(2, 0, v);
    return JetTensor(2, {Variance::kUp, Variance::kDown}, comps);
  };
  const auto ev = eigenvalues(constant({2, 0, 0, 5}));
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0].real(), 2.0, 1e-14);
  EXPECT_NEAR(ev[1].real(), 5.0, 1e-14);
  EXPECT_TRUE(is_diagonalizable(constant({2, 0, 0, 5})));
  EXPECT_TRUE(is_diagonalizable(constant({1, 0, 0, 1})));
  EXPECT_FALSE(is_diagonalizable(constant({1, 1, 0, 1})));
  const auto rot = eigenvalues(constant({0, -1, 1, 0}));
  EXPECT_NEAR(std::abs(rot[0].imag()), 1.0, 1e-14);
  EXPECT_TRUE(is_diagonalizable(constant({0, -1, 1, 0})));
}

TEST(Spectrum, ExcludeSpectrumDropsNearbyGridValues) {
  const auto& pair = catalog::get_entry("dini").pair;
  const JetTensor L = build_L(pair, std::vector<double>{2.0, 0.5}, 0);
  const auto grid = exclude_spectrum(default_t_grid(), L);
  EXPECT_EQ(grid.size(), default_t_grid().size() - 2);
  EXPECT_EQ(std::count(grid.begin(), grid.end(), 2.0), 0);
  EXPECT_EQ(std::count(grid.begin(), grid.end(), 0.5), 0);
}

TEST(Pair, ValidateRejectsShapeMismatch) {
  ProjectivePair p = catalog::get_entry("dini").pair;
  p.domain.pop_back();
  EXPECT_THROW(p.validate(), ShapeError);
}

TEST(DefaultGrid, HasEightValues) {
  const auto grid = default_t_grid();
  EXPECT_EQ(grid.size(), 8u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
}

}  // namespace
}  // namespace projeq
