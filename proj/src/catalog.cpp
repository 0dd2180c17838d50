#include "projeq/catalog.hpp"

#include <stdexcept>

namespace projeq::catalog {

namespace {

using Rows = std::vector<std::vector<std::string>>;

CatalogEntry make(std::string name, std::vector<std::string> coords, const Rows& g,
                  const Rows& gbar, std::vector<Interval> domain, bool equivalent,
                  std::string signature, std::string provenance) {
  CatalogEntry e;
  e.name = name;
  e.pair.name = std::move(name);
  e.pair.notes = provenance;
  e.pair.g = MetricField::from_lower_triangle(coords, g);
  e.pair.gbar = MetricField::from_lower_triangle(coords, gbar);
  e.pair.domain = std::move(domain);
  e.pair.validate();
  e.expected_equivalent = equivalent;
  e.signature = std::move(signature);
  e.provenance = std::move(provenance);
  return e;
}

std::vector<CatalogEntry> build() {
  std::vector<CatalogEntry> entries;

  const Rows sphere = {{"1"}, {"0", "sin(theta)^2"}};
  entries.push_back(make("trivial", {"theta", "phi"}, sphere, sphere,
                         {{0.3, 2.8}, {-1.0, 1.0}}, true, "g (2,0), gbar (2,0)",
                         "gbar = g on the unit round sphere; L = Id"));

  const Rows curved3 = {{"1 + y^2"}, {"0", "1 + z^2"}, {"0", "0", "1 + x^2"}};
  entries.push_back(make("trivial3", {"x", "y", "z"}, curved3, curved3,
                         {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}, true,
                         "g (3,0), gbar (3,0)", "gbar = g on a curved diagonal 3-metric; L = Id"));

  entries.push_back(make("scaled", {"x", "y"}, {{"1 + x^2 + y^2"}, {"0", "1 + x^2 + y^2"}},
                         {{"4*(1 + x^2 + y^2)"}, {"0", "4*(1 + x^2 + y^2)"}},
                         {{-1.0, 1.0}, {-1.0, 1.0}}, true, "g (2,0), gbar (2,0)",
                         "gbar = 4 g on a conformally flat surface; L = 4^(-1/3) Id"));

  const Rows dini_g = {{"x - y"}, {"0", "x - y"}};
  const Rows dini_gbar = {{"(1/y - 1/x)/x"}, {"0", "(1/y - 1/x)/y"}};
  entries.push_back(make("dini", {"x", "y"}, dini_g, dini_gbar, {{1.05, 2.95}, {0.05, 0.95}},
                         true, "g (2,0), gbar (2,0)",
                         "Dini / Levi-Civita normal form with X(x) = x, Y(y) = y; L = diag(x, y)"));

  entries.push_back(make(
      "beltrami", {"x", "y"}, {{"1"}, {"0", "1"}},
      {{"(1 + y^2)/(1 + x^2 + y^2)^2"}, {"-x*y/(1 + x^2 + y^2)^2", "(1 + x^2)/(1 + x^2 + y^2)^2"}},
      {{-1.0, 1.0}, {-1.0, 1.0}}, true, "g (2,0), gbar (2,0)",
      "Beltrami: flat plane and the gnomonic chart of the round sphere; L = Id + x x^T"));

  entries.push_back(make("lorentz_dini", {"x", "y"}, dini_g, dini_gbar,
                         {{0.5, 2.5}, {-2.5, -0.5}}, true, "g (2,0), gbar (1,1)",
                         "Dini formula where x - y > 0 > 1/y - 1/x; gbar is indefinite"));

  entries.push_back(make("liouville_lorentzian", {"x", "y"}, {{"x - y"}, {"0", "y - x"}},
                         {{"(1/y - 1/x)/x"}, {"0", "(1/x - 1/y)/y"}},
                         {{1.05, 2.95}, {0.05, 0.95}}, true, "g (1,1), gbar (1,1)",
                         "Levi-Civita normal form with signed factors: g = (x - y)(dx^2 - dy^2)"));

  entries.push_back(make(
      "levi_civita3", {"x", "y", "z"},
      {{"(x - y)*(x - z)"}, {"0", "(x - y)*(y - z)"}, {"0", "0", "(x - z)*(y - z)"}},
      {{"(x - y)*(x - z)/(x*x*y*z)"},
       {"0", "(x - y)*(y - z)/(x*y*y*z)"},
       {"0", "0", "(x - z)*(y - z)/(x*y*z*z)"}},
      {{2.05, 2.95}, {1.05, 1.95}, {0.05, 0.95}}, true, "g (3,0), gbar (3,0)",
      "Levi-Civita normal form in dimension 3 with X_i = x^i; L = diag(x, y, z)"));

  entries.push_back(make("control_nonequiv", {"x", "y"}, {{"1"}, {"0", "1"}},
                         {{"1 + x^2"}, {"0", "1"}}, {{0.5, 2.0}, {-1.0, 1.0}}, false,
                         "g (2,0), gbar (2,0)",
                         "negative control: flat g with gbar = diag(1 + x^2, 1), not "
                         "projectively equivalent"));
  return entries;
}

}  // namespace

const std::vector<CatalogEntry>& all_entries() {
  static const std::vector<CatalogEntry> entries = build();
  return entries;
}

std::vector<std::string> list_entries() {
  std::vector<std::string> names;
  for (const auto& e : all_entries()) names.push_back(e.name);
  return names;
}

const CatalogEntry& get_entry(const std::string& name) {
  for (const auto& e : all_entries()) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("unknown catalog entry '" + name + "'");
}

}  // namespace projeq::catalog
