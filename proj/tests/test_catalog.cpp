#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "projeq/catalog.hpp"
#include "projeq/pair_file.hpp"
#include "projeq/verify.hpp"

namespace projeq::catalog {
namespace {

bool same_pair(const ProjectivePair& a, const ProjectivePair& b) {
  if (a.name != b.name || a.dim() != b.dim() || a.coordinates() != b.coordinates()) return false;
  for (int k = 0; k < a.dim() * a.dim(); ++k) {
    if (!a.g.components[k].same_tree(b.g.components[k])) return false;
    if (!a.gbar.components[k].same_tree(b.gbar.components[k])) return false;
  }
  for (int i = 0; i < a.dim(); ++i) {
    if (a.domain[i].lo != b.domain[i].lo || a.domain[i].hi != b.domain[i].hi) return false;
  }
  return true;
}

TEST(Catalog, ListsEntriesWithUniqueNames) {
  const auto names = list_entries();
  EXPECT_GE(names.size(), 6u);
  auto sorted = names;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  for (const char* required : {"dini", "beltrami", "trivial", "scaled", "lorentz_dini",
                               "control_nonequiv"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), required), names.end()) << required;
  }
}

TEST(Catalog, UnknownNameThrowsOutOfRange) {
  EXPECT_THROW(get_entry("no_such_pair"), std::out_of_range);
}

TEST(Catalog, EntriesAreWellFormed) {
  for (const auto& e : all_entries()) {
    EXPECT_EQ(e.pair.name, e.name);
    EXPECT_NO_THROW(e.pair.validate()) << e.name;
    EXPECT_FALSE(e.signature.empty()) << e.name;
    EXPECT_FALSE(e.provenance.empty()) << e.name;
  }
}

TEST(Catalog, ExpectedVerdictsHold) {
  for (const auto& e : all_entries()) {
    verify::Config config;
    config.points = 8;
    config.jobs = 4;
    const auto report = verify::run(e.pair, "catalog", config);
    EXPECT_EQ(report.pass, e.expected_equivalent) << e.name;
  }
}

TEST(Catalog, ControlFailsTheBasicEquationAlmostEverywhere) {
  const auto& pair = get_entry("control_nonequiv").pair;
  const auto points = verify::sample_points(pair, 50, 42);
  int large = 0;
  for (const auto& p : points) {
    if (check_projective_equivalence(pair, p, 2) > 1e-2) ++large;
  }
  EXPECT_GE(large, 45);
}

TEST(Catalog, ShippedPairFilesMatchTheCatalog) {
  for (const auto& e : all_entries()) {
    const std::string path = std::string(PROJEQ_SOURCE_DIR) + "/data/pairs/" + e.name + ".yaml";
    const ProjectivePair loaded = load_pair_file(path);
    EXPECT_TRUE(same_pair(loaded, e.pair)) << path;
  }
}

TEST(Catalog, WrittenTextRoundTrips) {
  for (const auto& e : all_entries()) {
    const std::string text = write_pair_text(e.pair);
    EXPECT_TRUE(same_pair(parse_pair_text(text), e.pair)) << e.name;
    EXPECT_EQ(write_pair_text(parse_pair_text(text)), text) << e.name;
  }
}

}  // namespace
}  // namespace projeq::catalog
