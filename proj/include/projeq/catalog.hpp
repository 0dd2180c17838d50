#pragma once

#include <string>
#include <vector>

#include "projeq/projective.hpp"

namespace projeq::catalog {

struct CatalogEntry {
  std::string name;
  ProjectivePair pair;
  bool expected_equivalent = true;
  std::string signature;   // e.g. "g (2,0), gbar (1,1)"
  std::string provenance;  // classical family the entry comes from
};

std::vector<std::string> list_entries();
/// Throws std::out_of_range for unknown names.
const CatalogEntry& get_entry(const std::string& name);
const std::vector<CatalogEntry>& all_entries();

}  // namespace projeq::catalog
