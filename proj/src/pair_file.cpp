#include "projeq/pair_file.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "projeq/expr.hpp"

namespace projeq {

PairFileError::PairFileError(const std::string& message, int line, int column)
    : Error(line > 0 ? fmt::format("{}:{}: {}", line, column, message) : message),
      message_(message),
      line_(line),
      column_(column) {}

namespace {

constexpr int kMinDim = 2;
constexpr int kMaxDim = 4;

PairFileError error_at(const YAML::Node& node, const std::string& message) {
  const YAML::Mark m = node.Mark();
  return PairFileError(message, m.line + 1, m.column + 1);
}

YAML::Node require_key(const YAML::Node& root, const char* key) {
  const YAML::Node n = root[key];
  if (!n) throw error_at(root, fmt::format("missing required field '{}'", key));
  return n;
}

std::string scalar_string(const YAML::Node& node, const char* what) {
  if (!node.IsScalar()) throw error_at(node, fmt::format("{} must be a scalar", what));
  return node.Scalar();
}

double scalar_double(const YAML::Node& node, const char* what) {
  if (!node.IsScalar()) throw error_at(node, fmt::format("{} must be a number", what));
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) throw error_at(node, fmt::format("{} must be finite", what));
    return v;
  } catch (const YAML::BadConversion&) {
    throw error_at(node, fmt::format("{} must be a number", what));
  }
}

// Parses an expression scalar, translating parser offsets into file
// positions.
expr::Expression parse_component(const YAML::Node& node, const std::vector<std::string>& coords,
                                 const std::string& label) {
  const std::string text = scalar_string(node, label.c_str());
  try {
    return expr::parse(text, coords);
  } catch (const ParseError& e) {
    const YAML::Mark m = node.Mark();
    const int quote = node.Tag() == "!" ? 1 : 0;
    throw PairFileError(fmt::format("{}: {}", label, e.bare_message()), m.line + 1,
                        m.column + 1 + quote + static_cast<int>(e.offset()));
  }
}

std::vector<std::vector<double>> probe_points(const std::vector<Interval>& domain) {
  const std::size_t n = domain.size();
  std::vector<std::vector<double>> points;
  std::vector<double> center(n);
  for (std::size_t i = 0; i < n; ++i) center[i] = 0.5 * (domain[i].lo + domain[i].hi);
  points.push_back(center);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 0.4 * (domain[i].hi - domain[i].lo);
      p[i] = center[i] + ((mask >> i) & 1 ? w : -w);
    }
    points.push_back(std::move(p));
  }
  return points;
}

bool numerically_equal(const expr::Expression& a, const expr::Expression& b,
                       const std::vector<Interval>& domain) {
  for (const auto& p : probe_points(domain)) {
    try {
      if (a.eval(p) != b.eval(p)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

MetricField parse_metric(const YAML::Node& node, const char* key,
                         const std::vector<std::string>& coords,
                         const std::vector<Interval>& domain) {
  const int n = static_cast<int>(coords.size());
  if (!node.IsSequence() || static_cast<int>(node.size()) != n) {
    throw error_at(node, fmt::format("'{}' must be a list of {} rows", key, n));
  }
  MetricField m;
  m.dim = n;
  m.coordinates = coords;
  std::vector<std::optional<expr::Expression>> comps(n * n);
  std::vector<std::optional<YAML::Node>> upper(n * n);
  for (int i = 0; i < n; ++i) {
    const YAML::Node row = node[i];
    if (!row.IsSequence() || (static_cast<int>(row.size()) != i + 1 &&
                              static_cast<int>(row.size()) != n)) {
      throw error_at(row, fmt::format("'{}' row {} must have {} (lower triangle) or {} entries",
                                      key, i + 1, i + 1, n));
    }
    for (int j = 0; j < static_cast<int>(row.size()); ++j) {
      const std::string label = fmt::format("{}[{}][{}]", key, i + 1, j + 1);
      auto e = parse_component(row[j], coords, label);
      if (j <= i) {
        comps[i * n + j] = e;
        comps[j * n + i] = e;
      } else {
        upper[i * n + j] = row[j];
      }
    }
  }
  // Entries above the diagonal must agree with their mirror images.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!upper[i * n + j]) continue;
      const YAML::Node& un = *upper[i * n + j];
      const auto ue = parse_component(un, coords, fmt::format("{}[{}][{}]", key, i + 1, j + 1));
      const auto& le = *comps[j * n + i];
      const YAML::Node ln = node[j][i];
      if (un.Scalar() == ln.Scalar() || ue.same_tree(le)) continue;
      if (numerically_equal(ue, le, domain)) continue;
      throw error_at(un, fmt::format("'{}' is not symmetric: entry ({}, {}) differs from ({}, {})",
                                     key, i + 1, j + 1, j + 1, i + 1));
    }
  }
  for (auto& c : comps) m.components.push_back(std::move(*c));
  return m;
}

ProjectivePair parse_document(const YAML::Node& root) {
  if (!root.IsMap()) throw error_at(root, "pair file must be a mapping");
  static const std::set<std::string> known = {"name", "notes", "dim", "coords",
                                              "g",    "gbar",  "domain"};
  for (const auto& kv : root) {
    const std::string key = kv.first.Scalar();
    if (!known.count(key)) throw error_at(kv.first, fmt::format("unknown field '{}'", key));
  }

  ProjectivePair pair;
  if (root["name"]) pair.name = scalar_string(root["name"], "name");
  if (root["notes"]) pair.notes = scalar_string(root["notes"], "notes");

  const YAML::Node dim_node = require_key(root, "dim");
  int dim = 0;
  try {
    dim = dim_node.as<int>();
  } catch (const YAML::Exception&) {
    throw error_at(dim_node, "'dim' must be an integer");
  }
  if (dim < kMinDim || dim > kMaxDim) {
    throw error_at(dim_node, fmt::format("'dim' must be between {} and {}", kMinDim, kMaxDim));
  }

  const YAML::Node coords_node = require_key(root, "coords");
  if (!coords_node.IsSequence() || static_cast<int>(coords_node.size()) != dim) {
    throw error_at(coords_node, fmt::format("'coords' must list {} names", dim));
  }
  static const std::regex identifier("[A-Za-z_][A-Za-z0-9_]*");
  std::vector<std::string> coords;
  for (const auto& c : coords_node) {
    const std::string name = scalar_string(c, "coordinate name");
    if (!std::regex_match(name, identifier)) {
      throw error_at(c, fmt::format("'{}' is not a valid coordinate name", name));
    }
    if (expr::is_function_name(name)) {
      throw error_at(c, fmt::format("'{}' is reserved for a function", name));
    }
    for (const auto& prev : coords) {
      if (prev == name) throw error_at(c, fmt::format("duplicate coordinate '{}'", name));
    }
    coords.push_back(name);
  }

  const YAML::Node domain_node = require_key(root, "domain");
  if (!domain_node.IsSequence() || static_cast<int>(domain_node.size()) != dim) {
    throw error_at(domain_node, fmt::format("'domain' must list {} intervals", dim));
  }
  for (const auto& iv : domain_node) {
    if (!iv.IsSequence() || iv.size() != 2) throw error_at(iv, "interval must be [lo, hi]");
    Interval interval{scalar_double(iv[0], "interval bound"),
                      scalar_double(iv[1], "interval bound")};
    if (!(interval.lo < interval.hi)) throw error_at(iv, "interval must satisfy lo < hi");
    pair.domain.push_back(interval);
  }

  pair.g = parse_metric(require_key(root, "g"), "g", coords, pair.domain);
  pair.gbar = parse_metric(require_key(root, "gbar"), "gbar", coords, pair.domain);
  pair.validate();
  return pair;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void write_metric(std::ostringstream& out, const char* key, const MetricField& m) {
  out << key << ":\n";
  for (int i = 0; i < m.dim; ++i) {
    out << "  - [";
    for (int j = 0; j <= i; ++j) {
      if (j > 0) out << ", ";
      out << quoted(m.component(i, j).to_string());
    }
    out << "]\n";
  }
}

}  // namespace

ProjectivePair parse_pair_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw PairFileError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || root.IsNull()) throw PairFileError("empty pair file", 1, 1);
  try {
    return parse_document(root);
  } catch (const YAML::Exception& e) {
    throw PairFileError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

ProjectivePair load_pair_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PairFileError(fmt::format("cannot read pair file '{}'", path), 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pair_text(buf.str());
}

std::string write_pair_text(const ProjectivePair& pair) {
  std::ostringstream out;
  if (!pair.name.empty()) out << "name: " << quoted(pair.name) << "\n";
  if (!pair.notes.empty()) out << "notes: " << quoted(pair.notes) << "\n";
  out << "dim: " << pair.dim() << "\n";
  out << "coords: [";
  for (std::size_t i = 0; i < pair.coordinates().size(); ++i) {
    if (i > 0) out << ", ";
    out << pair.coordinates()[i];
  }
  out << "]\n";
  write_metric(out, "g", pair.g);
  write_metric(out, "gbar", pair.gbar);
  out << "domain:\n";
  for (const auto& iv : pair.domain) out << fmt::format("  - [{}, {}]\n", iv.lo, iv.hi);
  return out.str();
}

}  // namespace projeq
