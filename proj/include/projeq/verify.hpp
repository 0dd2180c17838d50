#pragma once

// Verification driver: samples points of a pair's domain, runs the selected
// residual checks and collects the results into a report.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "projeq/projective.hpp"

namespace projeq::verify {

enum class Check {
  kBasic,
  kConnection,
  kKilling,
  kRicciComm,
  kCarter,
  kPoisson,
  kCommutator,
  kDecompose,
  kDrift,
};

const std::vector<Check>& all_checks();
std::string check_name(Check c);
/// Throws std::invalid_argument for unknown names.
Check parse_check(const std::string& name);

/// Threshold of a check at the default tolerance 1e-7; an explicit tolerance
/// scales every threshold by tol / 1e-7.
double base_threshold(Check c);
constexpr double kDefaultTolerance = 1e-7;

struct Config {
  int points = 20;
  int order = 4;
  double tol = kDefaultTolerance;
  std::vector<double> t_grid = default_t_grid();
  std::uint64_t seed = 42;
  std::vector<Check> checks = all_checks();
  int jobs = 1;
  double drift_horizon = 1.0;
  double drift_step = 1e-3;

  double threshold(Check c) const { return base_threshold(c) * (tol / kDefaultTolerance); }
};

/// Uniform points in the domain box, deterministic in `seed`. Points where
/// either metric is degenerate or cannot be evaluated are redrawn; more than
/// 100 consecutive redraws throws DegeneracyError.
std::vector<std::vector<double>> sample_points(const ProjectivePair& pair, int count,
                                               std::uint64_t seed);

/// Seven test functions in the pair's coordinates: quadratic monomials,
/// sin and cos of single coordinates, exponentials of linear forms.
std::vector<std::string> test_functions(const std::vector<std::string>& coords);

struct Record {
  Check check;
  int point_index = -1;             // -1 for checks not tied to a sample point
  std::vector<double> point;
  std::vector<std::pair<std::string, double>> params;
  std::string detail;               // e.g. worst test function, exit note
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CheckSummary {
  Check check;
  int total = 0;
  int failed = 0;
  double max_residual = 0.0;
};

struct Report {
  std::string pair_name;
  std::string source;  // "catalog" or a file path
  Config config;
  std::vector<std::vector<double>> points;
  // Grid values dropped at each point for lying within 1e-6 of an eigenvalue
  // of L there.
  std::vector<std::vector<double>> excluded_t;
  std::vector<Record> records;
  std::vector<CheckSummary> summary;
  bool pass = false;
  double elapsed_seconds = 0.0;
};

Report run(const ProjectivePair& pair, const std::string& source, const Config& config);

/// YAML document; see docs/report_schema.md. Timing is the only
/// nondeterministic field and can be left out.
std::string to_yaml(const Report& report, bool include_timing = true);
inline constexpr int kSchemaVersion = 1;

struct PointDescription {
  std::vector<double> point;
  std::pair<int, int> g_signature;     // (positive, negative) eigenvalue counts
  std::pair<int, int> gbar_signature;
  bool g_positive_definite = false;    // by leading principal minors
  bool gbar_positive_definite = false;
  std::vector<std::complex<double>> l_eigenvalues;
  bool l_diagonalizable = false;
};

struct Description {
  std::string name;
  int dim = 0;
  std::vector<std::string> coordinates;
  std::vector<Interval> domain;
  std::string notes;
  std::vector<PointDescription> samples;
};

Description describe(const ProjectivePair& pair, int points, std::uint64_t seed);
std::string format_description(const Description& d);

/// Eigenvalue sign counts of the constant part of a symmetric (0,2) tensor.
std::pair<int, int> signature(const JetTensor& metric);
/// Sylvester's criterion on the constant part.
bool positive_definite(const JetTensor& metric);

}  // namespace projeq::verify
