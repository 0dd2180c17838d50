// Command-line front end: verify, list, describe and export metric pairs.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "projeq/catalog.hpp"
#include "projeq/errors.hpp"
#include "projeq/pair_file.hpp"
#include "projeq/verify.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct LoadedPair {
  projeq::ProjectivePair pair;
  std::string source;
};

// A catalog name wins over a file of the same name.
LoadedPair load_pair(const std::string& spec) {
  for (const auto& e : projeq::catalog::all_entries()) {
    if (e.name == spec) return {e.pair, "catalog"};
  }
  if (!std::filesystem::exists(spec)) {
    throw projeq::Error(fmt::format("'{}' is neither a catalog entry nor a readable file", spec));
  }
  try {
    LoadedPair out{projeq::load_pair_file(spec), spec};
    if (out.pair.name.empty()) out.pair.name = std::filesystem::path(spec).stem().string();
    return out;
  } catch (const projeq::PairFileError& e) {
    if (e.line() > 0) {
      throw projeq::Error(
          fmt::format("{}:{}:{}: error: {}", spec, e.line(), e.column(), e.message()));
    }
    throw;
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw projeq::Error(fmt::format("invalid t-grid value '{}'", item));
    }
    grid.push_back(v);
  }
  if (grid.size() < 2) throw projeq::Error("t-grid needs at least two values");
  return grid;
}

std::vector<projeq::verify::Check> parse_checks(const std::string& text) {
  std::vector<projeq::verify::Check> checks;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "all") return projeq::verify::all_checks();
    try {
      const auto c = projeq::verify::parse_check(item);
      if (std::find(checks.begin(), checks.end(), c) == checks.end()) checks.push_back(c);
    } catch (const std::invalid_argument& e) {
      throw projeq::Error(e.what());
    }
  }
  if (checks.empty()) throw projeq::Error("no checks selected");
  return checks;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw projeq::Error(fmt::format("cannot write '{}'", path));
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks projective equivalence of metric pairs and the commutation of the "
               "associated Killing tensors and quantized operators."};
  app.require_subcommand(1);

  std::string pair_spec;
  int points = 20;
  int order = 4;
  double tol = projeq::verify::kDefaultTolerance;
  std::string t_grid;
  std::uint64_t seed = 42;
  std::string checks = "all";
  std::string report_path;
  int jobs = 1;
  bool no_timing = false;

  auto* verify = app.add_subcommand("verify", "Run verification checks on a pair");
  verify->add_option("pair", pair_spec, "Catalog name or pair file")->required();
  verify->add_option("--points", points, "Number of sample points")->check(CLI::NonNegativeNumber);
  verify->add_option("--order", order, "Working jet order")->check(CLI::Range(0, 16));
  verify->add_option("--tol", tol, "Tolerance; every check threshold scales with it")
      ->check(CLI::PositiveNumber);
  verify->add_option("--t-grid", t_grid, "Comma-separated parameter values");
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--checks", checks,
                     "Comma-separated subset of basic, connection, killing, ricci-comm, carter, "
                     "poisson, commutator, decompose, drift");
  verify->add_option("--report", report_path, "Report path (default stdout)");
  verify->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  verify->add_flag("--no-timing", no_timing, "Leave the timing section out of the report");

  app.add_subcommand("list", "List catalog entries");

  int describe_points = 3;
  auto* describe = app.add_subcommand("describe", "Summarize a pair at sample points");
  describe->add_option("pair", pair_spec, "Catalog name or pair file")->required();
  describe->add_option("--points", describe_points, "Number of sample points")
      ->check(CLI::PositiveNumber);
  describe->add_option("--seed", seed, "Random seed");

  std::string out_path;
  auto* export_cmd = app.add_subcommand("export", "Write a catalog entry as a pair file");
  export_cmd->add_option("pair", pair_spec, "Catalog name")->required();
  export_cmd->add_option("-o,--output", out_path, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& e : projeq::catalog::all_entries()) {
        std::cout << fmt::format("{:<22} dim {}  {:<5}  {:<22}  {}\n", e.name, e.pair.dim(),
                                 e.expected_equivalent ? "equiv" : "nonequiv", e.signature,
                                 e.provenance);
      }
      return kExitPass;
    }
    if (app.got_subcommand("export")) {
      const auto& entry = projeq::catalog::get_entry(pair_spec);
      write_output(out_path, projeq::write_pair_text(entry.pair));
      return kExitPass;
    }

    const LoadedPair loaded = load_pair(pair_spec);
    if (app.got_subcommand("describe")) {
      std::cout << projeq::verify::format_description(
          projeq::verify::describe(loaded.pair, describe_points, seed));
      return kExitPass;
    }

    projeq::verify::Config config;
    config.points = points;
    config.order = order;
    config.tol = tol;
    if (!t_grid.empty()) config.t_grid = parse_grid(t_grid);
    config.seed = seed;
    config.checks = parse_checks(checks);
    config.jobs = jobs;
    const auto report = projeq::verify::run(loaded.pair, loaded.source, config);
    write_output(report_path, projeq::verify::to_yaml(report, !no_timing));
    for (const auto& s : report.summary) {
      std::cerr << fmt::format("{:<11} {:>5} records  {:>5} failed  max residual {:.3e}\n",
                               projeq::verify::check_name(s.check), s.total, s.failed,
                               s.max_residual);
    }
    std::cerr << "verdict: " << (report.pass ? "pass" : "fail") << "\n";
    return report.pass ? kExitPass : kExitFail;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    std::cerr << (msg.find(": error: ") != std::string::npos ? "" : "error: ") << msg << "\n";
    return kExitInput;
  }
}
