#include "projeq/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "projeq/errors.hpp"
#include "projeq/expr.hpp"
#include "projeq/operators.hpp"

namespace projeq::verify {

namespace {

constexpr int kMaxRedraws = 100;
constexpr double kDriftSpeed = 0.25;

struct CheckInfo {
  Check check;
  const char* name;
  double threshold;
  const char* normalization;
};

constexpr CheckInfo kChecks[] = {
    {Check::kBasic, "basic", 1e-8, "max |defect of nabla L| / max(1, max |nabla L|)"},
    {Check::kConnection, "connection", 1e-8, "max |defect| / max(1, max |Gammabar - Gamma|)"},
    {Check::kKilling, "killing", 1e-9, "max |sym nabla K| / max(1, max |nabla K|)"},
    {Check::kRicciComm, "ricci-comm", 1e-8, "max |RL - LR| / max(1, max |R| max |L|)"},
    {Check::kCarter, "carter", 1e-7, "max |div(RK - KR)| / max(1, max |R| max |K|)"},
    {Check::kPoisson, "poisson", 1e-8, "|{I_t, I_s}| / max(1, sum of |terms|)"},
    {Check::kCommutator, "commutator", 1e-7, "|[K_t, K_s] f| / max(1, |K_t K_s f|, |K_s K_t f|), worst test function"},
    {Check::kDecompose, "decompose", 1e-7, "absolute: max(|Q|, |V|, third-order part, constant part)"},
    {Check::kDrift, "drift", 1e-8, "max |I(tau) - I(0)| / max(1, |I(0)|) along a geodesic"},
};

const CheckInfo& info(Check c) {
  for (const auto& i : kChecks) {
    if (i.check == c) return i;
  }
  throw std::logic_error("unhandled check");
}

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool usable_point(const ProjectivePair& pair, const std::vector<double>& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > pair.domain[i].lo && p[i] < pair.domain[i].hi)) return false;
  }
  try {
    require_nondegenerate(evaluate_metric(pair.g, p, 0), "g");
    require_nondegenerate(evaluate_metric(pair.gbar, p, 0), "gbar");
  } catch (const Error&) {
    return false;
  }
  return true;
}

std::vector<std::vector<double>> sample_momenta(int dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (auto& p : out) {
    for (auto& c : p) c = 2.0 * uniform01(rng) - 1.0;
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return fmt::format("{}", v);
}

std::string format_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_number(v[i]);
  }
  return out + "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Runs the selected checks at one sample point.
class PointRunner {
 public:
  PointRunner(const ProjectivePair& pair, const Config& config,
              const std::vector<expr::Expression>& functions)
      : pair_(pair), config_(config), functions_(functions) {}

  std::vector<Record> run(int index, const std::vector<double>& point,
                          const std::vector<double>& momentum,
                          std::vector<double>& excluded_t) const {
    std::vector<Record> out;
    auto want = [&](Check c) {
      return std::find(config_.checks.begin(), config_.checks.end(), c) != config_.checks.end();
    };
    auto add = [&](Check c, std::vector<std::pair<std::string, double>> params, auto&& body) {
      Record r;
      r.check = c;
      r.point_index = index;
      r.point = point;
      r.params = std::move(params);
      r.threshold = config_.threshold(c);
      try {
        r.residual = body(r.detail);
      } catch (const std::exception& e) {
        r.residual = std::numeric_limits<double>::infinity();
        r.detail = e.what();
      }
      r.pass = r.residual <= r.threshold;
      out.push_back(std::move(r));
    };

    std::optional<PointFrame> frame;
    std::string frame_error;
    try {
      frame = make_frame(pair_, point, config_.order);
    } catch (const std::exception& e) {
      frame_error = e.what();
    }
    auto need_frame = [&]() -> const PointFrame& {
      if (!frame) throw Error(frame_error);
      return *frame;
    };

    std::vector<double> grid = config_.t_grid;
    if (frame) {
      grid = exclude_spectrum(config_.t_grid, frame->benenti.L);
      for (double t : config_.t_grid) {
        if (std::find(grid.begin(), grid.end(), t) == grid.end()) excluded_t.push_back(t);
      }
    }
    std::vector<std::pair<double, double>> ts_pairs;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      for (std::size_t b = a + 1; b < grid.size(); ++b) ts_pairs.emplace_back(grid[a], grid[b]);
    }

    if (want(Check::kBasic)) {
      add(Check::kBasic, {}, [&](std::string&) { return check_projective_equivalence(need_frame()); });
    }
    if (want(Check::kConnection)) {
      add(Check::kConnection, {},
          [&](std::string&) { return check_connection_difference(need_frame()); });
    }
    if (want(Check::kKilling)) {
      for (double t : grid) {
        add(Check::kKilling, {{"t", t}}, [&](std::string&) {
          const PointFrame& f = need_frame();
          if (!f.gamma) throw OrderExhaustedError("killing check needs order >= 1");
          return check_killing(f.benenti.killing(t), *f.gamma);
        });
      }
    }
    if (want(Check::kRicciComm)) {
      add(Check::kRicciComm, {},
          [&](std::string&) { return check_ricci_commutation(need_frame()); });
    }
    if (want(Check::kCarter)) {
      for (double t : grid) {
        add(Check::kCarter, {{"t", t}},
            [&](std::string&) { return check_carter_condition(need_frame(), t); });
      }
    }
    if (want(Check::kPoisson)) {
      const PhaseSpacePoint phase{point, momentum};
      for (const auto& [t, s] : ts_pairs) {
        add(Check::kPoisson, {{"t", t}, {"s", s}}, [&](std::string&) {
          const BracketValue b = poisson_bracket(pair_, t, s, phase);
          return std::abs(b.value) / b.scale;
        });
      }
    }

    const bool operator_checks = want(Check::kCommutator) || want(Check::kDecompose);
    std::map<double, OperatorJets> ops;
    std::vector<Jet> fjets;
    std::string op_error;
    if (operator_checks) {
      try {
        for (double t : grid) {
          ops.emplace(t, QuantizedOperator::killing_family(pair_, t).at(point, config_.order));
        }
        for (const auto& f : functions_) fjets.push_back(expr::eval_jet(f, point, config_.order));
      } catch (const std::exception& e) {
        op_error = e.what();
      }
    }
    auto need_ops = [&] {
      if (!op_error.empty()) throw Error(op_error);
    };

    if (want(Check::kCommutator)) {
      for (const auto& [t, s] : ts_pairs) {
        add(Check::kCommutator, {{"t", t}, {"s", s}}, [&](std::string& detail) {
          need_ops();
          double worst = -1.0;
          for (std::size_t k = 0; k < fjets.size(); ++k) {
            const CommutatorValue c = commutator_apply(ops.at(t), ops.at(s), fjets[k]);
            const double r = std::abs(c.value()) / c.scale();
            if (r > worst) {
              worst = r;
              detail = "f = " + functions_[k].to_string();
            }
          }
          return worst;
        });
      }
    }
    if (want(Check::kDecompose)) {
      for (const auto& [t, s] : ts_pairs) {
        add(Check::kDecompose, {{"t", t}, {"s", s}}, [&](std::string& detail) {
          need_ops();
          const CommutatorDecomposition d = commutator_decompose(ops.at(t), ops.at(s), point);
          detail = fmt::format("|Q| = {}, |V| = {}, cubic = {}, constant = {}",
                               format_number(d.q_norm()), format_number(d.v_norm()),
                               format_number(d.third_order), format_number(d.zeroth_order));
          return std::max({d.q_norm(), d.v_norm(), d.third_order, d.zeroth_order});
        });
      }
    }
    if (want(Check::kDrift)) {
      std::vector<DriftResult> drifts;
      std::string drift_error;
      try {
        drifts = geodesic_drift(pair_, grid, PhaseSpacePoint{point, drift_momentum(point, momentum)},
                                config_.drift_horizon, config_.drift_step);
      } catch (const std::exception& e) {
        drift_error = e.what();
      }
      for (std::size_t k = 0; k < grid.size(); ++k) {
        add(Check::kDrift, {{"t", grid[k]}}, [&](std::string& detail) {
          if (!drift_error.empty()) throw Error(drift_error);
          const DriftResult& d = drifts[k];
          detail = d.exited ? fmt::format("left the domain at time {}", format_number(d.exit_time))
                            : fmt::format("{} steps", d.steps);
          return d.max_drift;
        });
      }
    }
    return out;
  }

 private:
  // Rescales p so that the initial coordinate velocity g^{-1} p has Euclidean
  // length kDriftSpeed times the narrowest domain width.
  std::vector<double> drift_momentum(const std::vector<double>& point,
                                     const std::vector<double>& p) const {
    const JetTensor ginv = inverse_metric(evaluate_metric(pair_.g, point, 0));
    const int n = pair_.dim();
    double speed = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += ginv({i, j}).value() * p[j];
      speed += v * v;
    }
    speed = std::sqrt(speed);
    if (speed == 0.0) return p;
    double width = std::numeric_limits<double>::infinity();
    for (const auto& iv : pair_.domain) width = std::min(width, iv.hi - iv.lo);
    std::vector<double> out(p);
    for (auto& c : out) c *= kDriftSpeed * width / speed;
    return out;
  }

  const ProjectivePair& pair_;
  const Config& config_;
  const std::vector<expr::Expression>& functions_;
};

}  // namespace

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks = [] {
    std::vector<Check> v;
    for (const auto& i : kChecks) v.push_back(i.check);
    return v;
  }();
  return checks;
}

std::string check_name(Check c) { return info(c).name; }

Check parse_check(const std::string& name) {
  for (const auto& i : kChecks) {
    if (name == i.name) return i.check;
  }
  throw std::invalid_argument(fmt::format("unknown check '{}'", name));
}

double base_threshold(Check c) { return info(c).threshold; }

std::vector<std::vector<double>> sample_points(const ProjectivePair& pair, int count,
                                               std::uint64_t seed) {
  if (count < 0) throw DomainError("number of points must be non-negative");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> points;
  const int n = pair.dim();
  while (static_cast<int>(points.size()) < count) {
    std::vector<double> p(n);
    bool found = false;
    for (int attempt = 0; attempt <= kMaxRedraws && !found; ++attempt) {
      for (int i = 0; i < n; ++i) {
        const Interval& iv = pair.domain[i];
        p[i] = iv.lo + uniform01(rng) * (iv.hi - iv.lo);
      }
      found = usable_point(pair, p);
    }
    if (!found) {
      throw DegeneracyError(fmt::format(
          "no nondegenerate sample point found after {} redraws", kMaxRedraws));
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<std::string> test_functions(const std::vector<std::string>& coords) {
  const std::string& a = coords.front();
  const std::string& b = coords.size() > 1 ? coords[1] : coords.front();
  const std::string& z = coords.back();
  std::string lin1, lin2;
  double w = 0.5;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i > 0) {
      lin1 += " + ";
      lin2 += i % 2 ? " - " : " + ";
    }
    lin1 += fmt::format("{}*{}", w, coords[i]);
    lin2 += coords[i];
    w /= 2;
  }
  return {a + "^2",
          a + "*" + b,
          z + "^2",
          "sin(" + a + ")",
          "cos(" + z + ")",
          "exp(" + lin1 + ")",
          "exp(" + lin2 + ")"};
}

Report run(const ProjectivePair& pair, const std::string& source, const Config& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.order < 0) throw DomainError("order must be non-negative");
  if (config.jobs < 1) throw DomainError("jobs must be at least 1");
  Report report;
  report.pair_name = pair.name;
  report.source = source;
  report.config = config;
  report.points = sample_points(pair, config.points, config.seed);
  const auto momenta = sample_momenta(pair.dim(), config.points, config.seed);

  std::vector<expr::Expression> functions;
  for (const auto& f : test_functions(pair.coordinates())) {
    functions.push_back(expr::parse(f, pair.coordinates()));
  }
  const PointRunner runner(pair, config, functions);

  std::vector<std::vector<Record>> per_point(report.points.size());
  report.excluded_t.resize(report.points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < per_point.size(); i = next++) {
      per_point[i] = runner.run(static_cast<int>(i), report.points[i], momenta[i],
                                report.excluded_t[i]);
    }
  };
  const int threads = std::min<int>(config.jobs, std::max<std::size_t>(1, per_point.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& recs : per_point) {
    for (auto& r : recs) report.records.push_back(std::move(r));
  }
  report.pass = true;
  for (Check c : config.checks) {
    CheckSummary s{c};
    for (const auto& r : report.records) {
      if (r.check != c) continue;
      ++s.total;
      if (!r.pass) ++s.failed;
      if (std::isnan(r.residual) || r.residual > s.max_residual) s.max_residual = r.residual;
    }
    if (s.failed > 0) report.pass = false;
    report.summary.push_back(s);
  }
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string to_yaml(const Report& report, bool include_timing) {
  const Config& c = report.config;
  std::string out;
  out += fmt::format("schema_version: {}\n", kSchemaVersion);
  out += fmt::format("pair:\n  name: {}\n  source: {}\n", quoted(report.pair_name),
                     quoted(report.source));
  out += "config:\n";
  out += fmt::format("  points: {}\n  order: {}\n  tol: {}\n  seed: {}\n", c.points, c.order,
                     format_number(c.tol), c.seed);
  out += fmt::format("  t_grid: {}\n", format_list(c.t_grid));
  out += "  checks: [";
  for (std::size_t i = 0; i < c.checks.size(); ++i) {
    out += (i ? ", " : "") + check_name(c.checks[i]);
  }
  out += "]\n  thresholds:\n";
  for (Check ch : c.checks) {
    out += fmt::format("    {}: {}\n", check_name(ch), format_number(c.threshold(ch)));
  }
  out += fmt::format("  drift: {{horizon: {}, step: {}}}\n", format_number(c.drift_horizon),
                     format_number(c.drift_step));
  out += "  normalization:\n";
  for (Check ch : c.checks) {
    out += fmt::format("    {}: {}\n", check_name(ch), quoted(info(ch).normalization));
  }
  out += "points:\n";
  for (const auto& p : report.points) out += "  - " + format_list(p) + "\n";
  bool any_excluded = false;
  for (const auto& e : report.excluded_t) any_excluded = any_excluded || !e.empty();
  if (any_excluded) {
    out += "excluded_t:\n";
    for (std::size_t i = 0; i < report.excluded_t.size(); ++i) {
      if (report.excluded_t[i].empty()) continue;
      out += fmt::format("  - {{point: {}, t: {}}}\n", i, format_list(report.excluded_t[i]));
    }
  }
  out += "records:\n";
  for (const auto& r : report.records) {
    out += fmt::format("  - {{check: {}, point: {}", check_name(r.check), r.point_index);
    for (const auto& [k, v] : r.params) out += fmt::format(", {}: {}", k, format_number(v));
    out += fmt::format(", residual: {}, threshold: {}, verdict: {}", format_number(r.residual),
                       format_number(r.threshold), r.pass ? "pass" : "fail");
    if (!r.detail.empty()) out += ", detail: " + quoted(r.detail);
    out += "}\n";
  }
  out += "summary:\n  checks:\n";
  for (const auto& s : report.summary) {
    out += fmt::format(
        "    - {{check: {}, total: {}, failed: {}, max_residual: {}, verdict: {}}}\n",
        check_name(s.check), s.total, s.failed, format_number(s.max_residual),
        s.failed == 0 ? "pass" : "fail");
  }
  out += fmt::format("  records: {}\n  verdict: {}\n", report.records.size(),
                     report.pass ? "pass" : "fail");
  if (include_timing) {
    out += fmt::format("timing:\n  jobs: {}\n  elapsed_seconds: {:.3f}\n", c.jobs,
                       report.elapsed_seconds);
  }
  return out;
}

std::pair<int, int> signature(const JetTensor& metric) {
  const int n = metric.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = metric({i, j}).value();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  int pos = 0, neg = 0;
  for (int i = 0; i < n; ++i) {
    if (solver.eigenvalues()(i) > 0) ++pos;
    if (solver.eigenvalues()(i) < 0) ++neg;
  }
  return {pos, neg};
}

bool positive_definite(const JetTensor& metric) {
  const int n = metric.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = metric({i, j}).value();
  }
  for (int k = 1; k <= n; ++k) {
    if (!(m.topLeftCorner(k, k).determinant() > 0)) return false;
  }
  return true;
}

Description describe(const ProjectivePair& pair, int points, std::uint64_t seed) {
  Description d;
  d.name = pair.name;
  d.dim = pair.dim();
  d.coordinates = pair.coordinates();
  d.domain = pair.domain;
  d.notes = pair.notes;
  for (const auto& p : sample_points(pair, points, seed)) {
    PointDescription pd;
    pd.point = p;
    const JetTensor g = evaluate_metric(pair.g, p, 0);
    const JetTensor gbar = evaluate_metric(pair.gbar, p, 0);
    pd.g_signature = signature(g);
    pd.gbar_signature = signature(gbar);
    pd.g_positive_definite = positive_definite(g);
    pd.gbar_positive_definite = positive_definite(gbar);
    const JetTensor L = build_L(g, gbar);
    pd.l_eigenvalues = eigenvalues(L);
    pd.l_diagonalizable = is_diagonalizable(L);
    d.samples.push_back(std::move(pd));
  }
  return d;
}

std::string format_description(const Description& d) {
  std::string out;
  out += fmt::format("name: {}\n", d.name.empty() ? "(unnamed)" : d.name);
  out += fmt::format("dimension: {}\n", d.dim);
  out += "coordinates: ";
  for (std::size_t i = 0; i < d.coordinates.size(); ++i) {
    out += fmt::format("{}{} in ({}, {})", i ? ", " : "", d.coordinates[i], d.domain[i].lo,
                       d.domain[i].hi);
  }
  out += "\n";
  if (!d.notes.empty()) out += fmt::format("notes: {}\n", d.notes);

  auto kind = [](std::pair<int, int> sig) {
    if (sig.second == 0) return std::string("Riemannian");
    if (sig.first == 0) return std::string("negative definite");
    return fmt::format("indefinite");
  };
  bool uniform = true;
  for (const auto& s : d.samples) {
    uniform = uniform && s.g_signature == d.samples.front().g_signature &&
              s.gbar_signature == d.samples.front().gbar_signature;
  }
  if (!d.samples.empty()) {
    const auto& s0 = d.samples.front();
    out += fmt::format("signature: g ({},{}) {}, gbar ({},{}) {}{}\n", s0.g_signature.first,
                       s0.g_signature.second, kind(s0.g_signature), s0.gbar_signature.first,
                       s0.gbar_signature.second, kind(s0.gbar_signature),
                       uniform ? " at every sampled point" : " at the first sampled point");
  }
  out += "samples:\n";
  for (const auto& s : d.samples) {
    std::string pt;
    for (std::size_t i = 0; i < s.point.size(); ++i) {
      pt += fmt::format("{}{} = {:.6f}", i ? ", " : "", d.coordinates[i], s.point[i]);
    }
    out += fmt::format("  - point: {}\n", pt);
    out += fmt::format("    g: signature ({},{}), positive definite: {}\n", s.g_signature.first,
                       s.g_signature.second, s.g_positive_definite ? "yes" : "no");
    out += fmt::format("    gbar: signature ({},{}), positive definite: {}\n",
                       s.gbar_signature.first, s.gbar_signature.second,
                       s.gbar_positive_definite ? "yes" : "no");
    std::string ev;
    for (std::size_t i = 0; i < s.l_eigenvalues.size(); ++i) {
      const auto& z = s.l_eigenvalues[i];
      ev += i ? ", " : "";
      ev += std::abs(z.imag()) < 1e-12 ? fmt::format("{:.6f}", z.real())
                                       : fmt::format("{:.6f}{:+.6f}i", z.real(), z.imag());
    }
    out += fmt::format("    L eigenvalues: {}\n", ev);
    out += fmt::format("    L diagonalizable: {}\n", s.l_diagonalizable ? "yes" : "no");
  }
  return out;
}

}  // namespace projeq::verify
