#pragma once

// Experiment orchestration: runs multi-level SOO or the fixed-dimension SOO
// baseline on a benchmark instance, converts the optimizer's score trace into
// regret records, and reads/writes the CSV artifacts.

#include "mlsoo/errors.hpp"
#include "mlsoo/functionals.hpp"
#include "mlsoo/multilevel.hpp"
#include "mlsoo/soo.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace mlsoo {

enum class Algorithm { multilevel, soo_fixed };

inline std::string_view to_string(Algorithm a) {
  return a == Algorithm::multilevel ? "multilevel" : "soo";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "multilevel")
    return Algorithm::multilevel;
  if (s == "soo" || s == "soo-fixed")
    return Algorithm::soo_fixed;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

struct RunConfig {
  ProblemKind problem = ProblemKind::brachistochrone1;
  Algorithm algorithm = Algorithm::multilevel;
  std::size_t budget = 1000;
  LevelSchedule schedule;
  std::size_t baseline_dims = 7;
  double baseline_lower = 0.0;
  double baseline_upper = 1.0;
  double catenary_height = 1.0;
  bool reuse_center = true;
  bool regret = true;
  std::string trace_out;
  std::string solution_out;

  void validate() const {
    if (budget < 1)
      throw ConfigError("budget must be at least 1");
    if (baseline_dims < 1)
      throw ConfigError("baseline_dims must be at least 1");
    if (!(baseline_lower < baseline_upper))
      throw ConfigError("baseline box needs lower < upper");
    schedule.validate();
  }
};

struct RegretRecord {
  std::size_t n = 0;
  double best_value = 0.0;
  double regret = 0.0;
  double log10_regret = 0.0;

  friend bool operator==(const RegretRecord&, const RegretRecord&) = default;
};

using Trace = std::vector<RegretRecord>;

struct SolutionRow {
  double x = 0.0;
  double y_found = 0.0;
  double y_optimal = 0.0;
};

using SolutionDump = std::vector<SolutionRow>;

inline constexpr double kRegretFloor = 1e-16;

struct Regret {
  double regret;
  double log10_regret;
};

/// Minimization-form regret with a log10 floor at 1e-16.
inline Regret compute_regret(double best_value, double known_optimum) {
  const double r = best_value - known_optimum;
  if (std::isinf(r))
    return {r, r};
  return {r, std::log10(std::max(r, kRegretFloor))};
}

/// Coordinate d of `point` becomes the y-value at x_a + (d+1) dx, with
/// dx = (x_b - x_a) / (D + 1).
inline DiscretizedCurve baseline_map(std::span<const double> point, const EndpointSpec& ep) {
  return curve_from_interior(ep, point);
}

struct ExperimentResult {
  Trace trace;
  SolutionDump solution;
  DiscretizedCurve best_curve;
  double best_value = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

inline Trace to_regret_trace(std::span<const TraceRecord> raw, std::optional<double> optimum) {
  Trace out;
  out.reserve(raw.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : raw) {
    const double best = -r.best_score;
    if (optimum) {
      const auto [reg, lg] = compute_regret(best, *optimum);
      out.push_back({r.n, best, reg, lg});
    } else {
      out.push_back({r.n, best, nan, nan});
    }
  }
  return out;
}

inline SolutionDump make_solution(const DiscretizedCurve& found, const FunctionalInstance& fi) {
  SolutionDump dump;
  dump.reserve(found.points.size());
  for (std::size_t j = 0; j < found.points.size(); ++j) {
    const auto& q = found.points[j];
    double y_opt = std::numeric_limits<double>::quiet_NaN();
    if (j == 0)
      y_opt = fi.endpoints.y_a;
    else if (j + 1 == found.points.size())
      y_opt = fi.endpoints.y_b;
    else if (fi.optimum_y)
      y_opt = fi.optimum_y(q.x);
    dump.push_back({q.x, q.y, y_opt});
  }
  return dump;
}

inline std::string fmt_real(double v) { return fmt::format("{:.17g}", v); }

} // namespace detail

// ---------------------------------------------------------------------------
// CSV artifacts.

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "n,best_value,regret,log10_regret\n";
  for (const auto& r : trace)
    os << r.n << ',' << detail::fmt_real(r.best_value) << ',' << detail::fmt_real(r.regret) << ','
       << detail::fmt_real(r.log10_regret) << '\n';
}

inline void write_solution_csv(std::ostream& os, const SolutionDump& dump) {
  os << "x,y_found,y_optimal\n";
  for (const auto& r : dump)
    os << detail::fmt_real(r.x) << ',' << detail::fmt_real(r.y_found) << ','
       << detail::fmt_real(r.y_optimal) << '\n';
}

namespace detail {
inline double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("malformed number '" + s + "' in CSV");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    cells.push_back(cell);
  return cells;
}
} // namespace detail

inline Trace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "n,best_value,regret,log10_regret")
    throw ConfigError("trace CSV has an unexpected header");
  Trace out;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 4)
      throw ConfigError("trace CSV row needs 4 columns: " + line);
    out.push_back({static_cast<std::size_t>(std::stoull(cells[0])), detail::parse_real(cells[1]),
                   detail::parse_real(cells[2]), detail::parse_real(cells[3])});
  }
  return out;
}

inline void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  body(os);
  if (!os)
    throw std::runtime_error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment(const RunConfig& cfg, const FunctionalInstance& fi) {
  cfg.validate();
  if (cfg.regret && !fi.known_optimum)
    throw ConfigError("regret requested but the instance has no known optimum");

  ExperimentResult res;
  if (cfg.algorithm == Algorithm::multilevel) {
    auto ml = mlsoo_run(fi.evaluate, fi.endpoints, cfg.schedule, cfg.budget, h_max_default,
                        cfg.reuse_center);
    res.trace = detail::to_regret_trace(ml.soo.trace, cfg.regret ? fi.known_optimum : std::nullopt);
    res.best_curve = std::move(ml.best_curve);
    res.best_value = ml.best_value;
    res.evaluations = ml.soo.evaluations;
  } else {
    const EndpointSpec ep = fi.endpoints;
    auto objective = [&fi, ep](std::span<const double> x) {
      return -fi.evaluate(baseline_map(x, ep));
    };
    auto run = soo_run(objective, Box::uniform(cfg.baseline_dims, cfg.baseline_lower, cfg.baseline_upper),
                       cfg.budget, h_max_default, cfg.schedule.K, cfg.reuse_center);
    res.trace = detail::to_regret_trace(run.trace, cfg.regret ? fi.known_optimum : std::nullopt);
    res.best_curve = baseline_map(run.best().cell.center, ep);
    res.best_value = -run.best().score;
    res.evaluations = run.evaluations;
  }
  res.solution = detail::make_solution(res.best_curve, fi);

  if (!cfg.trace_out.empty())
    write_file(cfg.trace_out, [&](std::ostream& os) { write_trace_csv(os, res.trace); });
  if (!cfg.solution_out.empty())
    write_file(cfg.solution_out, [&](std::ostream& os) { write_solution_csv(os, res.solution); });
  return res;
}

inline ExperimentResult run_experiment(const RunConfig& cfg) {
  return run_experiment(cfg, make_instance(cfg.problem, cfg.catenary_height));
}

} // namespace mlsoo
