// mlsoo: command-line front end for multi-level SOO experiments.
//
//   mlsoo run      --problem brachistochrone1 --algo multilevel --budget 1000 --out trace.csv
//   mlsoo compare  --problem catenary --budget 1000
//   mlsoo solution --problem brachistochrone2 --solution-out sol.csv
//   mlsoo lemma1   --levels 5
//   mlsoo selftest --curves 200
//
// Exit codes: 0 success, 1 configuration error, 2 runtime or domain error.

#include "mlsoo/config.hpp"
#include "mlsoo/harness.hpp"
#include "mlsoo/lemma1.hpp"
#include "mlsoo/selftest.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <future>
#include <iostream>
#include <numbers>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Flags {
  std::string config;
  std::string problem;
  std::string algo;
  std::size_t budget = 0;
  std::string out;
  std::string solution_out;
  double w = 0.0;
  double p = 0.0;
  std::size_t K = 0;
  std::size_t max_level = 0;
  std::size_t baseline_dims = 0;
  double catenary_height = 0.0;
  bool no_reuse = false;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--problem", f.problem, "brachistochrone1 | brachistochrone2 | catenary");
  cmd->add_option("--algo", f.algo, "multilevel | soo");
  cmd->add_option("--budget", f.budget, "fresh functional evaluations");
  cmd->add_option("--out", f.out, "trace CSV path");
  cmd->add_option("--solution-out", f.solution_out, "solution CSV path");
  cmd->add_option("--w", f.w, "initial offset width");
  cmd->add_option("--p", f.p, "width shrink base per level");
  cmd->add_option("--K", f.K, "split arity (odd)");
  cmd->add_option("--max-level", f.max_level, "stop adding levels beyond this one");
  cmd->add_option("--baseline-dims", f.baseline_dims, "dimensions of the fixed SOO baseline");
  cmd->add_option("--catenary-height", f.catenary_height, "ring radius of the catenary instance");
  cmd->add_flag("--no-reuse", f.no_reuse, "re-evaluate the middle child on every split");
}

/// Config file first, then any flag given on the command line.
mlsoo::RunConfig resolve(const CLI::App* cmd, const Flags& f) {
  mlsoo::RunConfig cfg;
  if (!f.config.empty())
    cfg = mlsoo::load_config(f.config);
  auto given = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (given("--problem"))
    cfg.problem = mlsoo::parse_problem(f.problem);
  if (given("--algo"))
    cfg.algorithm = mlsoo::parse_algorithm(f.algo);
  if (given("--budget"))
    cfg.budget = f.budget;
  if (given("--out"))
    cfg.trace_out = f.out;
  if (given("--solution-out"))
    cfg.solution_out = f.solution_out;
  if (given("--w"))
    cfg.schedule.w = f.w;
  if (given("--p"))
    cfg.schedule.p = f.p;
  if (given("--K"))
    cfg.schedule.K = f.K;
  if (given("--max-level"))
    cfg.schedule.max_level = f.max_level;
  if (given("--baseline-dims"))
    cfg.baseline_dims = f.baseline_dims;
  if (given("--catenary-height"))
    cfg.catenary_height = f.catenary_height;
  if (f.no_reuse)
    cfg.reuse_center = false;
  cfg.validate();
  return cfg;
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

void print_summary(const mlsoo::RunConfig& cfg, const mlsoo::ExperimentResult& r) {
  const auto& last = r.trace.back();
  fmt::print("{} {} n={} best={} regret={} log10_regret={} interior_points={}\n", mlsoo::to_string(cfg.problem),
             mlsoo::to_string(cfg.algorithm), last.n, real(last.best_value), real(last.regret),
             real(last.log10_regret), r.best_curve.interior_size());
}

int cmd_run(const CLI::App* cmd, const Flags& f) {
  const auto cfg = resolve(cmd, f);
  print_summary(cfg, mlsoo::run_experiment(cfg));
  return kOk;
}

int cmd_compare(const CLI::App* cmd, const Flags& f) {
  auto ml = resolve(cmd, f);
  ml.algorithm = mlsoo::Algorithm::multilevel;
  ml.trace_out.clear();
  ml.solution_out.clear();
  auto fixed = ml;
  fixed.algorithm = mlsoo::Algorithm::soo_fixed;

  auto a = std::async(std::launch::async, [&] { return mlsoo::run_experiment(ml); });
  auto b = std::async(std::launch::async, [&] { return mlsoo::run_experiment(fixed); });
  const auto ra = a.get();
  const auto rb = b.get();
  print_summary(ml, ra);
  print_summary(fixed, rb);
  const char* verdict = ra.trace.back().regret < rb.trace.back().regret ? "multilevel" : "soo";
  fmt::print("lower_final_regret={}\n", verdict);
  return kOk;
}

int cmd_solution(const CLI::App* cmd, const Flags& f) {
  auto cfg = resolve(cmd, f);
  const std::string target = !cfg.solution_out.empty() ? cfg.solution_out : cfg.trace_out;
  cfg.solution_out.clear();
  cfg.trace_out.clear();
  const auto r = mlsoo::run_experiment(cfg);
  if (target.empty())
    mlsoo::write_solution_csv(std::cout, r.solution);
  else
    mlsoo::write_file(target, [&](std::ostream& os) { mlsoo::write_solution_csv(os, r.solution); });
  return kOk;
}

int cmd_lemma1(std::size_t levels, const std::string& out) {
  const auto f_star = [](double x) { return std::sin(std::numbers::pi * x); };
  const mlsoo::EndpointSpec ep{0.0, 0.0, 1.0, 0.0};
  const auto rows = mlsoo::lemma1_check(mlsoo::l2_misfit(f_star), f_star, ep, levels);
  auto emit = [&](std::ostream& os) {
    os << "level,distance,ratio_to_next\n";
    for (const auto& r : rows)
      os << r.level << ',' << real(r.distance) << ',' << (r.ratio_to_next ? real(*r.ratio_to_next) : "") << '\n';
  };
  emit(std::cout);
  if (!out.empty())
    mlsoo::write_file(out, emit);
  return kOk;
}

int cmd_selftest(std::size_t curves) {
  bool ok = true;
  for (auto kind : {mlsoo::ProblemKind::brachistochrone1, mlsoo::ProblemKind::brachistochrone2,
                    mlsoo::ProblemKind::catenary}) {
    const auto fi = mlsoo::make_instance(kind);
    const auto rep = mlsoo::oracle_agreement(fi, curves, 20240601);
    const bool pass = rep.max_rel_error <= 1e-6;
    ok = ok && pass;
    fmt::print("[{}] oracle agreement {}: {} curves, max relative error {:.3e}\n", pass ? "PASS" : "FAIL",
               mlsoo::to_string(kind), rep.curves, rep.max_rel_error);
  }
  return ok ? kOk : kRuntimeError;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-level simultaneous optimistic optimisation of curve functionals"};
  app.require_subcommand(1, 1);

  Flags run_flags, cmp_flags, sol_flags;
  auto* run = app.add_subcommand("run", "run one configuration and write the trace CSV");
  add_run_flags(run, run_flags);
  auto* cmp = app.add_subcommand("compare", "run multilevel and fixed SOO and print final regrets");
  add_run_flags(cmp, cmp_flags);
  auto* sol = app.add_subcommand("solution", "emit the best curve next to the analytic optimum");
  add_run_flags(sol, sol_flags);

  std::size_t levels = 5;
  std::string lemma_out;
  auto* lem = app.add_subcommand("lemma1", "level-wise L1 distance of the discrete optimum to f*");
  lem->add_option("--levels", levels, "highest level")->check(CLI::Range(1, 12));
  lem->add_option("--out", lemma_out, "CSV path");

  std::size_t curves = 200;
  auto* st = app.add_subcommand("selftest", "closed form vs quadrature oracle on random curves");
  st->add_option("--curves", curves, "curves per instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (*run)
      return cmd_run(run, run_flags);
    if (*cmp)
      return cmd_compare(cmp, cmp_flags);
    if (*sol)
      return cmd_solution(sol, sol_flags);
    if (*lem)
      return cmd_lemma1(levels, lemma_out);
    if (*st)
      return cmd_selftest(curves);
  } catch (const mlsoo::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
