// Command-line front end: solve, sweep, validate, oracle and profile.
// Exit codes: 0 success, 2 infeasible / unstable / constraint violations, 1 error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "sc3/sc3.hpp"

namespace {

using namespace sc3;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Infeasible:
    case ErrorCode::InfeasibleSubproblem:
    case ErrorCode::Unstabilizable: return kInfeasible;
    default: return kError;
  }
}

json trace_to_json(const SolveTrace& t) {
  json j;
  j["initial_objective"] = t.initial_objective;
  j["converged"] = t.converged;
  j["epsilon"] = t.epsilon;
  j["final_objective"] = std::isinf(t.final_objective) ? json("inf") : json(t.final_objective);
  j["iterations"] = json::array();
  for (const auto& it : t.iterations) {
    json anchors = json::array();
    for (const auto& a : it.anchors)
      anchors.push_back({{"f_hz", a.f0}, {"r_bps", a.r0}, {"region", std::string(to_string(a.region0))}});
    j["iterations"].push_back({{"index", it.index},
                               {"objective", it.objective},
                               {"true_objective", it.true_objective},
                               {"step", it.step},
                               {"anchors", anchors},
                               {"newton_steps", it.inner.newton_steps},
                               {"barrier_rounds", it.inner.rounds},
                               {"duality_gap", it.inner.duality_gap},
                               {"stationarity", it.inner.stationarity},
                               {"kept_start", it.inner.kept_start}});
  }
  return j;
}

json report_to_json(const AllocationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    if (!c.ok)
      checks.push_back({{"name", c.name}, {"loop", c.loop}, {"slack", std::isinf(c.slack) ? json("-inf") : json(c.slack)}});
  return {{"feasible", r.feasible},
          {"worst_slack", std::isinf(r.worst_slack) ? json(r.worst_slack > 0 ? "inf" : "-inf") : json(r.worst_slack)},
          {"violations", checks}};
}

int cmd_solve(const std::string& config, const std::string& out_path, const std::string& scheme, double eps) {
  const Scenario sc = scenario_from_json(read_json_file(config));
  SolverConfig cfg;
  cfg.epsilon = eps;
  json out;
  out["scheme"] = scheme;
  Allocation alloc;
  if (scheme == "sca") {
    auto r = sca_solve(sc, cfg);
    alloc = std::move(r.allocation);
    out["trace"] = trace_to_json(r.trace);
  } else {
    alloc = run_scheme(scheme, sc, cfg).allocation;
  }
  const auto rep = check_allocation(sc, alloc);
  out["allocation"] = allocation_to_json(alloc);
  out["report"] = report_to_json(rep);
  write_json_file(out_path, out);
  std::printf("sum_lqr %s  feasible %s\n", format_number(alloc.sum_lqr).c_str(), rep.feasible ? "yes" : "no");
  return alloc.stable() && rep.feasible ? kOk : kInfeasible;
}

int cmd_sweep(const std::string& config, const std::string& sweep_path, const std::string& out_path) {
  const auto source = ScenarioSource::from_json(read_json_file(config));
  const auto spec = sweep_from_json(read_json_file(sweep_path));
  const auto rows = run_sweep(source, spec);
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + out_path);
  write_sweep_csv(out, rows);
  std::printf("%zu rows written to %s\n", rows.size(), out_path.c_str());
  return kOk;
}

int cmd_validate(const std::string& config, const std::string& alloc_path) {
  const Scenario sc = scenario_from_json(read_json_file(config));
  const Allocation alloc = allocation_from_json(read_json_file(alloc_path));
  const auto rep = check_allocation(sc, alloc);
  for (const auto& c : rep.checks)
    if (!c.ok) std::printf("VIOLATED %-16s loop %2d slack %s\n", c.name.c_str(), c.loop, format_number(c.slack).c_str());
  const double sum = evaluate_allocation(sc, alloc);
  std::printf("feasible %s  worst_slack %s  sum_lqr %s\n", rep.feasible ? "yes" : "no",
              format_number(rep.worst_slack).c_str(), format_number(sum).c_str());
  return rep.feasible && std::isfinite(sum) ? kOk : kInfeasible;
}

int oracle_grid(const Scenario& sc, int grid_n) {
  const auto g = grid_search_global(sc, grid_n);
  const auto s = sca_solve(sc);
  const double gap = (s.allocation.sum_lqr - g.objective) / g.objective;
  std::printf("grid %s  sca %s  relative gap %+.3e  (%ld grid points)\n", format_number(g.objective).c_str(),
              format_number(s.allocation.sum_lqr).c_str(), gap, g.evaluated);
  return kOk;
}

int oracle_mc(const Scenario& sc, std::uint64_t seed, double bits, long cycles) {
  const auto s = sca_solve(sc);
  int status = kOk;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& loop = sc.loops[k];
    if (!loop.control || !loop.control->is_diagonal_standard()) {
      std::printf("loop %zu: no diagonal control model, skipped\n", k);
      continue;
    }
    const auto& a = s.allocation.loops[k];
    const double b = bits > 0.0 ? bits : entropy_per_cycle(a.p_w, a.t_commu_s, loop.distance_m, sc.link);
    const auto r = monte_carlo_loop(*loop.control, b, cycles, seed + k);
    std::printf("loop %zu: bits %.3f  h %.3f  l_min %.6g  bound %s  simulated %s%s\n", k, b, loop.entropy.h,
                loop.entropy.l_min, b > loop.entropy.h ? format_number(lqr_from_entropy(b, loop.entropy)).c_str() : "inf",
                format_number(r.cost).c_str(), r.diverged ? "  (diverged)" : "");
    if (r.diverged) status = kInfeasible;
  }
  return status;
}

int oracle_convexity(const Scenario& sc, std::uint64_t seed) {
  bool all = true;
  const auto report = [&](const std::string& name, const ConvexityReport& r) {
    std::printf("%-28s %s  (%d samples, %d violations, worst %.2e)\n", name.c_str(), r.convex ? "pass" : "FAIL",
                r.samples, r.violations, r.worst_excess);
    all = all && r.convex;
  };
  const Eigen::Vector2d klo(1.0, 0.1), khi(10.0, 10.0);
  report("kernel log(1+1/(x-a))/y, a=0.5",
         convexity_probe([](const Eigen::VectorXd& v) { return std::log1p(1.0 / (v(0) - 0.5)) / v(1); }, klo, khi,
                         500, seed));
  const double F = sc.budgets.f_max_hz, Rm = sc.budgets.r_max_bps;
  const Eigen::Vector2d lo(0.05 * F, 0.0), hi(F, Rm);
  const double K = static_cast<double>(sc.size());
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& loop = sc.loops[k];
    const auto anchor = make_anchor(F / K, Rm / K, loop.data_bits, sc.compute);
    const auto tag = " loop " + std::to_string(k);
    report("t_bar2" + tag, convexity_probe(
                               [&](const Eigen::VectorXd& v) { return t_bar2(v(0), v(1), anchor, loop.data_bits, sc.compute); },
                               lo, hi, 500, seed));
    report("t_bar3" + tag, convexity_probe(
                               [&](const Eigen::VectorXd& v) { return t_bar3(v(0), v(1), anchor, loop.data_bits, sc.compute); },
                               lo, hi, 500, seed));
    report("t_bar_comp" + tag,
           convexity_probe(
               [&](const Eigen::VectorXd& v) { return t_bar_comp(v(0), v(1), anchor, loop.data_bits, sc.compute); },
               lo, hi, 500, seed));
  }
  return all ? kOk : kInfeasible;
}

int cmd_profile(const std::string& config, double r_mbps, double f_lo_ghz, double f_hi_ghz, int points,
                const std::string& out_path) {
  const Scenario sc = scenario_from_json(read_json_file(config));
  std::vector<double> fs;
  for (int i = 0; i < points; ++i)
    fs.push_back(1e9 * (f_lo_ghz + (f_hi_ghz - f_lo_ghz) * i / std::max(1, points - 1)));
  const auto rows = split_profile(sc.loops.front().data_bits, r_mbps * 1e6, sc.compute, fs);
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + out_path);
  write_profile_csv(out, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint sensing, computing and communication resource allocation"};
  app.require_subcommand(1);

  std::string config, out, sweep, alloc, mode = "grid", scheme = "sca";
  double eps = 5e-5, bits = 0.0, r_mbps = 50.0, f_lo = 0.1, f_hi = 6.0;
  std::uint64_t seed = 0;
  int grid_n = 60, points = 60;
  long cycles = 10000;

  auto* solve = app.add_subcommand("solve", "Solve one scenario and write the allocation as JSON");
  solve->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "Output JSON")->required();
  solve->add_option("--eps", eps, "Relative stopping tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--scheme", scheme, "sca, power_only or comm_oriented")
      ->check(CLI::IsMember({"sca", "power_only", "comm_oriented"}));

  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  sw->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--sweep", sweep, "Sweep JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", out, "Output CSV")->required();

  auto* val = app.add_subcommand("validate", "Check an allocation against every constraint");
  val->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  val->add_option("--alloc", alloc, "Allocation JSON")->required()->check(CLI::ExistingFile);

  auto* orc = app.add_subcommand("oracle", "Cross-check the solver with an independent method");
  orc->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  orc->add_option("--mode", mode, "grid, mc or convexity")->check(CLI::IsMember({"grid", "mc", "convexity"}));
  orc->add_option("--seed", seed, "RNG seed");
  orc->add_option("--grid-n", grid_n, "Grid points per dimension")->check(CLI::Range(1, 100));
  orc->add_option("--bits", bits, "Bits per cycle for mc (default: what the solution delivers)");
  orc->add_option("--cycles", cycles, "Simulated cycles for mc")->check(CLI::Range(10000L, 100000000L));

  auto* prof = app.add_subcommand("profile", "Optimal data split across computing frequencies");
  prof->add_option("--config", config, "Scenario JSON (compute params and first loop's data size)")
      ->required()
      ->check(CLI::ExistingFile);
  prof->add_option("--r-mbps", r_mbps, "Backhaul rate")->check(CLI::PositiveNumber);
  prof->add_option("--f-min-ghz", f_lo, "Lowest frequency")->check(CLI::PositiveNumber);
  prof->add_option("--f-max-ghz", f_hi, "Highest frequency")->check(CLI::PositiveNumber);
  prof->add_option("--points", points, "Number of frequencies")->check(CLI::Range(1, 100000));
  prof->add_option("--out", out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every usage error maps to the generic code.
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (*solve) return cmd_solve(config, out, scheme, eps);
    if (*sw) return cmd_sweep(config, sweep, out);
    if (*val) return cmd_validate(config, alloc);
    if (*prof) return cmd_profile(config, r_mbps, f_lo, f_hi, points, out);
    if (*orc) {
      const Scenario sc = scenario_from_json(read_json_file(config));
      if (mode == "grid") return oracle_grid(sc, grid_n);
      if (mode == "mc") return oracle_mc(sc, seed, bits, cycles);
      return oracle_convexity(sc, seed);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kError;
}
