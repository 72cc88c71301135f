#pragma once

// Parameter sweeps over schemes and seeds, emitted as CSV, plus the data-split
// profile of a single loop across computing frequencies.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sc3/baselines.hpp"
#include "sc3/scenario_io.hpp"

namespace sc3 {

inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {"p_max_dbw", "f_max_ghz", "r_max_mbps", "sigma_v2"};
  return names;
}

inline const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names = {"sca", "power_only", "comm_oriented"};
  return names;
}

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  std::vector<std::string> schemes = scheme_names();
  std::vector<std::uint64_t> seeds = {0};

  void validate() const {
    const auto& params = sweep_parameters();
    if (std::find(params.begin(), params.end(), parameter) == params.end())
      throw Error(ErrorCode::BadConfig, "unknown sweep parameter: " + parameter);
    if (values.empty()) throw Error(ErrorCode::BadConfig, "sweep needs at least one value");
    if (schemes.empty() || seeds.empty()) throw Error(ErrorCode::BadConfig, "sweep needs schemes and seeds");
    for (const auto& s : schemes)
      if (std::find(scheme_names().begin(), scheme_names().end(), s) == scheme_names().end())
        throw Error(ErrorCode::BadConfig, "unknown scheme: " + s);
  }
};

inline SweepSpec sweep_from_json(const json& j) {
  try {
    SweepSpec s;
    s.parameter = j.at("parameter").get<std::string>();
    s.values = j.at("values").get<std::vector<double>>();
    if (j.contains("schemes")) s.schemes = j.at("schemes").get<std::vector<std::string>>();
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
}

// A config either pins one scenario or describes a generator; in the latter
// case every sweep seed draws its own scenario.
struct ScenarioSource {
  std::optional<Scenario> fixed;
  ScenarioOverrides overrides;

  static ScenarioSource from_json(const json& j) {
    ScenarioSource s;
    if (j.contains("generate")) {
      const auto& g = j.at("generate");
      if (g.contains("overrides"))
        for (const auto& [k, v] : g.at("overrides").items()) s.overrides[k] = v.get<double>();
      generate_scenario(0, s.overrides);  // reject bad overrides up front
    } else {
      s.fixed = scenario_from_json(j);
    }
    return s;
  }

  Scenario make(std::uint64_t seed) const { return fixed ? *fixed : generate_scenario(seed, overrides); }
};

inline Scenario with_parameter(Scenario sc, const std::string& name, double value) {
  if (name == "p_max_dbw") {
    sc.budgets.p_max_w = dbw_to_w(value);
  } else if (name == "f_max_ghz") {
    sc.budgets.f_max_hz = value * 1e9;
  } else if (name == "r_max_mbps") {
    sc.budgets.r_max_bps = value * 1e6;
  } else if (name == "sigma_v2") {
    for (auto& loop : sc.loops) {
      if (!loop.control)
        throw Error(ErrorCode::UnsupportedStructure, "sigma_v2 sweeps need control matrices for every loop");
      loop.control->sigma_v2 = value;
      loop.entropy = build_entropy_params(*loop.control);
    }
  } else {
    throw Error(ErrorCode::BadConfig, "unknown sweep parameter: " + name);
  }
  sc.validate();
  return sc;
}

struct SchemeOutcome {
  Allocation allocation;
  int iterations = 0;
};

inline SchemeOutcome run_scheme(const std::string& scheme, const Scenario& sc, const SolverConfig& cfg) {
  if (scheme == "sca") {
    auto r = sca_solve(sc, cfg);
    return {std::move(r.allocation), static_cast<int>(r.trace.iterations.size())};
  }
  if (scheme == "power_only") return {power_only_closed_loop(sc, cfg), 0};
  if (scheme == "comm_oriented") return {communication_oriented(sc, cfg), 0};
  throw Error(ErrorCode::BadConfig, "unknown scheme: " + scheme);
}

struct SweepRow {
  double param_value = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;
  double sum_lqr = kInf;
  std::string status;  // ok, unstable, or the error code that stopped the cell
  int iterations = 0;
  double wall_ms = 0.0;
};

inline unsigned thread_limit() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SC3_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

// Rows come out ordered by value, then scheme, then seed, whatever order the
// worker threads finish in.
inline std::vector<SweepRow> run_sweep(const ScenarioSource& source, const SweepSpec& spec,
                                       const SolverConfig& cfg = {}, unsigned threads = thread_limit()) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (double v : spec.values)
    for (const auto& scheme : spec.schemes)
      for (auto seed : spec.seeds) {
        SweepRow r;
        r.param_value = v;
        r.scheme = scheme;
        r.seed = seed;
        rows.push_back(std::move(r));
      }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Scenario sc = with_parameter(source.make(row.seed), spec.parameter, row.param_value);
        const auto out = run_scheme(row.scheme, sc, cfg);
        row.sum_lqr = evaluate_allocation(sc, out.allocation);
        row.iterations = out.iterations;
        row.status = std::isinf(row.sum_lqr) ? "unstable" : "ok";
      } catch (const Error& e) {
        row.status = std::string(to_string(e.code()));
      } catch (const std::exception&) {
        row.status = "error";
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "param_value,scheme,seed,sum_lqr,status,iterations,wall_ms\n";
  for (const auto& r : rows) {
    os << format_number(r.param_value) << ',' << r.scheme << ',' << r.seed << ',' << format_number(r.sum_lqr) << ','
       << r.status << ',' << r.iterations << ',' << std::fixed << std::setprecision(3) << r.wall_ms
       << std::defaultfloat << '\n';
  }
}

struct SplitProfileRow {
  double f_hz = 0.0;
  Region region = Region::S4;
  double part1 = 0.0, part2 = 0.0, part3 = 0.0;  // fractions of the sensor data
  double t_comp = 0.0;
};

inline std::vector<SplitProfileRow> split_profile(double D, double r_bps, const ComputeParams& p,
                                                  const std::vector<double>& f_values) {
  std::vector<SplitProfileRow> out;
  for (double f : f_values) {
    const auto s = optimal_split(f, r_bps, D, p);
    out.push_back({f, s.region, s.d1 / D, s.d2 / D, s.d3 / D, t_comp_star(f, r_bps, D, p)});
  }
  return out;
}

inline void write_profile_csv(std::ostream& os, const std::vector<SplitProfileRow>& rows) {
  os << "f_hz,region,part1,part2,part3,t_comp_s\n";
  for (const auto& r : rows)
    os << format_number(r.f_hz) << ',' << to_string(r.region) << ',' << format_number(r.part1) << ','
       << format_number(r.part2) << ',' << format_number(r.part3) << ',' << format_number(r.t_comp) << '\n';
}

}  // namespace sc3
