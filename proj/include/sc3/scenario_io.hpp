#pragma once

// Unit conversions, random scenario generation and JSON (de)serialization of
// scenarios and allocations. Config keys carry their unit in the name; both
// dB and linear spellings are accepted on input, linear ones are written.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "sc3/problem.hpp"

namespace sc3 {

using json = nlohmann::json;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbw_to_w(double dbw) { return db_to_linear(dbw); }
inline double dbm_to_w(double dbm) { return db_to_linear(dbm - 30.0); }
inline double w_to_dbw(double w) { return linear_to_db(w); }

using ScenarioOverrides = std::map<std::string, double>;

struct GeneratorDefaults {
  double num_loops = 5;
  double radius_m = 5000.0;
  double uav_height_m = 100.0;
  double bandwidth_hz = 5e3;
  double gamma0_db = -60.0;
  double noise_dbm = -110.0;
  double tau_s = 5e-3;
  double alpha = 100.0;
  double beta = 50.0;
  double rho = 0.25;
  double p_max_dbw = 10.0;
  double f_max_ghz = 5.0;
  double r_max_mbps = 50.0;
  double data_bits = 1e6;
  double cycle_s = 0.07;
  double state_dim = 50;
  double a_min = 1.0;   // |a_i| drawn uniformly from (a_min, a_max]
  double a_max = 10.0;
  double sigma_v2 = 0.01;
  double sigma_w2 = 0.001;
};

namespace detail {

inline std::map<std::string, double*> generator_fields(GeneratorDefaults& g) {
  return {{"num_loops", &g.num_loops},   {"radius_m", &g.radius_m},     {"uav_height_m", &g.uav_height_m},
          {"bandwidth_hz", &g.bandwidth_hz}, {"gamma0_db", &g.gamma0_db}, {"noise_dbm", &g.noise_dbm},
          {"tau_s", &g.tau_s},           {"alpha", &g.alpha},           {"beta", &g.beta},
          {"rho", &g.rho},               {"p_max_dbw", &g.p_max_dbw},   {"f_max_ghz", &g.f_max_ghz},
          {"r_max_mbps", &g.r_max_mbps}, {"data_bits", &g.data_bits},   {"cycle_s", &g.cycle_s},
          {"state_dim", &g.state_dim},   {"a_min", &g.a_min},           {"a_max", &g.a_max},
          {"sigma_v2", &g.sigma_v2},     {"sigma_w2", &g.sigma_w2}};
}

}  // namespace detail

inline std::set<std::string> override_keys() {
  GeneratorDefaults g;
  std::set<std::string> keys;
  for (const auto& [k, v] : detail::generator_fields(g)) keys.insert(k);
  return keys;
}

// Robots uniform in a disc around the hub's ground projection, each with a
// diagonal unstable plant of random modes.
inline Scenario generate_scenario(std::uint64_t seed, const ScenarioOverrides& overrides = {}) {
  GeneratorDefaults g;
  auto fields = detail::generator_fields(g);
  for (const auto& [key, value] : overrides) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorCode::BadOverride, "unknown override key: " + key);
    *it->second = value;
  }
  const int K = static_cast<int>(g.num_loops);
  const int n = static_cast<int>(g.state_dim);
  if (K < 1 || n < 1 || !(g.a_min >= 1.0) || !(g.a_max > g.a_min))
    throw Error(ErrorCode::BadOverride, "overrides give an invalid scenario");

  Scenario sc;
  sc.compute = {g.alpha, g.beta, g.rho, g.tau_s};
  sc.link = {g.bandwidth_hz, db_to_linear(g.gamma0_db), dbm_to_w(g.noise_dbm), g.uav_height_m};
  sc.budgets = {dbw_to_w(g.p_max_dbw), g.f_max_ghz * 1e9, g.r_max_mbps * 1e6};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < K; ++k) {
    LoopSpec loop;
    const double radial = g.radius_m * std::sqrt(unit(rng));
    loop.distance_m = std::hypot(g.uav_height_m, radial);
    loop.data_bits = g.data_bits;
    loop.cycle_s = g.cycle_s;
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) {
      // 1 - U lies in (0, 1], so |a| lands in (a_min, a_max].
      const double mag = g.a_min + (g.a_max - g.a_min) * (1.0 - unit(rng));
      a(i) = unit(rng) < 0.5 ? -mag : mag;
    }
    loop.control = LoopControlSpec::diagonal(a, g.sigma_v2, g.sigma_w2);
    loop.entropy = build_entropy_params(*loop.control);
    sc.loops.push_back(std::move(loop));
  }
  sc.validate();
  return sc;
}

namespace detail {

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(ErrorCode::BadConfig, "matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw Error(ErrorCode::BadConfig, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

// Reads `linear` if present, otherwise converts `alt` with `conv`, otherwise
// keeps the default.
template <class Conv>
double read_unit(const json& obj, const char* linear, const char* alt, Conv conv, double fallback) {
  if (obj.contains(linear)) return obj.at(linear).get<double>();
  if (obj.contains(alt)) return conv(obj.at(alt).get<double>());
  return fallback;
}

inline double number_or_inf(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    throw Error(ErrorCode::BadConfig, "expected a number or \"inf\", got " + s);
  }
  return j.get<double>();
}

inline json inf_or_number(double v) { return std::isinf(v) ? json("inf") : json(v); }

inline LoopControlSpec control_from_json(const json& j) {
  const double sv2 = j.value("sigma_v2", 0.01);
  const double sw2 = j.value("sigma_w2", 0.0);
  if (j.contains("a_diag")) {
    const auto v = j.at("a_diag").get<std::vector<double>>();
    return LoopControlSpec::diagonal(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
                                     sv2, sw2);
  }
  LoopControlSpec s;
  s.A = matrix_from_json(j.at("A"));
  const auto n = s.A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  s.B_in = j.contains("B") ? matrix_from_json(j.at("B")) : I;
  s.C = j.contains("C") ? matrix_from_json(j.at("C")) : I;
  s.Q_w = j.contains("Q") ? matrix_from_json(j.at("Q")) : I;
  s.R_w = j.contains("R") ? matrix_from_json(j.at("R")) : Eigen::MatrixXd::Zero(s.B_in.cols(), s.B_in.cols());
  s.sigma_v2 = sv2;
  s.sigma_w2 = sw2;
  s.validate();
  return s;
}

inline json control_to_json(const LoopControlSpec& s) {
  json j;
  if (s.is_diagonal_standard()) {
    j["a_diag"] = std::vector<double>(s.A.diagonal().data(), s.A.diagonal().data() + s.A.rows());
  } else {
    j["A"] = matrix_to_json(s.A);
    j["B"] = matrix_to_json(s.B_in);
    j["C"] = matrix_to_json(s.C);
    j["Q"] = matrix_to_json(s.Q_w);
    j["R"] = matrix_to_json(s.R_w);
  }
  j["sigma_v2"] = s.sigma_v2;
  j["sigma_w2"] = s.sigma_w2;
  return j;
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
  try {
    if (j.contains("generate")) {
      const auto& g = j.at("generate");
      ScenarioOverrides ov;
      if (g.contains("overrides"))
        for (const auto& [k, v] : g.at("overrides").items()) ov[k] = v.get<double>();
      return generate_scenario(g.value("seed", std::uint64_t{0}), ov);
    }
    Scenario sc;
    const json empty = json::object();
    const auto& link = j.contains("link") ? j.at("link") : empty;
    sc.link.bandwidth_hz = link.value("bandwidth_hz", sc.link.bandwidth_hz);
    sc.link.gamma0 = detail::read_unit(link, "gamma0", "gamma0_db", db_to_linear, sc.link.gamma0);
    sc.link.noise_power_w = detail::read_unit(link, "noise_power_w", "noise_dbm", dbm_to_w, sc.link.noise_power_w);
    sc.link.uav_height_m = link.value("uav_height_m", sc.link.uav_height_m);

    const auto& comp = j.contains("compute") ? j.at("compute") : empty;
    sc.compute.alpha = comp.value("alpha", sc.compute.alpha);
    sc.compute.beta = comp.value("beta", sc.compute.beta);
    sc.compute.rho = comp.value("rho", sc.compute.rho);
    sc.compute.tau = comp.value("tau_s", sc.compute.tau);

    const auto& bud = j.contains("budgets") ? j.at("budgets") : empty;
    sc.budgets.p_max_w = detail::read_unit(bud, "p_max_w", "p_max_dbw", dbw_to_w, sc.budgets.p_max_w);
    sc.budgets.f_max_hz =
        detail::read_unit(bud, "f_max_hz", "f_max_ghz", [](double v) { return v * 1e9; }, sc.budgets.f_max_hz);
    sc.budgets.r_max_bps =
        detail::read_unit(bud, "r_max_bps", "r_max_mbps", [](double v) { return v * 1e6; }, sc.budgets.r_max_bps);

    if (!j.contains("loops") || !j.at("loops").is_array())
      throw Error(ErrorCode::BadConfig, "config needs a \"loops\" array or a \"generate\" block");
    for (const auto& lj : j.at("loops")) {
      LoopSpec loop;
      loop.data_bits = lj.value("data_bits", loop.data_bits);
      loop.cycle_s = lj.value("cycle_s", loop.cycle_s);
      loop.distance_m = lj.at("distance_m").get<double>();
      if (lj.contains("control")) loop.control = detail::control_from_json(lj.at("control"));
      if (lj.contains("entropy")) {
        const auto& e = lj.at("entropy");
        loop.entropy.n = e.at("n").get<int>();
        loop.entropy.h = e.at("h_bits").get<double>();
        loop.entropy.l_min = e.at("l_min").get<double>();
        loop.entropy.c = e.at("c").get<double>();
      } else if (loop.control) {
        loop.entropy = build_entropy_params(*loop.control);
      } else {
        throw Error(ErrorCode::BadConfig, "each loop needs \"entropy\" or \"control\"");
      }
      sc.loops.push_back(std::move(loop));
    }
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadOverride || e.code() == ErrorCode::BadConfig) throw;
    throw Error(ErrorCode::BadConfig, e.what());
  }
}

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["link"] = {{"bandwidth_hz", sc.link.bandwidth_hz},
               {"gamma0", sc.link.gamma0},
               {"noise_power_w", sc.link.noise_power_w},
               {"uav_height_m", sc.link.uav_height_m}};
  j["compute"] = {{"alpha", sc.compute.alpha}, {"beta", sc.compute.beta}, {"rho", sc.compute.rho},
                  {"tau_s", sc.compute.tau}};
  j["budgets"] = {{"p_max_w", sc.budgets.p_max_w}, {"f_max_hz", sc.budgets.f_max_hz},
                  {"r_max_bps", sc.budgets.r_max_bps}};
  j["loops"] = json::array();
  for (const auto& l : sc.loops) {
    json lj = {{"data_bits", l.data_bits}, {"cycle_s", l.cycle_s}, {"distance_m", l.distance_m}};
    lj["entropy"] = {{"n", l.entropy.n}, {"h_bits", l.entropy.h}, {"l_min", l.entropy.l_min}, {"c", l.entropy.c}};
    if (l.control) lj["control"] = detail::control_to_json(*l.control);
    j["loops"].push_back(lj);
  }
  return j;
}

inline json allocation_to_json(const Allocation& a) {
  json j;
  j["sum_lqr"] = detail::inf_or_number(a.sum_lqr);
  j["loops"] = json::array();
  for (const auto& l : a.loops) {
    const auto& s = l.split;
    j["loops"].push_back({{"p_w", l.p_w},
                          {"f_hz", l.f_hz},
                          {"r_bps", l.r_bps},
                          {"t_commu_s", l.t_commu_s},
                          {"lqr_cost", detail::inf_or_number(l.lqr_cost)},
                          {"split",
                           {{"d1", s.d1},
                            {"d2", s.d2},
                            {"d3", s.d3},
                            {"f1", s.f1},
                            {"f2", s.f2},
                            {"r2", s.r2},
                            {"r3", s.r3},
                            {"region", std::string(to_string(s.region))}}}});
  }
  return j;
}

// Accepts a bare allocation or any object holding one under "allocation".
inline Allocation allocation_from_json(const json& j) {
  try {
    const json& a = j.contains("allocation") ? j.at("allocation") : j;
    Allocation out;
    out.sum_lqr = a.contains("sum_lqr") ? detail::number_or_inf(a.at("sum_lqr")) : kInf;
    for (const auto& lj : a.at("loops")) {
      LoopAllocation l;
      l.p_w = lj.at("p_w").get<double>();
      l.f_hz = lj.at("f_hz").get<double>();
      l.r_bps = lj.at("r_bps").get<double>();
      l.t_commu_s = lj.at("t_commu_s").get<double>();
      l.lqr_cost = lj.contains("lqr_cost") ? detail::number_or_inf(lj.at("lqr_cost")) : kInf;
      if (lj.contains("split")) {
        const auto& s = lj.at("split");
        l.split.d1 = s.at("d1").get<double>();
        l.split.d2 = s.at("d2").get<double>();
        l.split.d3 = s.at("d3").get<double>();
        l.split.f1 = s.at("f1").get<double>();
        l.split.f2 = s.at("f2").get<double>();
        l.split.r2 = s.at("r2").get<double>();
        l.split.r3 = s.at("r3").get<double>();
        if (s.contains("region")) l.split.region = region_from_string(s.at("region").get<std::string>());
      }
      out.loops.push_back(l);
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace sc3
