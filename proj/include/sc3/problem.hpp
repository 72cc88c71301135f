#pragma once

// Problem instance and decision variables of the joint allocation, plus the
// first-principles cost evaluation and constraint checker shared by the
// solver, the baselines and the oracles.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sc3/channel_model.hpp"
#include "sc3/compute_model.hpp"
#include "sc3/control_model.hpp"

namespace sc3 {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LoopSpec {
  EntropyParams entropy;
  double data_bits = 1e6;     // D_k, sensor data per cycle
  double cycle_s = 0.07;      // T_k, time shared by computing and communication
  double distance_m = 100.0;  // hub to robot
  std::optional<LoopControlSpec> control;
};

struct Budgets {
  double p_max_w = 10.0;
  double f_max_hz = 5e9;
  double r_max_bps = 5e7;
};

struct Scenario {
  std::vector<LoopSpec> loops;
  ComputeParams compute;
  LinkParams link;
  Budgets budgets;

  std::size_t size() const { return loops.size(); }

  void validate() const {
    if (loops.empty()) throw Error(ErrorCode::InvalidParams, "scenario needs at least one loop");
    compute.validate();
    link.validate();
    if (!(budgets.p_max_w > 0.0) || !(budgets.f_max_hz > 0.0) || !(budgets.r_max_bps > 0.0))
      throw Error(ErrorCode::InvalidParams, "budgets must be positive");
    for (const auto& l : loops) {
      l.entropy.validate();
      if (!(l.data_bits > 0.0) || !(l.cycle_s > 0.0) || !(l.distance_m > 0.0))
        throw Error(ErrorCode::InvalidParams, "loop data size, cycle time and distance must be positive");
    }
  }
};

struct LoopAllocation {
  double p_w = 0.0;
  double f_hz = 0.0;
  double r_bps = 0.0;
  double t_commu_s = 0.0;
  double lqr_cost = kInf;
  SplitPlan split;
};

struct Allocation {
  std::vector<LoopAllocation> loops;
  double sum_lqr = kInf;

  bool stable() const { return std::isfinite(sum_lqr); }
};

// Best LQR cost reachable with power p over a communication window t, or +inf
// when the delivered entropy does not exceed the intrinsic rate.
inline double loop_cost(double p_w, double t_commu_s, const LoopSpec& loop, const LinkParams& link) {
  if (!(t_commu_s > 0.0) || !(p_w > 0.0)) return kInf;
  const double e = entropy_per_cycle(p_w, t_commu_s, loop.distance_m, link);
  if (!(e > loop.entropy.h)) return kInf;
  return lqr_from_entropy(e, loop.entropy);
}

// Optimal l_k once the other variables are fixed: the entropy constraint is
// tight because the required entropy decreases in l.
inline double closed_form_l(double p_w, double t_commu_s, const LoopSpec& loop, const LinkParams& link) {
  return lqr_from_entropy(entropy_per_cycle(p_w, t_commu_s, loop.distance_m, link), loop.entropy);
}

// Per-loop allocation with the communication window made tight against the
// true minimal computation time.
inline LoopAllocation tight_loop_allocation(const Scenario& sc, std::size_t k, double p_w, double f_hz,
                                            double r_bps) {
  const auto& loop = sc.loops[k];
  LoopAllocation a;
  a.p_w = p_w;
  a.f_hz = f_hz;
  a.r_bps = r_bps;
  a.split = optimal_split(f_hz, r_bps, loop.data_bits, sc.compute);
  a.t_commu_s = std::max(0.0, loop.cycle_s - t_comp_star(f_hz, r_bps, loop.data_bits, sc.compute));
  a.lqr_cost = loop_cost(p_w, a.t_commu_s, loop, sc.link);
  return a;
}

inline Allocation tight_allocation(const Scenario& sc, const std::vector<double>& p, const std::vector<double>& f,
                                   const std::vector<double>& r) {
  Allocation out;
  out.sum_lqr = 0.0;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    out.loops.push_back(tight_loop_allocation(sc, k, p[k], f[k], r[k]));
    out.sum_lqr += out.loops.back().lqr_cost;
  }
  return out;
}

struct ConstraintCheck {
  std::string name;
  int loop = -1;  // -1 for budget constraints
  double slack = 0.0;  // normalized; negative means violated
  bool ok = true;
};

struct AllocationReport {
  std::vector<ConstraintCheck> checks;
  bool feasible = true;
  double worst_slack = kInf;
};

// Verifies every constraint of the joint problem with the true piecewise
// minimal computation time and reports normalized slacks.
inline AllocationReport check_allocation(const Scenario& sc, const Allocation& alloc, double tolerance = 1e-6) {
  AllocationReport rep;
  const auto add = [&](std::string name, int loop, double slack) {
    const bool ok = slack >= -tolerance;
    rep.checks.push_back({std::move(name), loop, slack, ok});
    rep.feasible = rep.feasible && ok;
    rep.worst_slack = std::min(rep.worst_slack, slack);
  };
  if (alloc.loops.size() != sc.size()) {
    add("loop_count", -1, -kInf);
    return rep;
  }
  double sp = 0.0, sf = 0.0, sr = 0.0;
  for (const auto& l : alloc.loops) {
    sp += l.p_w;
    sf += l.f_hz;
    sr += l.r_bps;
  }
  add("power_budget", -1, (sc.budgets.p_max_w - sp) / sc.budgets.p_max_w);
  add("compute_budget", -1, (sc.budgets.f_max_hz - sf) / sc.budgets.f_max_hz);
  add("backhaul_budget", -1, (sc.budgets.r_max_bps - sr) / sc.budgets.r_max_bps);

  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& loop = sc.loops[k];
    const auto& a = alloc.loops[k];
    const auto& s = a.split;
    const int ki = static_cast<int>(k);
    const double D = loop.data_bits;
    add("nonnegative", ki,
        std::min({a.p_w, a.f_hz, a.r_bps, a.t_commu_s, s.d1, s.d2, s.d3, s.f1, s.f2, s.r2, s.r3}) >= 0.0 ? 0.0
                                                                                                      : -kInf);
    add("split_sum", ki, -std::abs(s.total_bits() - D) / D);
    add("split_compute", ki, (a.f_hz - s.f1 - s.f2) / std::max(a.f_hz, 1.0));
    add("split_backhaul", ki, (a.r_bps - s.r2 - s.r3) / std::max(a.r_bps, 1.0));

    double t_star = kInf;
    if (a.f_hz > 0.0 || a.r_bps > 0.0) t_star = t_comp_star(a.f_hz, a.r_bps, D, sc.compute);
    add("latency", ki, (loop.cycle_s - t_star - a.t_commu_s) / loop.cycle_s);

    double t_split = kInf;
    try {
      t_split = component_times(s, sc.compute).max();
    } catch (const Error&) {
    }
    add("split_latency", ki, (loop.cycle_s - t_split - a.t_commu_s) / loop.cycle_s);

    // Checked as l >= l(e) rather than e >= e(l): near l_min the inverse
    // loses all precision while the forward map stays well conditioned.
    const double e = entropy_per_cycle(a.p_w, a.t_commu_s, loop.distance_m, sc.link);
    double entropy_slack = -kInf;
    if (e > loop.entropy.h && std::isfinite(a.lqr_cost)) {
      const double l_e = lqr_from_entropy(e, loop.entropy);
      entropy_slack = (a.lqr_cost - l_e) / std::max(std::abs(l_e), 1.0);
    }
    add("entropy", ki, entropy_slack);
    if (std::isinf(a.lqr_cost)) add("stability", ki, -kInf);
  }
  return rep;
}

}  // namespace sc3
