#pragma once

// Successive convex approximation for the joint power, computing and backhaul
// allocation. Each outer iteration replaces the minimal computation time of
// every loop by its convex majorizer anchored at the current point and solves
// the resulting convex program with a log-barrier method over the normalized
// variables (p/P, f/F, R/Rmax, t/T_k).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sc3/barrier.hpp"
#include "sc3/problem.hpp"
#include "sc3/surrogate.hpp"

namespace sc3 {

struct SolverConfig {
  double epsilon = 5e-5;         // relative objective decrease that stops the outer loop
  int max_outer_iters = 50;
  double inner_tolerance = 1e-7; // barrier duality gap, relative to the starting objective
  int inner_max_newton = 200;    // Newton steps per barrier round
  bool extrapolate = true;       // line search along the last move on the true cost

  void validate() const {
    if (!(epsilon > 0.0) || max_outer_iters < 1 || !(inner_tolerance > 0.0) || inner_max_newton < 1)
      throw Error(ErrorCode::InvalidParams, "solver config values must be positive");
  }

  BarrierOptions barrier_options(int num_constraints) const {
    BarrierOptions o;
    o.gap_tolerance = inner_tolerance;
    o.mu0 = 10.0 * num_constraints;
    o.max_newton_per_round = inner_max_newton;
    return o;
  }
};

struct InnerDiagnostics {
  int newton_steps = 0;
  int rounds = 0;
  double duality_gap = kInf;
  double stationarity = kInf;
  bool converged = false;
  bool kept_start = false;  // the convex solve did not improve on its start point
};

struct SolveIteration {
  int index = 0;
  double objective = kInf;       // surrogate objective after the inner solve
  double true_objective = kInf;  // same point, true minimal computation time
  std::vector<SurrogateAnchor> anchors;
  InnerDiagnostics inner;
  double step = 1.0;  // accepted multiple of the inner move
};

struct SolveTrace {
  double initial_objective = kInf;
  std::vector<SolveIteration> iterations;
  bool converged = false;
  double epsilon = 0.0;
  double final_objective = kInf;
};

struct ScaResult {
  Allocation allocation;
  SolveTrace trace;
};

struct InnerSolution {
  Allocation allocation;  // t_commu tight against the surrogate
  InnerDiagnostics diagnostics;
};

struct PowerSolution {
  std::vector<double> p;
  InnerDiagnostics diagnostics;
};

namespace detail {

// l - l_min of one loop as a function of normalized power pn = p / P and
// normalized window tn = t / T, with first and second derivatives.
struct ExcessDerivs {
  double value = kInf;
  double dp = 0.0, dt = 0.0, dpp = 0.0, dpt = 0.0, dtt = 0.0;
};

inline ExcessDerivs loop_excess(double pn, double tn, double P, double T, const LoopSpec& loop,
                                const LinkParams& link, bool derivatives) {
  ExcessDerivs d;
  if (!(pn > 0.0) || !(tn > 0.0)) return d;
  constexpr double ln2 = std::numbers::ln2;
  const auto& ep = loop.entropy;
  const double a = channel_gain(loop.distance_m, link) / link.noise_power_w;
  const double p = P * pn, t = T * tn;
  const double snr = a * p;
  const double se = std::log1p(snr) / ln2;
  const double B = link.bandwidth_hz;
  const double e = B * t * se;
  if (!(e > ep.h)) return d;

  const double kap = 2.0 * ln2 / ep.n;
  const double x = kap * (e - ep.h);
  const double q = std::exp(-x);
  const double om = -std::expm1(-x);
  d.value = ep.c * q / om;
  if (!derivatives) return d;

  const double le = -ep.c * kap * q / (om * om);
  const double lee = ep.c * kap * kap * q * (1.0 + q) / (om * om * om);
  const double se_p = a / (ln2 * (1.0 + snr));
  const double se_pp = -a * a / (ln2 * (1.0 + snr) * (1.0 + snr));
  const double e_p = B * t * se_p * P;
  const double e_t = B * se * T;
  const double e_pp = B * t * se_pp * P * P;
  const double e_pt = B * se_p * P * T;
  d.dp = le * e_p;
  d.dt = le * e_t;
  d.dpp = lee * e_p * e_p + le * e_pp;
  d.dpt = lee * e_p * e_t + le * e_pt;
  d.dtt = lee * e_t * e_t;
  return d;
}

inline std::string loop_list(const std::vector<int>& loops) {
  std::string s;
  for (int k : loops) s += (s.empty() ? "" : ", ") + std::to_string(k);
  return s;
}

// Joint convex program for fixed anchors. Layout: [p~ | f~ | R~ | t~].
class JointProblem {
 public:
  JointProblem(const Scenario& sc, const std::vector<SurrogateAnchor>& anchors, double scale)
      : sc_(sc), anchors_(anchors), K_(static_cast<int>(sc.size())), scale_(scale) {
    for (int k = 0; k < K_; ++k) {
      const auto n = surrogate_pieces(1.0, 1.0, anchors_[k], sc_.loops[k].data_bits, sc_.compute).size();
      for (std::size_t j = 0; j < n; ++j) pieces_.emplace_back(k, static_cast<int>(j));
    }
  }

  int dimension() const { return 4 * K_; }
  int num_constraints() const { return 3 + 3 * K_ + static_cast<int>(pieces_.size()); }

  double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const {
    double s = 0.0;
    for (int k = 0; k < K_; ++k) {
      const auto& loop = sc_.loops[k];
      const int ip = k, it = 3 * K_ + k;
      const auto d = loop_excess(x(ip), x(it), sc_.budgets.p_max_w, loop.cycle_s, loop, sc_.link, grad != nullptr);
      if (!std::isfinite(d.value)) return kInf;
      s += d.value;
      if (grad) {
        (*grad)(ip) += d.dp / scale_;
        (*grad)(it) += d.dt / scale_;
      }
      if (hess) {
        (*hess)(ip, ip) += d.dpp / scale_;
        (*hess)(ip, it) += d.dpt / scale_;
        (*hess)(it, ip) += d.dpt / scale_;
        (*hess)(it, it) += d.dtt / scale_;
      }
    }
    return s / scale_;
  }

  void constraint(int i, const Eigen::VectorXd& x, ConstraintEval& out, bool derivatives) const {
    out.clear();
    if (i < 3) {
      out.value = x.segment(i * K_, K_).sum() - 1.0;
      if (derivatives)
        for (int k = 0; k < K_; ++k) out.grad.emplace_back(i * K_ + k, 1.0);
      return;
    }
    if (i < 3 + 3 * K_) {
      const int j = i - 3;
      out.value = -x(j);
      if (derivatives) out.grad.emplace_back(j, -1.0);
      return;
    }
    const auto [k, piece] = pieces_[i - 3 - 3 * K_];
    const auto& loop = sc_.loops[k];
    const double F = sc_.budgets.f_max_hz, Rm = sc_.budgets.r_max_bps, T = loop.cycle_s;
    const int jf = K_ + k, jr = 2 * K_ + k, jt = 3 * K_ + k;
    const auto q = surrogate_pieces(F * x(jf), Rm * x(jr), anchors_[k], loop.data_bits, sc_.compute)[piece];
    out.value = q.value / T + x(jt) - 1.0;
    if (!std::isfinite(out.value)) out.value = kInf;
    if (!derivatives) return;
    out.grad.emplace_back(jf, q.df * F / T);
    out.grad.emplace_back(jr, q.dR * Rm / T);
    out.grad.emplace_back(jt, 1.0);
    out.add_hess(jf, jf, q.dff * F * F / T);
    out.add_hess(jf, jr, q.dfR * F * Rm / T);
    out.add_hess(jr, jr, q.dRR * Rm * Rm / T);
  }

 private:
  const Scenario& sc_;
  const std::vector<SurrogateAnchor>& anchors_;
  int K_;
  double scale_;
  std::vector<std::pair<int, int>> pieces_;
};

// Power split for fixed communication windows. Layout: [p~].
class PowerProblem {
 public:
  PowerProblem(const Scenario& sc, const std::vector<double>& t, double scale)
      : sc_(sc), t_(t), K_(static_cast<int>(sc.size())), scale_(scale) {}

  int dimension() const { return K_; }
  int num_constraints() const { return 1 + K_; }

  double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const {
    double s = 0.0;
    for (int k = 0; k < K_; ++k) {
      const auto d = loop_excess(x(k), 1.0, sc_.budgets.p_max_w, t_[k], sc_.loops[k], sc_.link, grad != nullptr);
      if (!std::isfinite(d.value)) return kInf;
      s += d.value;
      if (grad) (*grad)(k) += d.dp / scale_;
      if (hess) (*hess)(k, k) += d.dpp / scale_;
    }
    return s / scale_;
  }

  void constraint(int i, const Eigen::VectorXd& x, ConstraintEval& out, bool derivatives) const {
    out.clear();
    if (i == 0) {
      out.value = x.sum() - 1.0;
      if (derivatives)
        for (int k = 0; k < K_; ++k) out.grad.emplace_back(k, 1.0);
      return;
    }
    out.value = -x(i - 1);
    if (derivatives) out.grad.emplace_back(i - 1, -1.0);
  }

 private:
  const Scenario& sc_;
  const std::vector<double>& t_;
  int K_;
  double scale_;
};

inline InnerDiagnostics diagnostics_of(const BarrierResult& r) {
  InnerDiagnostics d;
  d.newton_steps = r.newton_steps;
  d.rounds = r.rounds;
  d.duality_gap = r.duality_gap;
  d.stationarity = r.stationarity;
  d.converged = r.converged;
  return d;
}

// Scales v so that its sum is at most budget * (1 - margin).
inline void shrink_into(std::vector<double>& v, double budget, double margin) {
  double s = 0.0;
  for (double x : v) s += x;
  const double cap = budget * (1.0 - margin);
  if (s > cap)
    for (double& x : v) x *= cap / s;
}

inline void scale_to(std::vector<double>& v, double budget) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s > 0.0)
    for (double& x : v) x *= budget / s;
}

// Allocation whose windows are tight against the surrogate for the given anchors.
inline Allocation surrogate_allocation(const Scenario& sc, const std::vector<SurrogateAnchor>& anchors,
                                       const std::vector<double>& p, const std::vector<double>& f,
                                       const std::vector<double>& r) {
  Allocation out;
  out.sum_lqr = 0.0;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& loop = sc.loops[k];
    LoopAllocation a;
    a.p_w = p[k];
    a.f_hz = f[k];
    a.r_bps = r[k];
    a.split = optimal_split(f[k], r[k], loop.data_bits, sc.compute);
    a.t_commu_s = std::max(0.0, loop.cycle_s - t_bar_comp(f[k], r[k], anchors[k], loop.data_bits, sc.compute));
    a.lqr_cost = loop_cost(p[k], a.t_commu_s, loop, sc.link);
    out.sum_lqr += a.lqr_cost;
    out.loops.push_back(a);
  }
  return out;
}

inline void unpack(const Allocation& a, std::vector<double>& p, std::vector<double>& f, std::vector<double>& r) {
  p.clear();
  f.clear();
  r.clear();
  for (const auto& l : a.loops) {
    p.push_back(l.p_w);
    f.push_back(l.f_hz);
    r.push_back(l.r_bps);
  }
}

// The majorizers are much more curved than the true cost, so successive
// inner moves along a flat valley are short and nearly collinear. Doubling the
// last move while the true cost keeps falling skips most of that crawl.
// Replaces `next` by the best point found and returns the accepted multiple.
inline double extrapolate(const Scenario& sc, const Allocation& prev, Allocation& next) {
  std::vector<double> p0, f0, r0, p1, f1, r1;
  unpack(prev, p0, f0, r0);
  unpack(next, p1, f1, r1);
  // Components that would leave the simplex are clamped to a small floor and
  // the vector is scaled back into its budget.
  const auto project = [](std::vector<double>& v, double budget) {
    double s = 0.0;
    for (double& x : v) {
      x = std::max(x, 1e-9 * budget);
      s += x;
    }
    if (s > budget)
      for (double& x : v) x *= budget / s;
  };
  double best_step = 1.0;
  for (double step = 2.0; step <= 1024.0; step *= 2.0) {
    std::vector<double> p(p0.size()), f(f0.size()), r(r0.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] = p0[k] + step * (p1[k] - p0[k]);
      f[k] = f0[k] + step * (f1[k] - f0[k]);
      r[k] = r0[k] + step * (r1[k] - r0[k]);
    }
    project(f, sc.budgets.f_max_hz);
    project(r, sc.budgets.r_max_bps);
    project(p, sc.budgets.p_max_w);
    Allocation trial = tight_allocation(sc, p, f, r);
    if (!(trial.sum_lqr < next.sum_lqr)) break;
    next = std::move(trial);
    best_step = step;
  }
  return best_step;
}

}  // namespace detail

// Minimizes the LQR sum over the power split alone, for fixed communication
// windows. Throws InfeasibleSubproblem when some loop cannot be stabilized.
inline PowerSolution optimal_power(const Scenario& sc, const std::vector<double>& t_commu,
                                   const SolverConfig& cfg = {}) {
  const int K = static_cast<int>(sc.size());
  const double P = sc.budgets.p_max_w;
  std::vector<double> req(K);
  std::vector<int> bad;
  double req_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& loop = sc.loops[k];
    if (!(t_commu[k] > 0.0)) {
      bad.push_back(k);
      continue;
    }
    req[k] = std::max(0.0, power_for_entropy(loop.entropy.h, t_commu[k], loop.distance_m, sc.link));
    if (!(req[k] < P)) bad.push_back(k);
    req_sum += req[k];
  }
  if (!bad.empty())
    throw Error(ErrorCode::InfeasibleSubproblem,
                "loops cannot be stabilized within the power budget: " + detail::loop_list(bad));
  if (!(req_sum < P))
    throw Error(ErrorCode::InfeasibleSubproblem, "power needed to stabilize all loops exceeds the budget");

  Eigen::VectorXd x0(K);
  const double spare = (P - req_sum) / (2.0 * K);
  for (int k = 0; k < K; ++k) x0(k) = (req[k] + spare) / P;
  double scale = 0.0;
  for (int k = 0; k < K; ++k)
    scale += detail::loop_excess(x0(k), 1.0, P, t_commu[k], sc.loops[k], sc.link, false).value;
  if (!std::isfinite(scale))
    throw Error(ErrorCode::InfeasibleSubproblem, "power needed to stabilize all loops is at the budget limit");

  const detail::PowerProblem prob(sc, t_commu, std::max(scale, 1e-300));
  const auto res = barrier_minimize(prob, x0, cfg.barrier_options(prob.num_constraints()));
  PowerSolution out;
  out.diagnostics = detail::diagnostics_of(res);
  out.p.assign(res.x.data(), res.x.data() + K);
  detail::scale_to(out.p, P);
  return out;
}

// Solves the convex subproblem for fixed anchors starting from `start`. The
// returned point is never worse than the start under the same surrogate.
inline InnerSolution solve_inner(const Scenario& sc, const std::vector<SurrogateAnchor>& anchors,
                                 const SolverConfig& cfg, const Allocation& start) {
  const int K = static_cast<int>(sc.size());
  if (static_cast<int>(anchors.size()) != K || static_cast<int>(start.loops.size()) != K)
    throw Error(ErrorCode::InvalidParams, "anchor and start sizes must match the loop count");
  const double P = sc.budgets.p_max_w, F = sc.budgets.f_max_hz, Rm = sc.budgets.r_max_bps;

  std::vector<double> p, f, r;
  detail::unpack(start, p, f, r);
  const Allocation start_tight = detail::surrogate_allocation(sc, anchors, p, f, r);

  for (int k = 0; k < K; ++k) {
    f[k] = std::max(f[k], 1e-9 * F);
    r[k] = std::max(r[k], 1e-9 * Rm);
  }
  detail::shrink_into(p, P, 1e-9);
  detail::shrink_into(f, F, 1e-9);
  detail::shrink_into(r, Rm, 1e-9);

  Eigen::VectorXd x0(4 * K);
  std::vector<int> bad;
  double scale = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& loop = sc.loops[k];
    const double slack = 1.0 - t_bar_comp(f[k], r[k], anchors[k], loop.data_bits, sc.compute) / loop.cycle_s;
    x0(k) = p[k] / P;
    x0(K + k) = f[k] / F;
    x0(2 * K + k) = r[k] / Rm;
    x0(3 * K + k) = slack * (1.0 - 1e-6);
    const double ex = detail::loop_excess(x0(k), x0(3 * K + k), P, loop.cycle_s, loop, sc.link, false).value;
    if (!(slack > 0.0) || !std::isfinite(ex)) bad.push_back(k);
    scale += ex;
  }
  if (!bad.empty())
    throw Error(ErrorCode::InfeasibleSubproblem, "start point leaves loops unstable: " + detail::loop_list(bad));

  const detail::JointProblem prob(sc, anchors, std::max(scale, 1e-300));
  const auto res = barrier_minimize(prob, x0, cfg.barrier_options(prob.num_constraints()));
  if (!res.converged) throw Error(ErrorCode::NoConvergence, "inner barrier solve hit its round limit");
  for (int k = 0; k < K; ++k) {
    p[k] = P * res.x(k);
    f[k] = F * res.x(K + k);
    r[k] = Rm * res.x(2 * K + k);
  }
  detail::scale_to(p, P);

  InnerSolution out;
  out.diagnostics = detail::diagnostics_of(res);
  out.allocation = detail::surrogate_allocation(sc, anchors, p, f, r);
  if (!(out.allocation.sum_lqr <= start_tight.sum_lqr)) {
    out.allocation = start_tight;
    out.diagnostics.kept_start = true;
  }
  return out;
}

// Anchors at the given allocation, with zero components lifted to a small
// fraction of the budgets.
inline std::vector<SurrogateAnchor> anchors_at(const Scenario& sc, const Allocation& a) {
  std::vector<SurrogateAnchor> out;
  for (std::size_t k = 0; k < sc.size(); ++k)
    out.push_back(make_anchor(a.loops[k].f_hz, a.loops[k].r_bps, sc.loops[k].data_bits, sc.compute,
                              1e-6 * sc.budgets.f_max_hz, 1e-6 * sc.budgets.r_max_bps));
  return out;
}

// Equal computing and backhaul shares with the best power split for them.
inline Allocation equal_share_start(const Scenario& sc, const SolverConfig& cfg = {}) {
  const std::size_t K = sc.size();
  const double share = (1.0 - 1e-9) / static_cast<double>(K);
  std::vector<double> f(K, share * sc.budgets.f_max_hz), r(K, share * sc.budgets.r_max_bps), t(K);
  for (std::size_t k = 0; k < K; ++k)
    t[k] = sc.loops[k].cycle_s - t_comp_star(f[k], r[k], sc.loops[k].data_bits, sc.compute);
  const auto pw = optimal_power(sc, t, cfg);
  return tight_allocation(sc, pw.p, f, r);
}

inline ScaResult sca_solve(const Scenario& sc, const SolverConfig& cfg = {},
                           const std::optional<Allocation>& warm_start = std::nullopt) {
  sc.validate();
  cfg.validate();
  const double P = sc.budgets.p_max_w, F = sc.budgets.f_max_hz, Rm = sc.budgets.r_max_bps;

  Allocation current;
  if (warm_start) {
    if (warm_start->loops.size() != sc.size())
      throw Error(ErrorCode::InvalidParams, "warm start size does not match the loop count");
    std::vector<double> p, f, r;
    detail::unpack(*warm_start, p, f, r);
    current = tight_allocation(sc, p, f, r);
  } else {
    try {
      current = equal_share_start(sc, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleSubproblem) throw;
      throw Error(ErrorCode::Infeasible, std::string("no stabilizing start at equal shares: ") + e.what());
    }
  }
  if (!current.stable()) throw Error(ErrorCode::Infeasible, "start allocation does not stabilize every loop");

  ScaResult out;
  out.trace.initial_objective = current.sum_lqr;
  out.trace.epsilon = cfg.epsilon;
  double prev = current.sum_lqr;
  for (int i = 1; i <= cfg.max_outer_iters; ++i) {
    SolveIteration rec;
    rec.index = i;
    rec.anchors = anchors_at(sc, current);
    const auto inner = solve_inner(sc, rec.anchors, cfg, current);
    rec.objective = inner.allocation.sum_lqr;
    rec.inner = inner.diagnostics;

    std::vector<double> p, f, r;
    detail::unpack(inner.allocation, p, f, r);
    Allocation next = tight_allocation(sc, p, f, r);
    if (cfg.extrapolate) rec.step = detail::extrapolate(sc, current, next);
    current = std::move(next);
    rec.true_objective = current.sum_lqr;
    out.trace.iterations.push_back(rec);

    const double decrease = (prev - rec.objective) / prev;
    prev = rec.objective;
    if (decrease < cfg.epsilon) {
      out.trace.converged = true;
      break;
    }
  }

  // The minimal computation time is nonincreasing in f and R, so handing out
  // the leftover budget can only help.
  std::vector<double> p, f, r;
  detail::unpack(current, p, f, r);
  detail::scale_to(p, P);
  detail::scale_to(f, F);
  detail::scale_to(r, Rm);
  Allocation full = tight_allocation(sc, p, f, r);
  out.allocation = full.sum_lqr <= current.sum_lqr ? std::move(full) : std::move(current);
  out.trace.final_objective = out.allocation.sum_lqr;
  return out;
}

}  // namespace sc3
