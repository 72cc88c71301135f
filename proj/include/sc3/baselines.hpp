#pragma once

// Comparison schemes and a first-principles evaluator for any allocation.
//
//   power_only_closed_loop  equal computing and backhaul shares, optimal power
//   communication_oriented  equal backhaul, computing split minimizing the sum
//                           of computation times, throughput water-filling

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sc3/solver.hpp"

namespace sc3 {

// Sum LQR cost recomputed from (p, f, R) alone: true minimal computation time,
// tight communication window, delivered entropy, best LQR cost. +inf as soon as
// one loop cannot be stabilized.
inline double evaluate_allocation(const Scenario& sc, const Allocation& alloc) {
  if (alloc.loops.size() != sc.size()) return kInf;
  double sum = 0.0;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& a = alloc.loops[k];
    const auto& loop = sc.loops[k];
    double t_comp = kInf;
    try {
      t_comp = t_comp_star(a.f_hz, a.r_bps, loop.data_bits, sc.compute);
    } catch (const Error&) {
      return kInf;
    }
    const double l = loop_cost(a.p_w, loop.cycle_s - t_comp, loop, sc.link);
    if (std::isinf(l)) return kInf;
    sum += l;
  }
  return sum;
}

inline Allocation power_only_closed_loop(const Scenario& sc, const SolverConfig& cfg = {}) {
  sc.validate();
  const std::size_t K = sc.size();
  const double n = static_cast<double>(K);
  std::vector<double> f(K, sc.budgets.f_max_hz / n), r(K, sc.budgets.r_max_bps / n), t(K);
  for (std::size_t k = 0; k < K; ++k)
    t[k] = sc.loops[k].cycle_s - t_comp_star(f[k], r[k], sc.loops[k].data_bits, sc.compute);
  const auto pw = optimal_power(sc, t, cfg);
  return tight_allocation(sc, pw.p, f, r);
}

// Maximizes sum_k log2(1 + g_k p_k / sigma^2) subject to sum p = P:
// p_k = max(0, mu - sigma^2 / g_k).
inline std::vector<double> water_filling(const std::vector<double>& gains, double noise_power_w,
                                         double p_total) {
  const std::size_t K = gains.size();
  std::vector<double> floor(K);
  for (std::size_t k = 0; k < K; ++k) floor[k] = noise_power_w / gains[k];
  std::vector<double> sorted = floor;
  std::sort(sorted.begin(), sorted.end());
  double mu = 0.0, acc = 0.0;
  for (std::size_t m = 1; m <= K; ++m) {
    acc += sorted[m - 1];
    mu = (p_total + acc) / static_cast<double>(m);
    if (m == K || mu <= sorted[m]) break;
  }
  std::vector<double> p(K);
  for (std::size_t k = 0; k < K; ++k) p[k] = std::max(0.0, mu - floor[k]);
  return p;
}

namespace detail {

// min sum_k T_k s_k  s.t.  sum f~ <= 1, f~ > 0, piece_j(F f~_k, R_k) / T_k <= s_k.
// Layout: [f~ | s].
class SumTimeProblem {
 public:
  SumTimeProblem(const Scenario& sc, const std::vector<double>& r, const std::vector<SurrogateAnchor>& anchors,
                 double scale)
      : sc_(sc), r_(r), anchors_(anchors), K_(static_cast<int>(sc.size())), scale_(scale) {
    for (int k = 0; k < K_; ++k) {
      const auto n = surrogate_pieces(1.0, 1.0, anchors_[k], sc_.loops[k].data_bits, sc_.compute).size();
      for (std::size_t j = 0; j < n; ++j) pieces_.emplace_back(k, static_cast<int>(j));
    }
  }

  int dimension() const { return 2 * K_; }
  int num_constraints() const { return 1 + K_ + static_cast<int>(pieces_.size()); }

  double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* /*hess*/) const {
    double s = 0.0;
    for (int k = 0; k < K_; ++k) {
      const double w = sc_.loops[k].cycle_s / scale_;
      s += w * x(K_ + k);
      if (grad) (*grad)(K_ + k) += w;
    }
    return s;
  }

  void constraint(int i, const Eigen::VectorXd& x, ConstraintEval& out, bool derivatives) const {
    out.clear();
    if (i == 0) {
      out.value = x.head(K_).sum() - 1.0;
      if (derivatives)
        for (int k = 0; k < K_; ++k) out.grad.emplace_back(k, 1.0);
      return;
    }
    if (i <= K_) {
      out.value = -x(i - 1);
      if (derivatives) out.grad.emplace_back(i - 1, -1.0);
      return;
    }
    const auto [k, piece] = pieces_[i - 1 - K_];
    const auto& loop = sc_.loops[k];
    const double F = sc_.budgets.f_max_hz, T = loop.cycle_s;
    const auto q = surrogate_pieces(F * x(k), r_[k], anchors_[k], loop.data_bits, sc_.compute)[piece];
    out.value = q.value / T - x(K_ + k);
    if (!std::isfinite(out.value)) out.value = kInf;
    if (!derivatives) return;
    out.grad.emplace_back(k, q.df * F / T);
    out.grad.emplace_back(K_ + k, -1.0);
    out.add_hess(k, k, q.dff * F * F / T);
  }

 private:
  const Scenario& sc_;
  const std::vector<double>& r_;
  const std::vector<SurrogateAnchor>& anchors_;
  int K_;
  double scale_;
  std::vector<std::pair<int, int>> pieces_;
};

inline double sum_comp_time(const Scenario& sc, const std::vector<double>& f, const std::vector<double>& r) {
  double s = 0.0;
  for (std::size_t k = 0; k < sc.size(); ++k) s += t_comp_star(f[k], r[k], sc.loops[k].data_bits, sc.compute);
  return s;
}

}  // namespace detail

// Computing split minimizing the sum of minimal computation times for fixed
// backhaul rates. The sum has concave kinks where a loop switches to purely
// local processing, so it is minimized by the same majorize-and-solve loop as
// the main scheme.
inline std::vector<double> min_sum_time_compute(const Scenario& sc, const std::vector<double>& r,
                                                const SolverConfig& cfg = {}) {
  const int K = static_cast<int>(sc.size());
  const double F = sc.budgets.f_max_hz;
  std::vector<double> f(K, F * (1.0 - 1e-9) / K);
  double prev = detail::sum_comp_time(sc, f, r);
  for (int it = 0; it < cfg.max_outer_iters; ++it) {
    std::vector<SurrogateAnchor> anchors;
    for (int k = 0; k < K; ++k)
      anchors.push_back(make_anchor(f[k], r[k], sc.loops[k].data_bits, sc.compute, 1e-6 * F, 1e-6 * sc.budgets.r_max_bps));

    std::vector<double> start = f;
    detail::shrink_into(start, F, 1e-9);
    Eigen::VectorXd x0(2 * K);
    for (int k = 0; k < K; ++k) {
      x0(k) = std::max(start[k], 1e-9 * F) / F;
      const double tb = t_bar_comp(F * x0(k), r[k], anchors[k], sc.loops[k].data_bits, sc.compute);
      x0(K + k) = tb / sc.loops[k].cycle_s * (1.0 + 1e-6) + 1e-12;
    }
    const detail::SumTimeProblem prob(sc, r, anchors, std::max(prev, 1e-300));
    const auto res = barrier_minimize(prob, x0, cfg.barrier_options(prob.num_constraints()));
    std::vector<double> next(res.x.data(), res.x.data() + K);
    for (double& v : next) v *= F;
    const double cur = detail::sum_comp_time(sc, next, r);
    if (!(cur <= prev)) break;
    f = std::move(next);
    const double decrease = (prev - cur) / prev;
    prev = cur;
    if (decrease < cfg.epsilon) break;
  }
  detail::scale_to(f, F);
  return f;
}

inline Allocation communication_oriented(const Scenario& sc, const SolverConfig& cfg = {}) {
  sc.validate();
  const std::size_t K = sc.size();
  std::vector<double> r(K, sc.budgets.r_max_bps / static_cast<double>(K));
  const auto f = min_sum_time_compute(sc, r, cfg);
  std::vector<double> gains(K);
  for (std::size_t k = 0; k < K; ++k) gains[k] = channel_gain(sc.loops[k].distance_m, sc.link);
  const auto p = water_filling(gains, sc.link.noise_power_w, sc.budgets.p_max_w);
  return tight_allocation(sc, p, f, r);
}

}  // namespace sc3
