#pragma once

// Independent validators: exhaustive grid search over the budget simplexes
// for one or two loops, a Monte-Carlo closed-loop simulation with a quantized
// state estimate, and a random-midpoint convexity probe.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sc3/baselines.hpp"

namespace sc3 {

struct GridResult {
  Allocation allocation;
  double objective = kInf;
  long evaluated = 0;
};

// Every resource is spent in full at the optimum (all costs are nonincreasing
// in p, f and R), so the search runs over the tight simplexes. For one loop
// that leaves a single point.
inline GridResult grid_search_global(const Scenario& sc, int grid_n = 60) {
  sc.validate();
  if (sc.size() > 2) throw Error(ErrorCode::InvalidParams, "grid search supports at most two loops");
  if (grid_n < 1 || grid_n > 100) throw Error(ErrorCode::InvalidParams, "grid_n must be in [1, 100]");
  const double P = sc.budgets.p_max_w, F = sc.budgets.f_max_hz, Rm = sc.budgets.r_max_bps;
  GridResult best;
  if (sc.size() == 1) {
    best.allocation = tight_allocation(sc, {P}, {F}, {Rm});
    best.objective = best.allocation.sum_lqr;
    best.evaluated = 1;
    return best;
  }

  // Per-loop cost tables: computation time depends only on (f, R) and the
  // cost only on (p, window), so the 3-D search reduces to table lookups.
  const int n = grid_n;
  const auto frac = [n](int i) { return static_cast<double>(i) / n; };
  std::vector<std::vector<double>> window(2, std::vector<double>((n + 1) * (n + 1)));
  for (int k = 0; k < 2; ++k) {
    const auto& loop = sc.loops[k];
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double f = F * (k == 0 ? frac(i) : 1.0 - frac(i));
        const double r = Rm * (k == 0 ? frac(j) : 1.0 - frac(j));
        double w = -kInf;
        if (f > 0.0) w = loop.cycle_s - t_comp_star(f, r, loop.data_bits, sc.compute);
        window[k][i * (n + 1) + j] = w;
      }
  }
  int bi = -1, bj = -1, bm = -1;
  for (int m = 0; m <= n; ++m) {
    const double p0 = P * frac(m), p1 = P - p0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const int idx = i * (n + 1) + j;
        const double l0 = loop_cost(p0, window[0][idx], sc.loops[0], sc.link);
        if (std::isinf(l0)) continue;
        const double l1 = loop_cost(p1, window[1][idx], sc.loops[1], sc.link);
        ++best.evaluated;
        if (l0 + l1 < best.objective) {
          best.objective = l0 + l1;
          bi = i;
          bj = j;
          bm = m;
        }
      }
  }
  if (bm < 0) {
    best.allocation = tight_allocation(sc, {P / 2, P / 2}, {F / 2, F / 2}, {Rm / 2, Rm / 2});
    return best;
  }
  const double p0 = P * frac(bm), f0 = F * frac(bi), r0 = Rm * frac(bj);
  best.allocation = tight_allocation(sc, {p0, P - p0}, {f0, F - f0}, {r0, Rm - r0});
  best.objective = best.allocation.sum_lqr;
  return best;
}

struct MonteCarloOptions {
  double range_margin = 6.0;        // quantizer range slack, in standard deviations of the estimate update
  double overflow_factor = 1e4;     // divergence when |x_i| exceeds this many process-noise deviations
  int warmup_cycles = 100;
};

struct MonteCarloResult {
  double cost = kInf;         // average of E[x' Q x | past], the conditional stage cost
  double sample_cost = kInf;  // plain time average of x' Q x
  bool diverged = false;
  long cycles = 0;            // cycles simulated before stopping
};

// Closed-loop simulation of a diagonal plant (B = C = Q = I, R = 0) whose
// controller only learns the encoder's state estimate through
// `bits_per_cycle` bits. Each mode runs a scalar Kalman filter at the encoder,
// a uniform mid-rise quantizer on the estimate's surprise over a zooming
// range, and deadbeat control on the decoded estimate. Fractional budgets are
// handled by carrying leftover fractions of a bit to later cycles.
inline MonteCarloResult monte_carlo_loop(const LoopControlSpec& spec, double bits_per_cycle, long n_cycles,
                                         std::uint64_t seed, const MonteCarloOptions& opt = {}) {
  spec.validate();
  if (!spec.is_diagonal_standard())
    throw Error(ErrorCode::UnsupportedStructure, "simulation supports diagonal plants with B = C = Q = I, R = 0");
  if (n_cycles < 10000) throw Error(ErrorCode::InvalidParams, "n_cycles must be at least 1e4");
  if (!(bits_per_cycle >= 0.0)) throw Error(ErrorCode::InvalidParams, "bits_per_cycle must be nonnegative");

  const auto n = static_cast<int>(spec.state_dim());
  const Eigen::VectorXd a = spec.A.diagonal();
  const double sv2 = spec.sigma_v2, sw2 = spec.sigma_w2;

  // Bits per mode: what the mode needs to be stabilizable plus an equal share
  // of the rest (negative when the budget is short).
  std::vector<double> bits(n);
  double need = 0.0;
  for (int i = 0; i < n; ++i) need += std::max(0.0, std::log2(std::abs(a(i))));
  for (int i = 0; i < n; ++i) bits[i] = std::max(0.0, std::log2(std::abs(a(i)))) + (bits_per_cycle - need) / n;

  // Steady-state scalar Kalman filter per mode.
  std::vector<double> gain(n), drive(n);
  for (int i = 0; i < n; ++i) {
    double post = 0.0;
    for (int it = 0; it < 100000; ++it) {
      const double prior = a(i) * a(i) * post + sv2;
      const double next = sw2 > 0.0 ? prior * sw2 / (prior + sw2) : 0.0;
      if (std::abs(next - post) <= 1e-14 * std::max(1.0, next)) {
        post = next;
        break;
      }
      post = next;
    }
    const double prior = a(i) * a(i) * post + sv2;
    gain[i] = sw2 > 0.0 ? prior / (prior + sw2) : 1.0;
    drive[i] = std::sqrt(std::max(prior - post, 0.0));
  }

  constexpr double kMaxBits = 60.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sv = std::sqrt(sv2), sw = std::sqrt(sw2);
  const double overflow = opt.overflow_factor * sv;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n), est = x, dec = x, range(n), bucket = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) range(i) = opt.range_margin * drive[i];

  MonteCarloResult res;
  double acc = 0.0, acc_sample = 0.0;
  long counted = 0;
  const long total = n_cycles + opt.warmup_cycles;
  for (long t = 0; t < total; ++t) {
    double stage = 0.0, stage_sample = 0.0;
    for (int i = 0; i < n; ++i) {
      // Encoder: filter the noisy measurement; decoder's prediction is a * dec
      // before control, which deadbeat control has already cancelled.
      const double y = x(i) + sw * normal(rng);
      const double pred = 0.0;
      est(i) = est(i) + gain[i] * (y - est(i));
      // Beyond kMaxBits the cells are below double resolution, so surplus
      // bits are dropped rather than carried.
      bucket(i) += bits[i];
      const double whole = std::max(0.0, std::floor(bucket(i)));
      bucket(i) -= whole;
      const double b = std::min(whole, kMaxBits);
      const double levels = std::exp2(b);
      const double L = range(i);
      const double z = est(i) - pred;
      double q = 0.0;
      if (levels >= 2.0) {
        const double cell = 2.0 * L / levels;
        const double j = std::clamp(std::floor((z + L) / cell), 0.0, levels - 1.0);
        q = -L + (j + 0.5) * cell;
      }
      dec(i) = pred + q;
      range(i) = std::abs(a(i)) * L / levels + opt.range_margin * drive[i];

      const double err = x(i) - dec(i);
      stage += a(i) * a(i) * err * err + sv2;
      x(i) = a(i) * err + sv * normal(rng);
      est(i) = a(i) * (est(i) - dec(i));
      stage_sample += x(i) * x(i);
      if (!(std::abs(x(i)) <= overflow)) res.diverged = true;
    }
    res.cycles = t + 1;
    if (res.diverged) break;
    if (t >= opt.warmup_cycles) {
      acc += stage;
      acc_sample += stage_sample;
      ++counted;
    }
  }
  if (!res.diverged && counted > 0) {
    res.cost = acc / counted;
    res.sample_cost = acc_sample / counted;
  }
  return res;
}

struct ConvexityReport {
  bool convex = true;
  int samples = 0;      // midpoint tests with finite endpoint values
  int violations = 0;
  double worst_excess = 0.0;  // max of f(mid) - (f(a) + f(b)) / 2, relative to the scale
};

// Random-midpoint test f((a+b)/2) <= (f(a)+f(b))/2 + 1e-9 * scale on a box,
// with scale = max(1, |f(a)|, |f(b)|). Pairs with a non-finite endpoint are
// skipped.
inline ConvexityReport convexity_probe(const std::function<double(const Eigen::VectorXd&)>& fn,
                                       const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int n_samples,
                                       std::uint64_t seed) {
  if (n_samples < 100) throw Error(ErrorCode::InvalidParams, "n_samples must be at least 100");
  if (lo.size() != hi.size() || lo.size() == 0 || (hi - lo).minCoeff() < 0.0)
    throw Error(ErrorCode::InvalidParams, "invalid domain box");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&] {
    Eigen::VectorXd x(lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
    return x;
  };
  ConvexityReport rep;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd a = draw(), b = draw();
    const double fa = fn(a), fb = fn(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
    const double fm = fn(0.5 * (a + b));
    ++rep.samples;
    const double scale = std::max({1.0, std::abs(fa), std::abs(fb)});
    const double excess = (fm - 0.5 * (fa + fb)) / scale;
    rep.worst_excess = std::max(rep.worst_excess, excess);
    if (!(excess <= 1e-9)) {
      ++rep.violations;
      rep.convex = false;
    }
  }
  return rep;
}

}  // namespace sc3
