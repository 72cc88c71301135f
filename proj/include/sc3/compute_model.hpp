#pragma once

// Three-way sensor-data flow latency model for one loop.
//
//   Part 1: processed entirely on the hub's MEC server.
//   Part 2: pre-processed on the MEC server, compressed by rho, then sent to
//           the cloud over the satellite backhaul.
//   Part 3: sent raw to the cloud over the backhaul.
//
// Units are bits, cycles/second, bits/second and seconds throughout.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "sc3/error.hpp"

namespace sc3 {

struct ComputeParams {
  double alpha = 100.0;  // CPU cycles per bit, full processing
  double beta = 50.0;    // CPU cycles per bit, pre-processing
  double rho = 0.25;     // compression ratio of pre-processing, (0, 1]
  double tau = 5e-3;     // one-way ground-satellite propagation delay [s]

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(rho > 0.0) || !(rho <= 1.0) || !(tau > 0.0))
      throw Error(ErrorCode::InvalidParams, "compute params require alpha, beta, tau > 0 and 0 < rho <= 1");
    if (!(alpha > beta))
      throw Error(ErrorCode::InvalidParams, "pre-processing must be cheaper than full processing (alpha > beta)");
  }

  // alpha - alpha*rho - beta. When this is <= 0 pre-processing never pays off
  // and regions S1/S2 are empty.
  double preprocessing_gain() const { return alpha - alpha * rho - beta; }
};

enum class Region { S1, S2, S3, S4 };

constexpr std::string_view to_string(Region r) {
  switch (r) {
    case Region::S1: return "S1";
    case Region::S2: return "S2";
    case Region::S3: return "S3";
    case Region::S4: return "S4";
  }
  return "?";
}

inline Region region_from_string(std::string_view s) {
  if (s == "S1") return Region::S1;
  if (s == "S2") return Region::S2;
  if (s == "S3") return Region::S3;
  if (s == "S4") return Region::S4;
  throw Error(ErrorCode::BadConfig, "unknown region label '" + std::string(s) + "'");
}

// Sizes of the three parts and the resources dedicated to each of them.
struct SplitPlan {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;  // bits
  double f1 = 0.0, f2 = 0.0;            // cycles/s
  double r2 = 0.0, r3 = 0.0;            // bits/s
  Region region = Region::S4;

  double total_bits() const { return d1 + d2 + d3; }
};

struct ComponentTimes {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;

  double max() const { return std::max({t1, t2, t3}); }
};

// Per-part latencies of a plan. A part with no data contributes zero latency,
// including the 4*tau satellite round trips.
inline ComponentTimes component_times(const SplitPlan& plan, const ComputeParams& params) {
  const auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::ZeroResourceForPositiveData, what);
  };
  ComponentTimes t;
  if (plan.d1 > 0.0) {
    need(plan.f1 > 0.0, "part 1 has data but no MEC frequency");
    t.t1 = params.alpha * plan.d1 / plan.f1;
  }
  if (plan.d2 > 0.0) {
    need(plan.f2 > 0.0, "part 2 has data but no MEC frequency");
    need(plan.r2 > 0.0, "part 2 has data but no backhaul rate");
    t.t2 = std::max(params.beta * plan.d2 / plan.f2, params.rho * plan.d2 / plan.r2) + 4.0 * params.tau;
  }
  if (plan.d3 > 0.0) {
    need(plan.r3 > 0.0, "part 3 has data but no backhaul rate");
    t.t3 = plan.d3 / plan.r3 + 4.0 * params.tau;
  }
  return t;
}

namespace detail {

inline void check_resources(double f, double R, double D) {
  if (!(D > 0.0)) throw Error(ErrorCode::InvalidParams, "data size must be positive");
  if (!(f >= 0.0) || !(R >= 0.0)) throw Error(ErrorCode::InvalidParams, "resources must be non-negative");
  if (f == 0.0 && R == 0.0) throw Error(ErrorCode::NoFeasibleFlow, "no MEC frequency and no backhaul rate");
}

}  // namespace detail

// Closed-form branches of the minimal computation time. Each is valid as the
// optimum only inside its region, but all are defined on the open quadrant and
// the surrogate module evaluates them outside their regions.
namespace branch {

inline double t1(double f, double R, double D, const ComputeParams& p) {
  return p.beta * D / (p.beta * R + (1.0 - p.rho) * f) + 4.0 * p.tau;
}

inline double t2(double f, double R, double D, const ComputeParams& p) {
  return (p.rho * p.alpha * D - 4.0 * p.rho * p.tau * f + 4.0 * p.beta * R * p.tau) /
             (p.rho * f + (p.alpha - p.beta) * R) +
         4.0 * p.tau;
}

inline double t3(double f, double R, double D, const ComputeParams& p) {
  return (p.alpha * D - 4.0 * p.tau * f) / (f + p.alpha * R) + 4.0 * p.tau;
}

inline double t4(double f, double /*R*/, double D, const ComputeParams& p) { return p.alpha * D / f; }

}  // namespace branch

// MEC frequency at and above which everything is processed locally.
inline double local_only_threshold(double D, const ComputeParams& p) { return p.alpha * D / (4.0 * p.tau); }

// Boundary between S1/S2 (below) and S3 (above). Only meaningful when the
// pre-processing gain is positive.
inline double preprocessing_threshold(double R, double D, const ComputeParams& p) {
  return (p.preprocessing_gain() * D - 4.0 * p.beta * p.tau * R) / (4.0 * (1.0 - p.rho) * p.tau);
}

// Ties on region boundaries resolve to the higher index (S4 > S3 > S2 > S1).
inline Region classify_region(double f, double R, double D, const ComputeParams& p) {
  if (f >= local_only_threshold(D, p)) return Region::S4;
  if (R <= 0.0 || p.preprocessing_gain() <= 0.0) return Region::S3;
  if (f >= preprocessing_threshold(R, D, p)) return Region::S3;
  if (f >= p.beta * R / p.rho) return Region::S2;
  return Region::S1;
}

inline double t_comp_star(double f, double R, double D, const ComputeParams& p) {
  detail::check_resources(f, R, D);
  switch (classify_region(f, R, D, p)) {
    case Region::S1: return branch::t1(f, R, D, p);
    case Region::S2: return branch::t2(f, R, D, p);
    case Region::S3:
      if (R == 0.0) return branch::t4(f, R, D, p);
      return branch::t3(f, R, D, p);
    case Region::S4: return branch::t4(f, R, D, p);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Recovers a split achieving t_comp_star. Part sizes follow from the
// equalized latency T: d1 = f1*T/alpha, d2 = f2*(T - 4tau)/beta,
// d3 = r3*(T - 4tau).
inline SplitPlan optimal_split(double f, double R, double D, const ComputeParams& p) {
  detail::check_resources(f, R, D);
  SplitPlan plan;
  plan.region = classify_region(f, R, D, p);
  const double T = t_comp_star(f, R, D, p);
  const double offload = std::max(0.0, T - 4.0 * p.tau);
  switch (plan.region) {
    case Region::S4:
      plan.d1 = D;
      plan.f1 = f;
      break;
    case Region::S3:
      if (R == 0.0) {
        plan.d1 = D;
        plan.f1 = f;
        break;
      }
      plan.f1 = f;
      plan.r3 = R;
      plan.d1 = f * T / p.alpha;
      plan.d3 = R * offload;
      break;
    case Region::S2:
      plan.f2 = p.beta * R / p.rho;
      plan.f1 = std::max(0.0, f - plan.f2);
      plan.r2 = R;
      plan.d1 = plan.f1 * T / p.alpha;
      plan.d2 = plan.f2 * offload / p.beta;
      break;
    case Region::S1:
      plan.f2 = f;
      plan.r2 = p.rho * f / p.beta;
      plan.r3 = std::max(0.0, R - plan.r2);
      plan.d2 = f * offload / p.beta;
      plan.d3 = plan.r3 * offload;
      break;
  }
  return plan;
}

// Minimal latency of a fixed split (d1, d2, d3) when the MEC frequency f and
// backhaul rate R are divided optimally between the parts. T is feasible iff
// alpha*d1/T + beta*d2/(T - 4tau) <= f and (rho*d2 + d3)/(T - 4tau) <= R.
inline double min_time_for_split(double d1, double d2, double d3, double f, double R, const ComputeParams& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double backhaul_bits = p.rho * d2 + d3;
  if (backhaul_bits > 0.0 && R <= 0.0) return inf;
  if (d1 + d2 > 0.0 && f <= 0.0) return inf;
  if (d2 == 0.0 && d3 == 0.0) return p.alpha * d1 / f;
  const double t_backhaul = 4.0 * p.tau + backhaul_bits / R;
  if (d2 == 0.0) return std::max(d1 > 0.0 ? p.alpha * d1 / f : 0.0, t_backhaul);
  // f*T^2 - (4 tau f + alpha d1 + beta d2) T + 4 tau alpha d1 = 0, larger root.
  const double b = 4.0 * p.tau * f + p.alpha * d1 + p.beta * d2;
  const double disc = std::max(0.0, b * b - 16.0 * p.tau * f * p.alpha * d1);
  const double t_mec = (b + std::sqrt(disc)) / (2.0 * f);
  return std::max(t_mec, t_backhaul);
}

// Exhaustive grid over (d1, d2) with d3 = D - d1 - d2. Independent of the
// region classification; used to check t_comp_star.
inline double brute_force_min_time(double f, double R, double D, const ComputeParams& p, int grid_n = 200) {
  detail::check_resources(f, R, D);
  if (grid_n < 100) throw Error(ErrorCode::InvalidParams, "brute force grid needs at least 100 points per axis");
  double best = std::numeric_limits<double>::infinity();
  const double step = D / grid_n;
  for (int i = 0; i <= grid_n; ++i) {
    const double d1 = i == grid_n ? D : i * step;
    for (int j = 0; i + j <= grid_n; ++j) {
      const double d2 = j * step;
      const double d3 = (i + j == grid_n) ? 0.0 : std::max(0.0, D - d1 - d2);
      best = std::min(best, min_time_for_split(d1, d2, d3, f, R, p));
    }
  }
  return best;
}

}  // namespace sc3
