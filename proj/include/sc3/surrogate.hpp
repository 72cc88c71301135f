#pragma once

// Convex majorizers of the minimal computation time t_comp_star(f, R), each
// tangent at an anchor (f0, R0). The majorizer used depends on the anchor's
// region:
//
//   anchor in S1 or S2 : max{ T1(f, R), Tbar2(f, R | anchor) }
//   anchor in S3       : Tbar3(f, R | anchor)
//   anchor in S4       : T4(f, R) = alpha D / f
//
// Tbar2 and Tbar3 replace the concave part -c f / (a f + b R) of T2 and T3 by
// its first-order bound from the convexity of 1/(x y).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "sc3/compute_model.hpp"

namespace sc3 {

struct SurrogateAnchor {
  double f0 = 0.0;
  double r0 = 0.0;
  Region region0 = Region::S4;
};

// Anchors must be strictly positive; zero components are lifted to the given
// floors before the region is classified.
inline SurrogateAnchor make_anchor(double f0, double r0, double D, const ComputeParams& p, double f_floor = 0.0,
                                   double r_floor = 0.0) {
  SurrogateAnchor a;
  a.f0 = std::max(f0, f_floor);
  a.r0 = std::max(r0, r_floor);
  if (!(a.f0 > 0.0) || !(a.r0 > 0.0)) throw Error(ErrorCode::InvalidParams, "surrogate anchor must be positive");
  a.region0 = classify_region(a.f0, a.r0, D, p);
  return a;
}

inline double inverse_product_bound(double x, double y, double x0, double y0) {
  return (3.0 - x / x0 - y / y0) / (x0 * y0);
}

// Value, gradient and Hessian of a function of (f, R).
struct Quad2 {
  double value = 0.0;
  double df = 0.0, dR = 0.0;
  double dff = 0.0, dfR = 0.0, dRR = 0.0;

  Quad2& operator+=(const Quad2& o) {
    value += o.value;
    df += o.df;
    dR += o.dR;
    dff += o.dff;
    dfR += o.dfR;
    dRR += o.dRR;
    return *this;
  }
};

namespace detail {

// num / (a f + b R)
inline Quad2 recip_linear(double num, double a, double b, double f, double R) {
  const double L = a * f + b * R;
  Quad2 q;
  if (!(L > 0.0)) {
    q.value = std::numeric_limits<double>::infinity();
    return q;
  }
  const double v = num / L;
  const double g = -v / L;
  const double h = -2.0 * g / L;
  q.value = v;
  q.df = g * a;
  q.dR = g * b;
  q.dff = h * a * a;
  q.dfR = h * a * b;
  q.dRR = h * b * b;
  return q;
}

// k / f
inline Quad2 recip_f(double k, double f) {
  Quad2 q;
  q.value = k / f;
  q.df = -k / (f * f);
  q.dff = 2.0 * k / (f * f * f);
  return q;
}

inline Quad2 constant(double c) {
  Quad2 q;
  q.value = c;
  return q;
}

inline Quad2 linear(double a, double b, double f, double R) {
  Quad2 q;
  q.value = a * f + b * R;
  q.df = a;
  q.dR = b;
  return q;
}

inline Quad2 infinite() { return constant(std::numeric_limits<double>::infinity()); }

}  // namespace detail

inline Quad2 t1_quad(double f, double R, double D, const ComputeParams& p) {
  Quad2 q = detail::recip_linear(p.beta * D, 1.0 - p.rho, p.beta, f, R);
  q += detail::constant(4.0 * p.tau);
  return q;
}

inline Quad2 t4_quad(double f, double /*R*/, double D, const ComputeParams& p) {
  if (!(f > 0.0)) return detail::infinite();
  return detail::recip_f(p.alpha * D, f);
}

inline Quad2 t_bar2_quad(double f, double R, const SurrogateAnchor& a, double D, const ComputeParams& p) {
  if (!(f > 0.0)) return detail::infinite();
  const double amb = p.alpha - p.beta;
  const double L0 = p.rho * a.f0 + amb * a.r0;
  const double coef = 4.0 * p.rho * p.alpha * p.tau / amb * a.f0 / L0;
  Quad2 q = detail::recip_linear(p.rho * p.alpha * D, p.rho, amb, f, R);
  q += detail::constant(4.0 * p.alpha * p.tau / amb - 3.0 * coef);
  q += detail::recip_f(coef * a.f0, f);
  q += detail::linear(coef * p.rho / L0, coef * amb / L0, f, R);
  return q;
}

inline Quad2 t_bar3_quad(double f, double R, const SurrogateAnchor& a, double D, const ComputeParams& p) {
  if (!(f > 0.0)) return detail::infinite();
  const double L0 = a.f0 + p.alpha * a.r0;
  const double coef = 4.0 * p.tau * a.f0 / L0;
  Quad2 q = detail::recip_linear(p.alpha * D, 1.0, p.alpha, f, R);
  q += detail::constant(4.0 * p.tau - 3.0 * coef);
  q += detail::recip_f(coef * a.f0, f);
  q += detail::linear(coef / L0, coef * p.alpha / L0, f, R);
  return q;
}

inline double t_bar2(double f, double R, const SurrogateAnchor& a, double D, const ComputeParams& p) {
  return t_bar2_quad(f, R, a, D, p).value;
}

inline double t_bar3(double f, double R, const SurrogateAnchor& a, double D, const ComputeParams& p) {
  return t_bar3_quad(f, R, a, D, p).value;
}

// Smooth convex pieces whose pointwise maximum is the majorizer for this
// anchor. The solver imposes each piece as its own latency constraint.
inline std::vector<Quad2> surrogate_pieces(double f, double R, const SurrogateAnchor& a, double D,
                                           const ComputeParams& p) {
  switch (a.region0) {
    case Region::S1:
    case Region::S2: return {t1_quad(f, R, D, p), t_bar2_quad(f, R, a, D, p)};
    case Region::S3: return {t_bar3_quad(f, R, a, D, p)};
    case Region::S4: return {t4_quad(f, R, D, p)};
  }
  return {};
}

inline double t_bar_comp(double f, double R, const SurrogateAnchor& a, double D, const ComputeParams& p) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& q : surrogate_pieces(f, R, a, D, p)) v = std::max(v, q.value);
  return v;
}

}  // namespace sc3
