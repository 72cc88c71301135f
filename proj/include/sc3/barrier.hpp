#pragma once

// Small dense log-barrier interior-point method for
//
//   minimize f0(x)  subject to  g_i(x) < 0,  i = 1..m,
//
// with f0 and g_i smooth and convex. The problem type provides
//
//   int dimension() const;
//   double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const;
//   int num_constraints() const;
//   void constraint(int i, const Eigen::VectorXd& x, ConstraintEval& out, bool derivatives) const;
//
// objective() returns +inf outside its domain. The start point must be
// strictly feasible. Each centering step is a damped Newton method; the
// barrier weight grows geometrically until the duality gap m / mu falls below
// the tolerance.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "sc3/error.hpp"

namespace sc3 {

struct ConstraintEval {
  double value = 0.0;
  std::vector<std::pair<int, double>> grad;      // sparse gradient
  std::vector<std::pair<int, int>> hess_index;   // (row, col), row <= col
  std::vector<double> hess_value;

  void clear() {
    value = 0.0;
    grad.clear();
    hess_index.clear();
    hess_value.clear();
  }
  void add_hess(int r, int c, double v) {
    if (v == 0.0) return;
    if (r > c) std::swap(r, c);
    hess_index.emplace_back(r, c);
    hess_value.push_back(v);
  }
};

struct BarrierOptions {
  double gap_tolerance = 1e-7;   // on m / mu, relative to an objective of order one
  double mu0 = 1.0;
  double mu_growth = 20.0;
  double newton_tolerance = 1e-10;  // half squared Newton decrement
  int max_newton_per_round = 200;
  int max_rounds = 60;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int newton_steps = 0;
  int rounds = 0;
  double duality_gap = std::numeric_limits<double>::infinity();
  double stationarity = std::numeric_limits<double>::infinity();  // |grad f0 + sum lambda_i grad g_i|_inf
  bool converged = false;
};

namespace detail {

template <class Problem>
bool strictly_feasible(const Problem& prob, const Eigen::VectorXd& x, ConstraintEval& scratch) {
  for (int i = 0; i < prob.num_constraints(); ++i) {
    prob.constraint(i, x, scratch, false);
    if (!(scratch.value < 0.0)) return false;
  }
  return std::isfinite(prob.objective(x, nullptr, nullptr));
}

// mu * f0 + sum -log(-g_i), with derivatives when requested.
template <class Problem>
double barrier_value(const Problem& prob, const Eigen::VectorXd& x, double mu, Eigen::VectorXd* grad,
                     Eigen::MatrixXd* hess, ConstraintEval& scratch) {
  const double f0 = prob.objective(x, grad, hess);
  if (!std::isfinite(f0)) return std::numeric_limits<double>::infinity();
  double F = mu * f0;
  if (grad) *grad *= mu;
  if (hess) *hess *= mu;
  for (int i = 0; i < prob.num_constraints(); ++i) {
    prob.constraint(i, x, scratch, grad != nullptr);
    const double g = scratch.value;
    if (!(g < 0.0)) return std::numeric_limits<double>::infinity();
    F -= std::log(-g);
    if (!grad) continue;
    const double inv = -1.0 / g;
    for (const auto& [j, v] : scratch.grad) (*grad)(j) += inv * v;
    if (hess) {
      const double inv2 = inv * inv;
      for (const auto& [a, va] : scratch.grad)
        for (const auto& [b, vb] : scratch.grad) (*hess)(a, b) += inv2 * va * vb;
      for (std::size_t k = 0; k < scratch.hess_index.size(); ++k) {
        const auto [r, c] = scratch.hess_index[k];
        const double v = inv * scratch.hess_value[k];
        (*hess)(r, c) += v;
        if (r != c) (*hess)(c, r) += v;
      }
    }
  }
  return F;
}

}  // namespace detail

template <class Problem>
BarrierResult barrier_minimize(const Problem& prob, Eigen::VectorXd x, const BarrierOptions& opt = {}) {
  const int n = prob.dimension();
  const int m = prob.num_constraints();
  ConstraintEval scratch;
  if (x.size() != n || !detail::strictly_feasible(prob, x, scratch))
    throw Error(ErrorCode::InvalidParams, "barrier start point is not strictly feasible");

  BarrierResult res;
  double mu = opt.mu0;
  Eigen::VectorXd grad(n), dir(n), trial(n);
  Eigen::MatrixXd hess(n, n);

  for (res.rounds = 1; res.rounds <= opt.max_rounds; ++res.rounds) {
    for (int it = 0; it < opt.max_newton_per_round; ++it) {
      grad.setZero();
      hess.setZero();
      const double F = detail::barrier_value(prob, x, mu, &grad, &hess, scratch);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      dir = ldlt.solve(-grad);
      double reg = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      while (ldlt.info() != Eigen::Success || !dir.allFinite() || grad.dot(dir) >= 0.0) {
        ldlt.compute(hess + reg * Eigen::MatrixXd::Identity(n, n));
        dir = ldlt.solve(-grad);
        reg *= 10.0;
        if (reg > 1e30) break;
      }
      const double slope = grad.dot(dir);
      if (!(slope < 0.0) || -0.5 * slope <= opt.newton_tolerance) break;

      double step = 1.0;
      bool moved = false;
      const double slack = 1e-13 * std::abs(F);
      while (step > 1e-12) {
        trial = x + step * dir;
        const double Ft = detail::barrier_value(prob, trial, mu, nullptr, nullptr, scratch);
        if (std::isfinite(Ft) && Ft <= F + 0.25 * step * slope + slack) {
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
      x = trial;
      ++res.newton_steps;
    }
    res.duality_gap = m / mu;
    if (res.duality_gap <= opt.gap_tolerance) {
      res.converged = true;
      break;
    }
    mu *= opt.mu_growth;
  }

  grad.setZero();
  detail::barrier_value(prob, x, mu, &grad, nullptr, scratch);
  res.stationarity = grad.cwiseAbs().maxCoeff() / mu;
  res.objective = prob.objective(x, nullptr, nullptr);
  res.x = std::move(x);
  if (res.rounds > opt.max_rounds) res.rounds = opt.max_rounds;
  return res;
}

}  // namespace sc3
