#pragma once

// Entropy / LQR-cost trade-off of a linear loop.
//
// A loop that receives e bits per cycle can at best reach the LQR cost
//
//   l(e) = l_min + c / (2^(2 (e - h) / n) - 1),      e > h,
//
// and conversely needs at least
//
//   e(l) = h + (n / 2) log2(1 + c / (l - l_min))     bits to reach cost l.
//
// EntropyParams is the canonical description of a loop. build_entropy_params
// derives it from the plant matrices for diagonal plants with C = I, Q = I,
// R = 0; other plants must supply EntropyParams directly.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "sc3/error.hpp"

namespace sc3 {

struct LoopControlSpec {
  Eigen::MatrixXd A;      // n x n state matrix
  Eigen::MatrixXd B_in;   // n x m input matrix
  Eigen::MatrixXd C;      // q x n observation matrix
  Eigen::MatrixXd Q_w;    // n x n state weight
  Eigen::MatrixXd R_w;    // m x m input weight
  double sigma_v2 = 0.01; // process noise variance per dimension
  double sigma_w2 = 0.0;  // sensing noise variance per dimension

  Eigen::Index state_dim() const { return A.rows(); }

  // Diagonal plant with B = C = Q = I and R = 0.
  static LoopControlSpec diagonal(const Eigen::VectorXd& a, double sigma_v2, double sigma_w2) {
    const auto n = a.size();
    LoopControlSpec s;
    s.A = a.asDiagonal();
    s.B_in = Eigen::MatrixXd::Identity(n, n);
    s.C = Eigen::MatrixXd::Identity(n, n);
    s.Q_w = Eigen::MatrixXd::Identity(n, n);
    s.R_w = Eigen::MatrixXd::Zero(n, n);
    s.sigma_v2 = sigma_v2;
    s.sigma_w2 = sigma_w2;
    return s;
  }

  void validate() const {
    const auto n = A.rows();
    const bool ok = n >= 1 && A.cols() == n && B_in.rows() == n && C.cols() == n && Q_w.rows() == n &&
                    Q_w.cols() == n && R_w.rows() == B_in.cols() && R_w.cols() == B_in.cols();
    if (!ok) throw Error(ErrorCode::InvalidParams, "inconsistent control matrix dimensions");
    if (!(sigma_v2 > 0.0) || !(sigma_w2 >= 0.0))
      throw Error(ErrorCode::InvalidParams, "noise variances must satisfy sigma_v2 > 0, sigma_w2 >= 0");
    if (!Q_w.isApprox(Q_w.transpose()) || !R_w.isApprox(R_w.transpose(), 1e-12))
      throw Error(ErrorCode::InvalidParams, "LQR weights must be symmetric");
  }

  bool is_diagonal_standard() const {
    const auto n = A.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    return A.isDiagonal() && B_in.rows() == n && B_in.cols() == n && B_in.isApprox(I) && C.rows() == n &&
           C.isApprox(I) && Q_w.isApprox(I) && R_w.isZero(0.0);
  }
};

struct EntropyParams {
  int n = 1;           // state dimension
  double h = 0.0;      // intrinsic entropy rate, bits/cycle
  double l_min = 0.0;  // LQR cost floor
  double c = 1.0;      // n |det(N M)|^(1/n)

  void validate() const {
    if (n < 1 || !(l_min >= 0.0) || !(c > 0.0) || !std::isfinite(h))
      throw Error(ErrorCode::InvalidParams, "entropy params require n >= 1, l_min >= 0, c > 0, finite h");
  }

  friend bool operator==(const EntropyParams&, const EntropyParams&) = default;
};

inline double intrinsic_entropy(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw Error(ErrorCode::InvalidParams, "state matrix must be square");
  // Sum of log|u_ii| from an LU factorization avoids overflowing det() for
  // large diagonal plants.
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal();
  double bits = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag(i) == 0.0) throw Error(ErrorCode::SingularStateMatrix, "det A = 0");
    bits += std::log2(std::abs(diag(i)));
  }
  return bits;
}

inline double min_entropy(double l, const EntropyParams& p) {
  if (!(l > p.l_min)) throw Error(ErrorCode::CostBelowFloor, "requested LQR cost is at or below l_min");
  if (std::isinf(l)) return p.h;
  return p.h + 0.5 * p.n * std::log1p(p.c / (l - p.l_min)) / std::numbers::ln2;
}

// c / (2^(2 (e - h) / n) - 1), written with exp(-x) so it stays finite for
// large surpluses.
inline double lqr_excess(double e, const EntropyParams& p) {
  const double x = 2.0 * std::numbers::ln2 * (e - p.h) / p.n;
  const double q = std::exp(-x);
  return p.c * q / -std::expm1(-x);
}

inline double lqr_from_entropy(double e, const EntropyParams& p) {
  if (!(e > p.h)) throw Error(ErrorCode::Unstabilizable, "entropy per cycle does not exceed the intrinsic rate");
  return p.l_min + lqr_excess(e, p);
}

namespace detail {

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

constexpr int kMaxFixedPointIters = 100000;
constexpr double kFixedPointTol = 1e-10;

// Cost-to-go S of the LQR problem by iterating the Riccati recursion.
inline Eigen::MatrixXd solve_dare(const LoopControlSpec& s) {
  const auto& A = s.A;
  const auto& B = s.B_in;
  Eigen::MatrixXd S = s.Q_w;
  for (int it = 0; it < kMaxFixedPointIters; ++it) {
    const Eigen::MatrixXd G = s.R_w + B.transpose() * S * B;
    const Eigen::MatrixXd BtSA = B.transpose() * S * A;
    const Eigen::MatrixXd next =
        s.Q_w + A.transpose() * S * A - BtSA.transpose() * G.completeOrthogonalDecomposition().solve(BtSA);
    const Eigen::MatrixXd sym = 0.5 * (next + next.transpose());
    if (max_abs_diff(sym, S) < kFixedPointTol) return sym;
    S = sym;
  }
  throw Error(ErrorCode::NoConvergence, "Riccati iteration did not converge");
}

struct KalmanSteadyState {
  Eigen::MatrixXd predicted;  // prior error covariance
  Eigen::MatrixXd filtered;   // posterior error covariance
};

inline KalmanSteadyState solve_kalman(const LoopControlSpec& s) {
  const auto n = s.A.rows();
  const Eigen::MatrixXd Sv = s.sigma_v2 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Sw = s.sigma_w2 * Eigen::MatrixXd::Identity(s.C.rows(), s.C.rows());
  Eigen::MatrixXd post = Eigen::MatrixXd::Zero(n, n);
  for (int it = 0; it < kMaxFixedPointIters; ++it) {
    const Eigen::MatrixXd prior = s.A * post * s.A.transpose() + Sv;
    const Eigen::MatrixXd innov = s.C * prior * s.C.transpose() + Sw;
    const Eigen::MatrixXd gain_t = innov.completeOrthogonalDecomposition().solve(s.C * prior);
    Eigen::MatrixXd next = prior - prior * s.C.transpose() * gain_t;
    next = 0.5 * (next + next.transpose());
    if (max_abs_diff(next, post) < kFixedPointTol * std::max(1.0, next.cwiseAbs().maxCoeff()))
      return {s.A * next * s.A.transpose() + Sv, next};
    post = next;
  }
  throw Error(ErrorCode::NoConvergence, "Kalman covariance iteration did not converge");
}

inline double log_abs_det(const Eigen::MatrixXd& m) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  return lu.matrixLU().diagonal().cwiseAbs().array().log().sum();
}

}  // namespace detail

// Best-effort derivation of the loop constants:
//   S     Riccati cost-to-go
//   M     A' S B (R + B' S B)^+ B' S A
//   Sigma steady-state filtering error covariance
//   N     predicted minus filtered covariance (the estimator's driving noise)
//   l_min tr(Sigma_V S) + tr(Sigma A' M A)
//   c     n |det(N M)|^(1/n)
inline EntropyParams build_entropy_params(const LoopControlSpec& spec) {
  spec.validate();
  if (!spec.A.isDiagonal()) throw Error(ErrorCode::UnsupportedStructure, "builder requires a diagonal state matrix");
  if (!spec.R_w.isZero(0.0)) throw Error(ErrorCode::UnsupportedStructure, "builder requires zero input weight");
  const auto n = spec.A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  if (!spec.C.isApprox(I) || !spec.Q_w.isApprox(I))
    throw Error(ErrorCode::UnsupportedStructure, "builder requires C = I and Q = I");

  EntropyParams out;
  out.n = static_cast<int>(n);
  out.h = intrinsic_entropy(spec.A);

  const Eigen::MatrixXd S = detail::solve_dare(spec);
  const auto& A = spec.A;
  const auto& B = spec.B_in;
  const Eigen::MatrixXd G = spec.R_w + B.transpose() * S * B;
  const Eigen::MatrixXd BtSA = B.transpose() * S * A;
  const Eigen::MatrixXd M = BtSA.transpose() * G.completeOrthogonalDecomposition().solve(BtSA);

  const auto kf = detail::solve_kalman(spec);
  const Eigen::MatrixXd N = kf.predicted - kf.filtered;

  out.l_min = spec.sigma_v2 * S.trace() + (kf.filtered * A.transpose() * M * A).trace();
  const double log_det = detail::log_abs_det(N) + detail::log_abs_det(M);
  out.c = static_cast<double>(n) * std::exp(log_det / static_cast<double>(n));
  out.validate();
  return out;
}

}  // namespace sc3
