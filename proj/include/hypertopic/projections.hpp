#pragma once

#include "hypertopic/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace hypertopic {

/// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
/// Sort-based threshold search (Held, Wolfe & Crowder; Michelot).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_simplex(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = v.size();
  Vector sorted = v;
  std::sort(sorted.data(), sorted.data() + n, std::greater<Scalar>());

  Scalar cumulative = 0;
  Scalar threshold = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted(k);
    const Scalar candidate = (cumulative - Scalar(1)) / Scalar(k + 1);
    if (sorted(k) - candidate > Scalar(0)) threshold = candidate;
  }
  Vector x = (v.array() - threshold).cwiseMax(Scalar(0)).matrix();
  // remove the last ulps of drift so rows sum to one to machine precision
  const Scalar total = x.sum();
  if (total > Scalar(0)) x /= total;
  return x;
}

/// Entrywise clamp onto [lo, hi].
template <typename Derived>
typename Derived::PlainObject project_box(const Eigen::MatrixBase<Derived>& v,
                                          typename Derived::Scalar lo,
                                          typename Derived::Scalar hi) {
  if (!(lo < hi)) throw Error(ErrorKind::InvalidParams, "box projection needs lo < hi");
  return v.cwiseMax(lo).cwiseMin(hi);
}

/// Euclidean projection onto {lo <= x_j <= hi, sum x = total}. The solution
/// is x = clip(v - tau, lo, hi); tau is bracketed by bisection and then
/// solved exactly on the identified free set. `hi` may be +infinity.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_capped_simplex(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar lo,
    typename Derived::Scalar hi, typename Derived::Scalar total) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = v.size();
  const Scalar slack = Scalar(1e-12) * std::max(Scalar(1), std::abs(total));
  if (n == 0 || !(lo < hi) || Scalar(n) * lo > total + slack || Scalar(n) * hi < total - slack)
    throw Error(ErrorKind::InfeasibleTarget, "capped simplex target outside [n lo, n hi]");

  auto clipped_sum = [&](Scalar tau) {
    return (v.array() - tau).cwiseMax(lo).cwiseMin(hi).sum();
  };

  const Scalar vmin = v.minCoeff();
  const Scalar vmax = v.maxCoeff();
  // sum(tau) is nonincreasing; at tau_lo every coordinate is >= total / n
  // (or at hi), at tau_hi every coordinate sits at lo.
  Scalar tau_lo = std::isfinite(hi) ? vmin - hi : vmin - total / Scalar(n) - std::abs(lo);
  Scalar tau_hi = vmax - lo;
  for (int it = 0; it < 60; ++it) {
    const Scalar mid = Scalar(0.5) * (tau_lo + tau_hi);
    if (clipped_sum(mid) > total) tau_lo = mid;
    else tau_hi = mid;
  }

  // Exact shift on the free set implied by the bracket.
  Scalar tau = Scalar(0.5) * (tau_lo + tau_hi);
  for (int refine = 0; refine < 4; ++refine) {
    Scalar fixed = 0;
    Scalar free_sum = 0;
    Eigen::Index free_count = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar shifted = v(j) - tau;
      if (shifted <= lo) fixed += lo;
      else if (shifted >= hi) fixed += hi;
      else {
        free_sum += v(j);
        ++free_count;
      }
    }
    if (free_count == 0) break;
    const Scalar exact = (free_sum - (total - fixed)) / Scalar(free_count);
    if (exact == tau) break;
    tau = exact;
  }

  Vector x = (v.array() - tau).cwiseMax(lo).cwiseMin(hi).matrix();
  return x;
}

/// Row-wise simplex projection (document-topic weights).
template <typename Derived>
typename Derived::PlainObject project_rows_simplex(const Eigen::MatrixBase<Derived>& w) {
  typename Derived::PlainObject out(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) out.row(i) = project_simplex(w.row(i).transpose()).transpose();
  return out;
}

/// Column-wise capped-simplex projection (repetition profiles).
template <typename Derived>
typename Derived::PlainObject project_columns_capped(const Eigen::MatrixBase<Derived>& a,
                                                     typename Derived::Scalar lo,
                                                     typename Derived::Scalar hi,
                                                     typename Derived::Scalar total) {
  typename Derived::PlainObject out(a.rows(), a.cols());
  for (Eigen::Index k = 0; k < a.cols(); ++k) out.col(k) = project_capped_simplex(a.col(k), lo, hi, total);
  return out;
}

}  // namespace hypertopic
