#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>

namespace hypertopic {

struct TruncatedSvd {
  Eigen::VectorXd singular_values;  ///< descending, length `rank`
  Eigen::MatrixXd U;                ///< n x rank
  Eigen::MatrixXd V;                ///< p x rank
  int iterations = 0;
};

/// Leading `rank` singular triplets of a sparse matrix by randomized subspace
/// iteration with `oversample` extra columns, iterated until the leading
/// values stabilize to `tol` (relative). Falls back to a dense SVD when the
/// subspace would cover min(n, p).
TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, Eigen::Index rank,
                           Eigen::Index oversample, std::uint64_t seed, double tol = 1e-14,
                           int max_iters = 3000);

}  // namespace hypertopic
