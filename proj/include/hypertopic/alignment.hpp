#pragma once

#include "hypertopic/factor_model.hpp"
#include "hypertopic/permutation.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hypertopic {

struct Assignment {
  std::vector<Index> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// potentials, O(K^3)). Among optimal matchings the lexicographically
/// smallest row_to_col is returned, so ties resolve reproducibly.
Assignment hungarian(const Eigen::Ref<const Eigen::MatrixXd>& cost);

struct AlignmentResult {
  std::vector<Permutation> perms;
  double cost = 0.0;
};

/// Permutation that moves the columns of `estimate` onto the columns of
/// `target` when row k of `cost` prices estimate column k against target
/// column k'.
Permutation permutation_from_cost(const Eigen::Ref<const Eigen::MatrixXd>& cost, double* total = nullptr);

/// Sequential label alignment across time: O_1 = I and each O_t matches
/// slice t to the already aligned slice t-1 under tau-weighted squared
/// distances between P and A columns.
AlignmentResult align_sequential(const ModelParams& params, double tau_p, double tau_a);

/// Per-slice block weights of the oracle error.
struct BlockWeights {
  double w = 1.0;
  double p = 1.0;
  double a = 1.0;
};

/// kappa_W = ||P*||_op^2 + ||A*||_op^2, kappa_P = kappa_A = ||W*||_op^2.
BlockWeights operator_norm_weights(const TimeSliceParams& truth);
std::vector<BlockWeights> operator_norm_weights(const ModelParams& truth);

/// Squared spectral norm via the K x K Gram matrix.
double squared_operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& m);

struct OracleAlignment {
  AlignmentResult alignment;  ///< R_t per slice, est.slices[t].permuted(R_t) ~ truth
  double error = 0.0;
  std::vector<double> per_slice;
};

/// Permutation-minimized weighted squared Frobenius error against the truth,
/// solved slice by slice.
OracleAlignment oracle_align(const ModelParams& est, const ModelParams& truth,
                             const std::vector<BlockWeights>& weights);

}  // namespace hypertopic
