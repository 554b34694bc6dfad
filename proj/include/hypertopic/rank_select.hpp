#pragma once

#include "hypertopic/document.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hypertopic {

struct RankSelectConfig {
  double delta = 0.05;  ///< failure probability, in (0, 1)
  double alpha = 0.0;   ///< drift exponent, in [0, 1)
  double lp = 0.01;
  double up = 0.99;
  Index k_cap = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// tau_{n,p} = max_t sqrt(n_t) p^{alpha/2} sqrt(k_tilde)
///           + sqrt(2 max(1 - lp, up) max(n, p) log((n + p) / delta))
///           + (2/3) log((n + p) / delta)
double rank_threshold(const std::vector<Index>& slice_sizes, Index p, double k_tilde,
                      const RankSelectConfig& config);

struct RankEstimate {
  Index k_hat = 0;
  Eigen::VectorXd singular_values;  ///< leading min(k_cap, n, p) values of E
  double tau = 0.0;                 ///< threshold at the selected k_tilde
  Index k_tilde = 1;
};

/// Counts singular values of the stacked support matrix above the threshold.
/// The unknown K inside the threshold is resolved by iterating
/// k_tilde <- max(1, k_hat) from k_tilde = 1 to a fixed point.
RankEstimate estimate_k(const Corpus& corpus, const RankSelectConfig& config);

/// Same rule applied to precomputed singular values.
RankEstimate select_rank(const Eigen::VectorXd& singular_values, const std::vector<Index>& slice_sizes,
                         Index p, const RankSelectConfig& config);

}  // namespace hypertopic
