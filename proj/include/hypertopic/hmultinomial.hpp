#pragma once

#include "hypertopic/document.hpp"
#include "hypertopic/random.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hypertopic {

/// Parameters (s, q, lambda) of the hypergraph-induced multinomial: each word
/// activates independently with probability q_j, and the s repetitions are
/// allocated over the activated words proportionally to lambda.
class HMultinomialParams {
 public:
  /// Requires 0 < q_j < 1, lambda_j > 0 and sum(lambda) = p within 1e-9 p.
  /// A sum inside that tolerance is renormalized to exactly p.
  HMultinomialParams(long long s, Eigen::VectorXd q, Eigen::VectorXd lambda);

  long long s() const noexcept { return s_; }
  const Eigen::VectorXd& q() const noexcept { return q_; }
  const Eigen::VectorXd& lambda() const noexcept { return lambda_; }
  Index dim() const noexcept { return q_.size(); }

 private:
  long long s_;
  Eigen::VectorXd q_;
  Eigen::VectorXd lambda_;
};

/// log P(D = d). Returns -infinity outside the support (nonempty e with
/// sum(r) != s). Throws DimensionMismatch if sizes differ.
double log_pmf(const HMultinomialParams& params, const Document& doc);
double log_pmf(const HMultinomialParams& params, const Eigen::Ref<const Eigen::VectorXi>& counts);

struct SampleOptions {
  /// Redraw the activation vector until at least one word is active.
  /// Off by default: the empty document carries probability prod(1 - q_j).
  bool reject_empty = false;
};

Eigen::VectorXi sample_support(const Eigen::Ref<const Eigen::VectorXd>& q, Rng& rng,
                               bool reject_empty);

/// r ~ Multinomial(s, theta(e)), theta_j(e) = lambda_j e_j / sum_u lambda_u e_u.
Eigen::VectorXi sample_repetitions(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                   const Eigen::Ref<const Eigen::VectorXi>& support,
                                   long long s, Rng& rng);

/// Draws d = e + r. With an empty support the result is the zero document.
Document sample(const HMultinomialParams& params, Rng& rng, SampleOptions options = {});

/// Every count vector with positive probability for (p, s): the zero vector
/// followed by all d with nonempty support and sum(r) = s. Guarded to p <= 6,
/// s <= 4 (SizeGuard).
std::vector<Eigen::VectorXi> enumerate_support(int p, int s);

}  // namespace hypertopic
